use ostn_core::analysis::diversity_fit;
use ostn_core::specfun::{
    bivariate_meijer_g, gamma_fn, kummer_1f1, lower_inc_gamma, meijer_g_1222, BivariateEvaluator, BivariateGSpec,
    BivariateShape, MbOptions, MeijerG1222Spec,
};
use ostn_core::system::{select_best_pair, sinr_iot, sinr_primary, TrialDraw};
use proptest::prelude::*;

/// ₂F₁(a, b; c; −z), z > 0, via the Pfaff transform and the power series.
fn hyp2f1_neg(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let w = z / (1.0 + z);
    let (bb, mut term, mut sum) = (c - b, 1.0, 1.0);
    for k in 0..10_000 {
        let k = k as f64;
        term *= (a + k) * (bb + k) / ((c + k) * (k + 1.0)) * w;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (1.0 + z).powf(-a) * sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gamma_recurrence(x in 0.1f64..30.0) {
        let lhs = gamma_fn(x + 1.0).unwrap();
        let rhs = x * gamma_fn(x).unwrap();
        prop_assert!(((lhs - rhs) / rhs).abs() < 1e-11);
    }

    #[test]
    fn incomplete_gamma_bounded_and_saturates(s in 0.2f64..20.0, x in 0.0f64..60.0) {
        let g = gamma_fn(s).unwrap();
        prop_assert!(lower_inc_gamma(s, x).unwrap() <= g * (1.0 + 1e-14));
        // the tail Γ(s, 50s)/Γ(s) is largest at small s: about 1.5e−6 at s = 0.2
        prop_assert!((lower_inc_gamma(s, 50.0 * s).unwrap() / g - 1.0).abs() < 1e-5);
    }

    #[test]
    fn sinr_ceilings(ac in 0.0f64..1e6, cb in 0.0f64..1e6, cd in 0.0f64..1e6, w in 0.0f64..1e3, mu in 0.01f64..0.99) {
        let mu_prime = mu / (1.0 - mu);
        prop_assert!(sinr_primary(ac, cb, w, mu) < mu_prime);
        prop_assert!(sinr_iot(ac, cd, w, mu) >= 0.0);
    }

    #[test]
    fn selection_picks_an_argmax(v in proptest::collection::vec((0.0f64..1e4, 0.0f64..1e4), 1..6), w in 0.0f64..100.0) {
        let d = TrialDraw {
            lambda_ac: v.iter().map(|p| p.0).collect(),
            lambda_cb: v.iter().map(|p| p.1).collect(),
            lambda_cd: vec![1.0; v.len()],
            w_c: w,
        };
        let k = select_best_pair(&d, 0.75);
        let best = sinr_primary(d.lambda_ac[k], d.lambda_cb[k], w, 0.75);
        for i in 0..v.len() {
            prop_assert!(sinr_primary(d.lambda_ac[i], d.lambda_cb[i], w, 0.75) <= best);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    // the interference density uses a = Λ, b = Λ + M2, z ≤ 0
    #[test]
    fn kummer_transform(lambda in 1usize..11, m2 in 1usize..6, z in -30.0f64..0.0) {
        let (a, b) = (lambda as f64, (lambda + m2) as f64);
        let lhs = kummer_1f1(a, b, z).unwrap();
        let rhs = z.exp() * kummer_1f1(b - a, b, -z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs(), "{} vs {}", lhs, rhs);
        prop_assert!(lhs > 0.0 && lhs <= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn meijer_matches_gauss_reduction(a in 0.5f64..3.0, b in 0.5f64..3.0, c in 0.5f64..3.0, z in 0.1f64..5.0) {
        let g = meijer_g_1222(&MeijerG1222Spec { a1: 1.0 - a, a2: 1.0 - b, b1: 0.0, b2: 1.0 - c, z }).unwrap();
        let oracle = gamma_fn(a).unwrap() * gamma_fn(b).unwrap() / gamma_fn(c).unwrap() * hyp2f1_neg(a, b, c, z);
        prop_assert!(((g - oracle) / oracle).abs() < 1e-8, "{} vs {}", g, oracle);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bivariate_step_halving(extra in 0.5f64..5.0, l in 0usize..4, lambda in 2usize..7, x in 0.05f64..5.0, y in 0.05f64..5.0, type11 in any::<bool>()) {
        let lam = lambda as f64;
        // keep Γ(α+s+t) clear of the midway contours, as in every use site
        let alpha = extra + 0.5 * (1.0 + l as f64) + if type11 { 1.0 } else { 0.5 * lam };
        let spec = if type11 {
            BivariateGSpec {
                shape: BivariateShape::Type11,
                outer: vec![alpha],
                x_upper: vec![-(l as f64)],
                x_lower: vec![0.0],
                y_upper: vec![-1.0],
                y_lower: vec![0.0],
                x,
                y,
            }
        } else {
            BivariateGSpec {
                shape: BivariateShape::Type12,
                outer: vec![alpha],
                x_upper: vec![-(l as f64)],
                x_lower: vec![0.0],
                y_upper: vec![1.0 - lam],
                y_lower: vec![0.0, 1.0 - lam - 2.0],
                x,
                y,
            }
        };
        let auto = bivariate_meijer_g(&spec).unwrap();
        let opts = |h: f64| MbOptions { tol: 1e-11, step: Some(h), max_refine: 6 };
        let v1 = BivariateEvaluator::new(opts(0.2)).eval(&spec).unwrap();
        let v2 = BivariateEvaluator::new(opts(0.1)).eval(&spec).unwrap();
        prop_assert!((v1 - v2).abs() <= 1e-7 * v2.abs(), "{} vs {}", v1, v2);
        prop_assert!((auto - v2).abs() <= 1e-7 * v2.abs(), "{} vs {}", auto, v2);
    }
}

#[test]
fn incomplete_gamma_closed_form() {
    for x in [0.0, 0.1, 1.0, 3.7, 20.0] {
        let exact = -(-x as f64).exp_m1();
        assert!((lower_inc_gamma(1.0, x).unwrap() - exact).abs() <= 1e-14 * exact.max(1e-300));
    }
}

#[test]
fn diversity_of_power_law() {
    let pts: Vec<_> = [10.0, 20.0, 30.0, 40.0]
        .iter()
        .map(|&db: &f64| (db, 3.0 * 10f64.powf(db / 10.0).powi(-2)))
        .collect();
    assert!((diversity_fit(&pts).unwrap() - 2.0).abs() < 1e-9);
}
