use ostn_core::channels::{InterferenceConfig, RayleighParams, SRParams, WcDensity};
use ostn_core::quad::{integrate, integrate_to_infinity, QuadOptions};
use ostn_core::system::NetworkConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 1_000_000;
/// Evaluate the analytic CDF at every STRIDE-th order statistic.
const STRIDE: usize = 250;

fn light() -> SRParams {
    SRParams::new(5, 0.251, 0.279).unwrap()
}

fn heavy() -> SRParams {
    SRParams::new(2, 0.063, 0.0005).unwrap()
}

fn interference() -> InterferenceConfig {
    NetworkConfig::baseline().interference()
}

fn sorted_samples<F: FnMut(&mut ChaCha8Rng) -> f64>(seed: u64, mut draw: F) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..N).map(|_| draw(&mut rng)).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Upper bound on the KS distance from CDF values at every STRIDE-th order
/// statistic: between two evaluated points both the empirical and the
/// analytic CDF are monotone, so the gap is bounded by the bracket ends.
fn ks_upper_bound(samples: &[f64], mut cdf_at: impl FnMut(&[f64]) -> Vec<f64>) -> f64 {
    let n = samples.len();
    let idx: Vec<usize> = (0..n).step_by(STRIDE).chain(std::iter::once(n - 1)).collect();
    let pts: Vec<f64> = idx.iter().map(|&i| samples[i]).collect();
    let f = cdf_at(&pts);
    let mut d: f64 = 0.0;
    // before the first sample the ECDF is 0
    d = d.max(f[0]);
    for w in 0..idx.len() - 1 {
        let (a, b) = (idx[w], idx[w + 1]);
        // on [x_a, x_b): ECDF ∈ [(a+1)/n, b/n], F ∈ [F(x_a), F(x_b)]
        d = d.max(f[w + 1] - (a + 1) as f64 / n as f64);
        d = d.max(b as f64 / n as f64 - f[w]);
    }
    d.max(1.0 - f[f.len() - 1])
}

fn pointwise(mut f: impl FnMut(f64) -> f64) -> impl FnMut(&[f64]) -> Vec<f64> {
    move |xs| xs.iter().map(|&x| f(x)).collect()
}

fn normalization(mut pdf: impl FnMut(f64) -> f64, scale: f64) -> f64 {
    integrate_to_infinity(|x| pdf(x), 0.0, scale, QuadOptions::new(1e-13, 1e-11)).unwrap().value
}

#[test]
fn densities_normalize() {
    let i = interference();
    let wc = WcDensity::new(&i).unwrap();
    let ray = RayleighParams::new(0.2).unwrap();
    let checks = [
        ("light SR", normalization(|x| light().pdf(x), 1.0)),
        ("heavy SR", normalization(|x| heavy().pdf(x), 0.1)),
        ("Rayleigh", normalization(|x| ray.pdf(x), 0.2)),
        ("W_s", normalization(|x| i.ws_pdf(x).unwrap(), 10.0)),
        ("W_t", normalization(|x| i.wt_pdf(x).unwrap(), 20.0)),
        ("W_c", normalization(|x| wc.pdf(x).unwrap(), wc.scale())),
    ];
    for (name, total) in checks {
        assert!((total - 1.0).abs() < 1e-6, "{name}: {total}");
    }
}

#[test]
fn shadowed_rician_samples() {
    for (seed, sr) in [(1, light()), (2, heavy())] {
        let s = sorted_samples(seed, |r| sr.sample(r));
        let d = ks_upper_bound(&s, pointwise(|x| sr.cdf(x)));
        assert!(d < 0.003, "m={}: KS {d}", sr.m);
    }
}

#[test]
fn rayleigh_samples() {
    let p = RayleighParams::new(1.0).unwrap();
    let s = sorted_samples(3, |r| p.sample(r));
    assert!(ks_upper_bound(&s, pointwise(|x| p.cdf(x))) < 0.003);
}

#[test]
fn interference_samples() {
    let i = interference();
    let s = sorted_samples(4, |r| i.ws_sample(r));
    let d = ks_upper_bound(&s, pointwise(|x| i.ws_cdf(x).unwrap()));
    assert!(d < 0.003, "W_s: KS {d}");

    let s = sorted_samples(5, |r| i.wt_sample(r));
    let d = ks_upper_bound(&s, pointwise(|x| i.wt_cdf(x).unwrap()));
    assert!(d < 0.003, "W_t: KS {d}");

    // W_c through its hypergeometric density, integrated piece by piece
    let wc = WcDensity::new(&i).unwrap();
    let s = sorted_samples(6, |r| i.wc_sample(r));
    let d = ks_upper_bound(&s, |xs| {
        let mut acc = 0.0;
        let mut prev = 0.0;
        xs.iter()
            .map(|&x| {
                acc += integrate(|w| wc.pdf(w).unwrap(), prev, x, QuadOptions::new(1e-14, 1e-10)).unwrap().value;
                prev = x;
                acc
            })
            .collect()
    });
    assert!(d < 0.003, "W_c: KS {d}");
}

#[test]
fn wc_mean_matches_samples() {
    let i = interference();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 200_000;
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let w = i.wc_sample(&mut rng);
        s += w;
        s2 += w * w;
    }
    let mean = s / n as f64;
    let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((mean - i.mean_wc()).abs() < 4.0 * se, "{mean} vs {}", i.mean_wc());
}
