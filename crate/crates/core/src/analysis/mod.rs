//! Closed-form, asymptotic and semi-analytic outage evaluators.
//!
//! All evaluators use the high-interference approximation W_c + 1 ≈ W_c and
//! the min-bound on the relayed SINR, so they bound the exact outage from
//! below. The semi-analytic path integrates the same conditional outage
//! numerically over the interference density and is the reference for the
//! Meijer-G closed forms.

mod asymptotic;
mod context;
mod iot;
mod satellite;

pub use asymptotic::{op_iot_asymp, op_sat_asymp, psi_moment, Asymptote, PsiExponent};
pub use context::{AnalysisOptions, ClosedFormContext};
pub use iot::{
    cond_cdf_ac_selected, eval_iot_terms, op_iot_lb, op_iot_lb_ctx, op_iot_lb_raw, semianalytic_op_iot,
    semianalytic_op_iot_ctx, IotTerms,
};
pub use satellite::{
    cond_cdf_ac, op_sat_lb, op_sat_lb_ctx, op_sat_lb_raw, semianalytic_op_sat, semianalytic_op_sat_ctx,
};

use crate::error::{Error, Result};
use crate::specfun::ln_factorial;

/// One SNR point of a sweep. `None` marks quantities that were not computed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepRow {
    pub snr_db: f64,
    pub op_sat_mc: Option<f64>,
    pub op_sat_mc_se: Option<f64>,
    pub op_sat_lb: Option<f64>,
    /// Unclamped; may exceed 1 at low SNR.
    pub op_sat_asymp: Option<f64>,
    pub op_sat_sa: Option<f64>,
    pub op_iot_mc: Option<f64>,
    pub op_iot_mc_se: Option<f64>,
    pub op_iot_lb: Option<f64>,
    pub op_iot_asymp: Option<f64>,
    pub op_iot_sa: Option<f64>,
    pub mu_used: Option<f64>,
}

/// All tuples (s_0, …, s_{m−1}) of nonnegative integers with Σ s = n.
pub fn enumerate_multinomial(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, m: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in (0..=n).rev() {
            prefix.push(i);
            rec(n - i, m - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    rec(n, m, &mut Vec::with_capacity(m), &mut out);
    out
}

/// A multinomial term n!/∏s_m! ∏𝒜_m^{s_m} kept as a logarithm, with
/// Δ = Σ m·s_m.
#[derive(Debug, Clone)]
pub(crate) struct MultiTerm {
    pub delta: usize,
    pub ln_weight: f64,
}

pub(crate) fn multinomial_terms(n: usize, a_m: &[f64]) -> Vec<MultiTerm> {
    enumerate_multinomial(n, a_m.len())
        .into_iter()
        .filter_map(|s| {
            let mut ln_w = ln_factorial(n);
            let mut delta = 0;
            for (m, &sm) in s.iter().enumerate() {
                if sm == 0 {
                    continue;
                }
                if a_m[m] <= 0.0 {
                    return None;
                }
                ln_w += sm as f64 * a_m[m].ln() - ln_factorial(sm);
                delta += m * sm;
            }
            Some(MultiTerm { delta, ln_weight: ln_w })
        })
        .collect()
}

pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

pub(crate) fn alt_sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Clamps a probability to [0, 1], logging when the raw value strays by more than 1e−6.
pub(crate) fn clamp_probability(what: &str, raw: f64) -> Result<f64> {
    if !raw.is_finite() {
        return Err(Error::numeric(what, "non-finite result", None));
    }
    if raw < -1e-6 || raw > 1.0 + 1e-6 {
        log::warn!("{what}: raw value {raw:e} outside [0, 1], clamped");
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Least-squares slope of −log₁₀(op) against snr_db/10.
pub fn diversity_fit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::domain("diversity fit needs at least three points"));
    }
    if let Some((s, op)) = points.iter().find(|(_, op)| !(*op > 0.0)) {
        return Err(Error::domain(format!("outage probability must be positive, got {op} at {s} dB")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(s, _)| s / 10.0).collect();
    let ys: Vec<f64> = points.iter().map(|(_, op)| -op.log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("diversity fit needs distinct SNR values"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::binomial;

    #[test]
    fn multinomial_sets() {
        assert_eq!(enumerate_multinomial(0, 5), vec![vec![0; 5]]);
        assert_eq!(enumerate_multinomial(1, 2), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(enumerate_multinomial(3, 5).len(), 35);
        for n in 0..5 {
            for m in 1..6 {
                let all = enumerate_multinomial(n, m);
                assert_eq!(all.len() as f64, binomial(n + m - 1, m - 1));
                assert!(all.iter().all(|s| s.iter().sum::<usize>() == n));
            }
        }
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| {
            let db = 30.0 + 3.0 * i as f64;
            (db, 7.0 * 10f64.powf(db / 10.0).powi(-2))
        }).collect();
        assert!((diversity_fit(&pts).unwrap() - 2.0).abs() < 1e-9);
        assert!(diversity_fit(&[(1.0, 0.1), (2.0, 0.0), (3.0, 0.1)]).is_err());
    }
}
