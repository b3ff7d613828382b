//! Power-splitting factor that meets a satellite outage target.
//!
//! The satellite outage falls as μ grows, while the IoT outage rises, so the
//! best split for the IoT network is the smallest μ that still meets the
//! target, i.e. the root of op_sat(μ) = ε.

use crate::analysis::{op_sat_lb_ctx, semianalytic_op_sat_ctx, ClosedFormContext};
use crate::error::{Error, Result};
use crate::system::{run_mc, McOptions, NetworkConfig};

/// Distance kept from both ends of the feasible range.
const EDGE: f64 = 1e-6;
const PROBE_POINTS: usize = 8;
const FALLBACK_GRID: usize = 64;
const MAX_BISECTIONS: usize = 100;

/// Target residual |op_sat(μ*) − ε|.
pub const RESIDUAL_TOL: f64 = 1e-3;

/// Range of μ for which the satellite link can be decoded at all:
/// μ/(1−μ) > γ_p, i.e. μ > γ_p/(1+γ_p).
pub fn feasible_mu_range(gamma_p: f64) -> (f64, f64) {
    (gamma_p / (1.0 + gamma_p), 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuStatus {
    Feasible,
    /// Even μ → 1 leaves the satellite outage above ε.
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuSolution {
    pub status: MuStatus,
    /// `None` when infeasible.
    pub mu_star: Option<f64>,
    /// Satellite outage at μ*, or at the upper end of the range when infeasible.
    pub achieved_op_sat: f64,
    /// Number of evaluator calls.
    pub iterations: usize,
}

impl MuSolution {
    pub fn is_feasible(&self) -> bool {
        self.status == MuStatus::Feasible
    }
}

/// Satellite outage model used inside the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SatEvaluator {
    LowerBound,
    SemiAnalytic,
    /// Exact-SINR simulation with common random numbers across μ.
    MonteCarlo(McOptions),
}

impl SatEvaluator {
    pub fn eval(&self, cfg: &NetworkConfig) -> Result<f64> {
        match self {
            SatEvaluator::LowerBound => op_sat_lb_ctx(&ClosedFormContext::new(cfg)?),
            SatEvaluator::SemiAnalytic => semianalytic_op_sat_ctx(&ClosedFormContext::new(cfg)?),
            SatEvaluator::MonteCarlo(opts) => Ok(run_mc(cfg, opts)?.sat.p_hat),
        }
    }
}

/// Solves op_sat(μ) = ε for the configuration's SNR, interference and K.
///
/// Any power split already stored in `cfg` is ignored.
pub fn solve_mu(cfg: &NetworkConfig, epsilon: f64, evaluator: SatEvaluator) -> Result<MuSolution> {
    let mut probe = cfg.with_mu(0.5);
    probe.validate()?;
    solve_mu_with(cfg.gamma_p(), epsilon, |mu| {
        probe = cfg.with_mu(mu);
        evaluator.eval(&probe)
    })
}

/// Same search over an arbitrary outage function of μ.
pub fn solve_mu_with<F>(gamma_p: f64, epsilon: f64, mut op_sat: F) -> Result<MuSolution>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::config(format!("QoS target ε must lie in (0, 1], got {epsilon}")));
    }
    if !(gamma_p >= 0.0) || !gamma_p.is_finite() {
        return Err(Error::domain(format!("threshold γ_p must be finite and nonnegative, got {gamma_p}")));
    }
    let (mu_min, mu_max) = feasible_mu_range(gamma_p);
    let lo = mu_min + EDGE;
    let hi = mu_max - EDGE;
    let mut calls = 0usize;
    let mut f = |mu: f64| -> Result<f64> {
        calls += 1;
        op_sat(mu)
    };

    let op_hi = f(hi)?;
    if op_hi > epsilon {
        return Ok(MuSolution {
            status: MuStatus::Infeasible,
            mu_star: None,
            achieved_op_sat: op_hi,
            iterations: calls,
        });
    }
    let op_lo = f(lo)?;
    if op_lo <= epsilon {
        return Ok(feasible(lo, op_lo, calls));
    }

    // Probe for monotonicity before trusting a single bracket.
    let grid: Vec<f64> = (0..PROBE_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (PROBE_POINTS - 1) as f64)
        .collect();
    let mut values = Vec::with_capacity(PROBE_POINTS);
    for (i, &mu) in grid.iter().enumerate() {
        values.push(match i {
            0 => op_lo,
            i if i == PROBE_POINTS - 1 => op_hi,
            _ => f(mu)?,
        });
    }
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-12);

    let (a, b, op_b) = if monotone {
        let i = values.iter().position(|v| *v <= epsilon).expect("op_sat(hi) ≤ ε");
        (grid[i - 1], grid[i], values[i])
    } else {
        log::warn!("op_sat(μ) is not monotone on the probe grid; using a grid search");
        let mut prev = lo;
        let mut found = None;
        for i in 1..=FALLBACK_GRID {
            let mu = lo + (hi - lo) * i as f64 / FALLBACK_GRID as f64;
            let v = if i == FALLBACK_GRID { op_hi } else { f(mu)? };
            if v <= epsilon {
                found = Some((prev, mu, v));
                break;
            }
            prev = mu;
        }
        found.expect("op_sat(hi) ≤ ε")
    };

    // Bisection keeping op(a) > ε ≥ op(b); b is always admissible.
    let (mut a, mut b, mut op_b) = (a, b, op_b);
    for _ in 0..MAX_BISECTIONS {
        if epsilon - op_b <= 0.1 * RESIDUAL_TOL || b - a <= 1e-12 {
            break;
        }
        let mid = 0.5 * (a + b);
        let v = f(mid)?;
        if v <= epsilon {
            b = mid;
            op_b = v;
        } else {
            a = mid;
        }
    }
    Ok(feasible(b, op_b, calls))
}

fn feasible(mu: f64, op: f64, calls: usize) -> MuSolution {
    MuSolution {
        status: MuStatus::Feasible,
        mu_star: Some(mu),
        achieved_op_sat: op,
        iterations: calls,
    }
}
