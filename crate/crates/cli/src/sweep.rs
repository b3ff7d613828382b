//! SNR sweeps and their CSV form.

use std::io::Write;

use ostn_core::adaptive::{solve_mu, SatEvaluator};
use ostn_core::analysis::{
    op_iot_asymp, op_iot_lb_ctx, op_sat_asymp, op_sat_lb_ctx, semianalytic_op_iot_ctx, semianalytic_op_sat_ctx,
    AnalysisOptions, ClosedFormContext, SweepRow,
};
use ostn_core::specfun::MbOptions;
use ostn_core::system::SinrModel;
use ostn_core::{run_mc, McOptions, NetworkConfig, PowerSplit};
use rayon::prelude::*;

use crate::error::CliError;

pub const CSV_HEADER: &str = "snr_db,op_sat_mc,op_sat_mc_se,op_sat_lb,op_sat_asymp,op_sat_sa,op_iot_mc,op_iot_mc_se,op_iot_lb,op_iot_asymp,op_iot_sa,mu_used";

/// Which evaluators fill a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Which {
    pub mc: bool,
    pub lb: bool,
    pub asymp: bool,
    pub sa: bool,
}

impl Which {
    pub const ALL: Which = Which {
        mc: true,
        lb: true,
        asymp: true,
        sa: true,
    };

    /// Comma-separated subset of `mc,lb,asymp,sa`.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let mut w = Which {
            mc: false,
            lb: false,
            asymp: false,
            sa: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "mc" => w.mc = true,
                "lb" => w.lb = true,
                "asymp" => w.asymp = true,
                "sa" => w.sa = true,
                "all" => w = Which::ALL,
                other => return Err(CliError::Usage(format!("unknown evaluator `{other}` (mc, lb, asymp, sa)"))),
            }
        }
        if w == (Which { mc: false, lb: false, asymp: false, sa: false }) {
            return Err(CliError::Usage("--which selects no evaluator".into()));
        }
        Ok(w)
    }
}

/// Which network's columns a sweep fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Networks {
    pub sat: bool,
    pub iot: bool,
}

impl Networks {
    pub const BOTH: Networks = Networks { sat: true, iot: true };
}

/// How an adaptive power split is resolved at each SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuSolver {
    #[default]
    LowerBound,
    SemiAnalytic,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub snr_start_db: f64,
    pub snr_stop_db: f64,
    pub snr_step_db: f64,
    pub which: Which,
    pub networks: Networks,
    pub n_trials: u64,
    pub seed: u64,
    pub sinr_model: SinrModel,
    pub mu_solver: MuSolver,
    /// Target accuracy of the contour integrals.
    pub tol: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            snr_start_db: 0.0,
            snr_stop_db: 50.0,
            snr_step_db: 5.0,
            which: Which::ALL,
            networks: Networks::BOTH,
            n_trials: 100_000,
            seed: 1,
            sinr_model: SinrModel::Exact,
            mu_solver: MuSolver::LowerBound,
            tol: 1e-10,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let (a, b, s) = (self.snr_start_db, self.snr_stop_db, self.snr_step_db);
        if !(a.is_finite() && b.is_finite() && s.is_finite()) {
            return Err(CliError::Usage("SNR grid must be finite".into()));
        }
        if a > b {
            return Err(CliError::Usage(format!("start {a} dB exceeds stop {b} dB")));
        }
        if !(s > 0.0) {
            return Err(CliError::Usage(format!("step must be positive, got {s}")));
        }
        if self.which.mc && self.n_trials < 1000 {
            return Err(CliError::Usage(format!("Monte Carlo needs at least 1000 trials, got {}", self.n_trials)));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(CliError::Usage(format!("--tol must lie in (0, 1e-3], got {}", self.tol)));
        }
        Ok(())
    }

    /// start, start + step, … up to stop (inclusive, with a little slack for rounding).
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9).floor() as usize;
        (0..=n).map(|i| self.snr_start_db + i as f64 * self.snr_step_db).collect()
    }

    fn mc_options(&self) -> McOptions {
        McOptions {
            model: self.sinr_model,
            ..McOptions::new(self.n_trials, self.seed)
        }
    }

    fn analysis_options(&self) -> AnalysisOptions {
        AnalysisOptions {
            mb: MbOptions {
                tol: self.tol,
                ..MbOptions::default()
            },
        }
    }

    fn sat_evaluator(&self) -> SatEvaluator {
        match self.mu_solver {
            MuSolver::LowerBound => SatEvaluator::LowerBound,
            MuSolver::SemiAnalytic => SatEvaluator::SemiAnalytic,
            MuSolver::MonteCarlo => SatEvaluator::MonteCarlo(self.mc_options()),
        }
    }
}

/// A computed row plus the failures of the cells left empty.
#[derive(Debug, Clone)]
pub struct RowOutcome {
    pub row: SweepRow,
    pub errors: Vec<String>,
}

/// Evaluates one SNR point.
///
/// An adaptive split is solved first; when the QoS target cannot be met
/// every requested outage cell is 1 and `mu_used` is empty.
pub fn compute_row(cfg: &NetworkConfig, snr_db: f64, spec: &SweepSpec) -> RowOutcome {
    let mut row = SweepRow {
        snr_db,
        ..Default::default()
    };
    let mut errors = Vec::new();
    let at = cfg.with_snr_db(snr_db);
    let (w, nets) = (spec.which, spec.networks);

    let mu = match at.power_split {
        PowerSplit::Fixed(mu) => mu,
        PowerSplit::Adaptive { epsilon } => match solve_mu(&at, epsilon, spec.sat_evaluator()) {
            Ok(sol) => match sol.mu_star {
                Some(mu) => mu,
                None => {
                    fill_outage(&mut row, spec);
                    return RowOutcome { row, errors };
                }
            },
            Err(e) => {
                errors.push(format!("{snr_db} dB: μ solver: {e}"));
                return RowOutcome { row, errors };
            }
        },
    };
    row.mu_used = Some(mu);
    let at = at.with_mu(mu);

    if w.mc {
        if let Some(res) = record_mc(&at, spec, &mut errors, snr_db) {
            if nets.sat {
                row.op_sat_mc = Some(res.sat.p_hat);
                row.op_sat_mc_se = Some(res.sat.std_err);
            }
            if nets.iot {
                row.op_iot_mc = Some(res.iot.p_hat);
                row.op_iot_mc_se = Some(res.iot.std_err);
            }
        }
    }
    if w.lb || w.asymp || w.sa {
        let ctx = match ClosedFormContext::with_options(&at, spec.analysis_options()) {
            Ok(c) => c,
            Err(e) => {
                errors.push(format!("{snr_db} dB: analytical context: {e}"));
                return RowOutcome { row, errors };
            }
        };
        let mut record = |name: &str, r: ostn_core::Result<f64>| -> Option<f64> {
            r.map_err(|e| errors.push(format!("{snr_db} dB: {name}: {e}"))).ok()
        };
        if nets.sat {
            if w.lb {
                row.op_sat_lb = record("op_sat_lb", op_sat_lb_ctx(&ctx));
            }
            if w.asymp {
                row.op_sat_asymp = record("op_sat_asymp", op_sat_asymp(&ctx).map(|a| a.value));
            }
            if w.sa {
                row.op_sat_sa = record("op_sat_sa", semianalytic_op_sat_ctx(&ctx));
            }
        }
        if nets.iot {
            if w.lb {
                row.op_iot_lb = record("op_iot_lb", op_iot_lb_ctx(&ctx));
            }
            if w.asymp {
                row.op_iot_asymp = record("op_iot_asymp", op_iot_asymp(&ctx).map(|a| a.value));
            }
            if w.sa {
                row.op_iot_sa = record("op_iot_sa", semianalytic_op_iot_ctx(&ctx));
            }
        }
    }
    RowOutcome { row, errors }
}

fn record_mc(cfg: &NetworkConfig, spec: &SweepSpec, errors: &mut Vec<String>, snr_db: f64) -> Option<ostn_core::McResult> {
    run_mc(cfg, &spec.mc_options())
        .map_err(|e| errors.push(format!("{snr_db} dB: Monte Carlo: {e}")))
        .ok()
}

/// Outage is certain when the QoS target is out of reach.
fn fill_outage(row: &mut SweepRow, spec: &SweepSpec) {
    let (w, nets) = (spec.which, spec.networks);
    let one = |on: bool| on.then_some(1.0);
    let zero = |on: bool| on.then_some(0.0);
    if nets.sat {
        row.op_sat_mc = one(w.mc);
        row.op_sat_mc_se = zero(w.mc);
        row.op_sat_lb = one(w.lb);
        row.op_sat_asymp = one(w.asymp);
        row.op_sat_sa = one(w.sa);
    }
    if nets.iot {
        row.op_iot_mc = one(w.mc);
        row.op_iot_mc_se = zero(w.mc);
        row.op_iot_lb = one(w.lb);
        row.op_iot_asymp = one(w.asymp);
        row.op_iot_sa = one(w.sa);
    }
}

/// All grid points, evaluated in parallel and returned in grid order.
pub fn run_sweep(cfg: &NetworkConfig, spec: &SweepSpec) -> Result<Vec<RowOutcome>, CliError> {
    spec.validate()?;
    cfg.validate()?;
    Ok(spec.grid().into_par_iter().map(|snr| compute_row(cfg, snr, spec)).collect())
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.8e}"),
        None => "NA".to_string(),
    }
}

pub fn format_row(r: &SweepRow) -> String {
    [
        Some(r.snr_db),
        r.op_sat_mc,
        r.op_sat_mc_se,
        r.op_sat_lb,
        r.op_sat_asymp,
        r.op_sat_sa,
        r.op_iot_mc,
        r.op_iot_mc_se,
        r.op_iot_lb,
        r.op_iot_asymp,
        r.op_iot_sa,
        r.mu_used,
    ]
    .into_iter()
    .map(cell)
    .collect::<Vec<_>>()
    .join(",")
}

/// Writes the header and every row; returns the collected cell failures.
pub fn write_csv<W: Write>(out: &mut W, rows: &[RowOutcome]) -> Result<Vec<String>, CliError> {
    writeln!(out, "{CSV_HEADER}")?;
    let mut errors = Vec::new();
    for r in rows {
        writeln!(out, "{}", format_row(&r.row))?;
        errors.extend(r.errors.iter().cloned());
    }
    out.flush()?;
    Ok(errors)
}

/// Turns collected cell failures into the numeric-failure exit.
pub fn check_errors(errors: Vec<String>) -> Result<(), CliError> {
    if errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numeric(format!("{} evaluation(s) failed:\n  {}", errors.len(), errors.join("\n  "))))
    }
}
