//! Outage-probability analysis of an overlay satellite-terrestrial network in
//! which an opportunistically selected IoT transmitter relays a satellite
//! signal (amplify-and-forward) while sharing its power with its own traffic,
//! under combined extra-terrestrial and terrestrial interference.
//!
//! The crate provides four independent routes to the same outage numbers:
//!
//! * [`system::run_mc`]: Monte Carlo over the exact SINR model,
//! * [`analysis::op_sat_lb`] / [`analysis::op_iot_lb`]: closed-form lower
//!   bounds built from Meijer-G functions,
//! * [`analysis::semianalytic_op_sat`] / [`analysis::semianalytic_op_iot`]:
//!   one-dimensional quadrature over the interference density,
//! * [`analysis::op_sat_asymp`] / [`analysis::op_iot_asymp`]: high-SNR asymptotes.
//!
//! [`adaptive::solve_mu`] chooses the power-splitting factor that meets a
//! satellite outage target.

pub mod adaptive;
pub mod analysis;
pub mod channels;
mod error;
pub mod quad;
pub mod specfun;
pub mod system;

pub use adaptive::{feasible_mu_range, solve_mu, MuSolution, MuStatus, SatEvaluator};
pub use analysis::{
    diversity_fit, op_iot_asymp, op_iot_lb, op_sat_asymp, op_sat_lb, semianalytic_op_iot,
    semianalytic_op_sat, Asymptote, ClosedFormContext, IotTerms, SweepRow,
};
pub use channels::{InterferenceConfig, RayleighParams, SRParams};
pub use error::{Error, Result};
pub use system::{
    db_to_linear, run_mc, threshold_from_rate, InterferencePolicy, Interferers, McOptions,
    McResult, NetworkConfig, OutageEstimate, PowerSplit, TrialDraw,
};
