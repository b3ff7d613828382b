//! Driver for outage sweeps, figure presets and the power-split solver.

pub mod config;
pub mod error;
pub mod presets;
pub mod sweep;

pub use config::{parse_config, parse_config_str};
pub use error::CliError;
pub use sweep::{run_sweep, write_csv, SweepSpec, CSV_HEADER};
