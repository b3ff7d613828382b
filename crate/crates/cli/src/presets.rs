//! Figure presets: the scenario matrix behind the satellite (fig1) and IoT
//! (fig2) outage-versus-SNR plots.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ostn_core::{InterferencePolicy, NetworkConfig, PowerSplit};

use crate::config::rate_from_threshold;
use crate::error::CliError;
use crate::sweep::{run_sweep, write_csv, Networks, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
        }
    }

    fn networks(self) -> Networks {
        match self {
            Figure::Fig1 => Networks { sat: true, iot: false },
            Figure::Fig2 => Networks { sat: false, iot: true },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub file: String,
    pub cfg: NetworkConfig,
    pub label: String,
}

const FIXED_MU: f64 = 0.75;
const EPSILON: f64 = 0.1;

/// K ∈ {1, 2} × μ ∈ {0.75, adaptive} × {fixed, proportional} interference,
/// and for fig2 additionally γ_s ∈ {1, 0.3}.
pub fn scenarios(fig: Figure, base: &NetworkConfig) -> Vec<Scenario> {
    let gammas: &[Option<f64>] = match fig {
        Figure::Fig1 => &[None],
        Figure::Fig2 => &[Some(1.0), Some(0.3)],
    };
    let mut out = Vec::new();
    for &gs in gammas {
        for k in [1, 2] {
            for adaptive in [false, true] {
                for proportional in [false, true] {
                    let mut cfg = base.with_k(k);
                    cfg.power_split = if adaptive {
                        PowerSplit::Adaptive { epsilon: EPSILON }
                    } else {
                        PowerSplit::Fixed(FIXED_MU)
                    };
                    cfg.policy = if proportional {
                        InterferencePolicy::Proportional { nu_db: -15.0 }
                    } else {
                        InterferencePolicy::Fixed {
                            eta_s_db: 20.0,
                            eta_t_db: 20.0,
                        }
                    };
                    if let Some(g) = gs {
                        cfg.r_s = rate_from_threshold(g).expect("positive threshold");
                    }
                    let mu = if adaptive { "adaptive".to_string() } else { format!("mu{FIXED_MU}") };
                    let policy = if proportional { "proportional" } else { "fixed" };
                    let mut file = format!("{}_k{k}_{mu}_{policy}", fig.name());
                    let mut label = format!("K={k} {mu} {policy}");
                    if let Some(g) = gs {
                        file.push_str(&format!("_gs{g}"));
                        label.push_str(&format!(" gamma_s={g}"));
                    }
                    file.push_str(".csv");
                    out.push(Scenario { file, cfg, label });
                }
            }
        }
    }
    out
}

/// Writes one CSV per scenario plus `<fig>_index.dat`, a whitespace table
/// (`# index file K mu policy gamma_s`) that gnuplot can read directly.
///
/// Failed cells are written as `NA`; their messages are returned.
pub fn run_figure(fig: Figure, base: &NetworkConfig, spec: &SweepSpec, out_dir: &Path) -> Result<(Vec<PathBuf>, Vec<String>), CliError> {
    std::fs::create_dir_all(out_dir)?;
    let spec = SweepSpec {
        networks: fig.networks(),
        ..spec.clone()
    };
    let list = scenarios(fig, base);
    let mut written = Vec::new();
    let mut errors = Vec::new();
    let index_path = out_dir.join(format!("{}_index.dat", fig.name()));
    let mut index = BufWriter::new(File::create(&index_path)?);
    writeln!(index, "# index file K mu policy gamma_s")?;
    for (i, s) in list.iter().enumerate() {
        let rows = run_sweep(&s.cfg, &spec)?;
        let path = out_dir.join(&s.file);
        let mut w = BufWriter::new(File::create(&path)?);
        errors.extend(write_csv(&mut w, &rows)?);
        let mu = match s.cfg.power_split {
            PowerSplit::Fixed(mu) => format!("{mu}"),
            PowerSplit::Adaptive { .. } => "adaptive".into(),
        };
        let policy = match s.cfg.policy {
            InterferencePolicy::Fixed { .. } => "fixed",
            InterferencePolicy::Proportional { .. } => "proportional",
        };
        writeln!(index, "{i} {} {} {mu} {policy} {:.6}", s.file, s.cfg.k, s.cfg.gamma_s())?;
        written.push(path);
    }
    index.flush()?;
    written.push(index_path);
    Ok((written, errors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_counts() {
        let base = NetworkConfig::baseline();
        let f1 = scenarios(Figure::Fig1, &base);
        let f2 = scenarios(Figure::Fig2, &base);
        assert_eq!(f1.len(), 8);
        assert_eq!(f2.len(), 16);
        let mut names: Vec<_> = f2.iter().map(|s| s.file.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 16);
        assert!(f2.iter().filter(|s| (s.cfg.gamma_s() - 0.3).abs() < 1e-12).count() == 8);
    }
}
