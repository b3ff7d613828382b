use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ostn_cli::presets::{run_figure, Figure};
use ostn_cli::sweep::{check_errors, run_sweep, write_csv, MuSolver, SweepSpec, Which};
use ostn_cli::{parse_config, CliError};
use ostn_core::adaptive::{solve_mu, MuStatus, SatEvaluator};
use ostn_core::system::SinrModel;
use ostn_core::{run_mc, McOptions, NetworkConfig, PowerSplit};

/// Outage probability of an overlay satellite-terrestrial IoT network.
#[derive(Parser, Debug)]
#[command(name = "ostn", version)]
struct Cli {
    /// Scenario file (`key = value` lines); defaults to the baseline scenario.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo trials per SNR point (1000000 for smooth curves).
    #[arg(long, global = true, default_value_t = 100_000)]
    trials: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "OSTN_THREADS")]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Accuracy target of the contour integrals.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One CSV row per SNR point.
    Sweep {
        #[command(flatten)]
        grid: Grid,
        /// Evaluators to run: any of mc, lb, asymp, sa.
        #[arg(long, default_value = "mc,lb,asymp,sa")]
        which: String,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Satellite outage curves for the eight preset scenarios.
    Fig1 {
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// IoT outage curves for the preset scenarios at γ_s = 1 and 0.3.
    Fig2 {
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Power split meeting a satellite outage target.
    SolveMu {
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<f64>,
        #[arg(long, value_enum, default_value_t = SolverArg::Lb)]
        evaluator: SolverArg,
    },
    /// Monte Carlo estimate at a single SNR.
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Args, Debug)]
struct Grid {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    start: f64,
    #[arg(long, default_value_t = 50.0, allow_hyphen_values = true)]
    stop: f64,
    #[arg(long, default_value_t = 5.0)]
    step: f64,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// SINR expressions used by the simulation.
    #[arg(long, value_enum, default_value_t = SinrArg::Exact)]
    sinr: SinrArg,
    /// Satellite outage model used to pick an adaptive μ.
    #[arg(long, value_enum, default_value_t = SolverArg::Lb)]
    mu_solver: SolverArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SinrArg {
    Exact,
    Bound,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SolverArg {
    /// Closed-form lower bound.
    Lb,
    /// Quadrature over the interference density.
    Sa,
    /// Exact-SINR simulation.
    Mc,
}

impl SolverArg {
    fn solver(self) -> MuSolver {
        match self {
            SolverArg::Lb => MuSolver::LowerBound,
            SolverArg::Sa => MuSolver::SemiAnalytic,
            SolverArg::Mc => MuSolver::MonteCarlo,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ostn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {t} worker threads: {e}")))?;
    }
    let cfg = match &cli.config {
        Some(p) => parse_config(p)?,
        None => NetworkConfig::baseline(),
    };
    let spec = |grid: &Grid, which: Which, model: &ModelArgs| SweepSpec {
        snr_start_db: grid.start,
        snr_stop_db: grid.stop,
        snr_step_db: grid.step,
        which,
        n_trials: cli.trials,
        seed: cli.seed,
        sinr_model: sinr_model(model.sinr),
        mu_solver: model.mu_solver.solver(),
        tol: cli.tol,
        ..SweepSpec::default()
    };

    match &cli.cmd {
        Command::Sweep { grid, which, model } => {
            let spec = spec(grid, Which::parse(which)?, model);
            let rows = run_sweep(&cfg, &spec)?;
            let errors = match &cli.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    let mut w = BufWriter::new(File::create(dir.join("sweep.csv"))?);
                    write_csv(&mut w, &rows)?
                }
                None => write_csv(&mut io::stdout().lock(), &rows)?,
            };
            check_errors(errors)
        }
        Command::Fig1 { grid, model } | Command::Fig2 { grid, model } => {
            let fig = if matches!(cli.cmd, Command::Fig1 { .. }) { Figure::Fig1 } else { Figure::Fig2 };
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let (files, errors) = run_figure(fig, &cfg, &spec(grid, Which::ALL, model), &dir)?;
            for f in files {
                println!("{}", f.display());
            }
            check_errors(errors)
        }
        Command::SolveMu {
            epsilon,
            snr_db,
            evaluator,
        } => {
            let epsilon = epsilon.unwrap_or(match cfg.power_split {
                PowerSplit::Adaptive { epsilon } => epsilon,
                PowerSplit::Fixed(_) => 0.1,
            });
            if !(epsilon > 0.0 && epsilon < 1.0) {
                return Err(CliError::Usage(format!("--epsilon must lie in (0, 1), got {epsilon}")));
            }
            let at = cfg.with_snr_db(snr_db.unwrap_or(cfg.eta_db));
            let ev = match evaluator {
                SolverArg::Lb => SatEvaluator::LowerBound,
                SolverArg::Sa => SatEvaluator::SemiAnalytic,
                SolverArg::Mc => SatEvaluator::MonteCarlo(McOptions::new(cli.trials, cli.seed)),
            };
            let sol = solve_mu(&at, epsilon, ev)?;
            let mut out = io::stdout().lock();
            writeln!(out, "snr_db = {}", at.eta_db)?;
            writeln!(out, "epsilon = {epsilon}")?;
            writeln!(out, "status = {:?}", sol.status)?;
            match sol.mu_star {
                Some(mu) => writeln!(out, "mu_star = {mu:.9}")?,
                None => writeln!(out, "mu_star = NA")?,
            }
            writeln!(out, "achieved_op_sat = {:.9e}", sol.achieved_op_sat)?;
            writeln!(out, "iterations = {}", sol.iterations)?;
            if sol.status == MuStatus::Infeasible {
                return Err(CliError::Infeasible(format!(
                    "satellite outage stays at {:.4} > {epsilon} even as μ → 1",
                    sol.achieved_op_sat
                )));
            }
            Ok(())
        }
        Command::Simulate { snr_db, model } => {
            let at = cfg.with_snr_db(snr_db.unwrap_or(cfg.eta_db));
            let mc = McOptions {
                model: sinr_model(model.sinr),
                ..McOptions::new(cli.trials, cli.seed)
            };
            if cli.trials < 1000 {
                return Err(CliError::Usage(format!("Monte Carlo needs at least 1000 trials, got {}", cli.trials)));
            }
            let at = match at.power_split {
                PowerSplit::Fixed(_) => at,
                PowerSplit::Adaptive { epsilon } => {
                    let ev = match model.mu_solver {
                        SolverArg::Lb => SatEvaluator::LowerBound,
                        SolverArg::Sa => SatEvaluator::SemiAnalytic,
                        SolverArg::Mc => SatEvaluator::MonteCarlo(mc),
                    };
                    match solve_mu(&at, epsilon, ev)?.mu_star {
                        Some(mu) => at.with_mu(mu),
                        None => return Err(CliError::Infeasible(format!("no μ meets ε = {epsilon}"))),
                    }
                }
            };
            let res = run_mc(&at, &mc)?;
            let mut out = io::stdout().lock();
            writeln!(out, "network,p_hat,std_err,n_trials,mu")?;
            let mu = at.mu()?;
            for (name, est) in [("satellite", res.sat), ("iot", res.iot)] {
                writeln!(out, "{name},{:.8e},{:.8e},{},{mu:.9}", est.p_hat, est.std_err, est.n_trials)?;
            }
            Ok(())
        }
    }
}

fn sinr_model(a: SinrArg) -> SinrModel {
    match a {
        SinrArg::Exact => SinrModel::Exact,
        SinrArg::Bound => SinrModel::Bound,
    }
}
