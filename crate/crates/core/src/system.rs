//! Scenario description, exact SINR model and the Monte Carlo outage engine.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{InterferenceConfig, RayleighParams, SRParams};
use crate::error::{Error, Result};

/// 10^{dB/10}.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// SINR threshold 2^{2R} − 1 of a half-duplex two-phase link at rate R.
pub fn threshold_from_rate(r: f64) -> f64 {
    (2.0 * r).exp2() - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerSplit {
    Fixed(f64),
    /// μ chosen per SNR so that the satellite outage equals `epsilon`.
    Adaptive { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterferencePolicy {
    /// Interference-to-noise ratios fixed in dB.
    Fixed { eta_s_db: f64, eta_t_db: f64 },
    /// η_s = η_t = ν·η, so interference grows with the transmit SNR.
    Proportional { nu_db: f64 },
}

/// Interferer population independent of the power policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferers {
    pub m1: usize,
    pub m2: usize,
    pub sr: SRParams,
    pub omega_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Number of IoT transmitter/receiver pairs.
    pub k: usize,
    pub interferers: Interferers,
    /// Satellite to IoT transmitter links.
    pub sr_main: SRParams,
    pub omega_cb: f64,
    pub omega_cd: f64,
    /// Common transmit SNR of the satellite and the IoT transmitters.
    pub eta_db: f64,
    pub power_split: PowerSplit,
    pub r_p: f64,
    pub r_s: f64,
    pub policy: InterferencePolicy,
}

impl NetworkConfig {
    /// Light-shadowed main links, two heavy-shadowed and two terrestrial
    /// interferers at 20 dB, μ = 0.75, R_p = R_s = 0.5, K = 1, 30 dB.
    pub fn baseline() -> Self {
        NetworkConfig {
            k: 1,
            interferers: Interferers {
                m1: 2,
                m2: 2,
                sr: SRParams::new(2, 0.063, 0.0005).expect("valid interferer shadowing"),
                omega_t: 0.2,
            },
            sr_main: SRParams::new(5, 0.251, 0.279).expect("valid main-link shadowing"),
            omega_cb: 1.0,
            omega_cd: 1.0,
            eta_db: 30.0,
            power_split: PowerSplit::Fixed(0.75),
            r_p: 0.5,
            r_s: 0.5,
            policy: InterferencePolicy::Fixed {
                eta_s_db: 20.0,
                eta_t_db: 20.0,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("K must be at least 1"));
        }
        if self.k >= 1 << 16 {
            return Err(Error::config("K must be below 65536"));
        }
        for (name, v) in [
            ("omega_cb", self.omega_cb),
            ("omega_cd", self.omega_cd),
            ("omega_t", self.interferers.omega_t),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.eta_db.is_finite() {
            return Err(Error::config("SNR must be finite"));
        }
        for (name, v) in [("r_p", self.r_p), ("r_s", self.r_s)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::config(format!("{name} must be nonnegative, got {v}")));
            }
        }
        match self.power_split {
            PowerSplit::Fixed(mu) if !(mu > 0.0 && mu < 1.0) => {
                return Err(Error::config(format!("power split μ must lie in (0, 1), got {mu}")));
            }
            PowerSplit::Adaptive { epsilon } if !(epsilon > 0.0 && epsilon <= 1.0) => {
                return Err(Error::config(format!("QoS target ε must lie in (0, 1], got {epsilon}")));
            }
            _ => {}
        }
        let finite = match self.policy {
            InterferencePolicy::Fixed { eta_s_db, eta_t_db } => eta_s_db.is_finite() && eta_t_db.is_finite(),
            InterferencePolicy::Proportional { nu_db } => nu_db.is_finite(),
        };
        if !finite {
            return Err(Error::config("interference levels must be finite"));
        }
        Ok(())
    }

    pub fn eta(&self) -> f64 {
        db_to_linear(self.eta_db)
    }

    pub fn gamma_p(&self) -> f64 {
        threshold_from_rate(self.r_p)
    }

    pub fn gamma_s(&self) -> f64 {
        threshold_from_rate(self.r_s)
    }

    /// The fixed power split; adaptive configurations must be resolved first.
    pub fn mu(&self) -> Result<f64> {
        match self.power_split {
            PowerSplit::Fixed(mu) => Ok(mu),
            PowerSplit::Adaptive { .. } => Err(Error::config(
                "adaptive power split must be resolved to a fixed μ before evaluation",
            )),
        }
    }

    /// Linear (η_s, η_t) under the interference policy at the current SNR.
    pub fn interference_levels(&self) -> (f64, f64) {
        match self.policy {
            InterferencePolicy::Fixed { eta_s_db, eta_t_db } => (db_to_linear(eta_s_db), db_to_linear(eta_t_db)),
            InterferencePolicy::Proportional { nu_db } => {
                let v = db_to_linear(nu_db) * self.eta();
                (v, v)
            }
        }
    }

    pub fn interference(&self) -> InterferenceConfig {
        let (eta_s, eta_t) = self.interference_levels();
        InterferenceConfig {
            m1: self.interferers.m1,
            m2: self.interferers.m2,
            sr: self.interferers.sr.clone(),
            omega_t: self.interferers.omega_t,
            eta_s,
            eta_t,
        }
    }

    pub fn with_snr_db(&self, eta_db: f64) -> Self {
        NetworkConfig { eta_db, ..self.clone() }
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        NetworkConfig {
            power_split: PowerSplit::Fixed(mu),
            ..self.clone()
        }
    }

    pub fn with_k(&self, k: usize) -> Self {
        NetworkConfig { k, ..self.clone() }
    }

    pub fn with_rates(&self, r_p: f64, r_s: f64) -> Self {
        NetworkConfig { r_p, r_s, ..self.clone() }
    }
}

/// End-to-end SINR at the satellite receiver through the selected relay.
///
/// `lam_ac` and `lam_cb` are η|h|² of the two hops; the first hop is
/// divided by `w_c + 1`.
pub fn sinr_primary(lam_ac: f64, lam_cb: f64, w_c: f64, mu: f64) -> f64 {
    let x = lam_ac / (w_c + 1.0);
    let xy = x * lam_cb;
    mu * xy / ((1.0 - mu) * xy + x + lam_cb + 1.0)
}

/// SINR of the IoT signal at its receiver after removing the relayed
/// satellite component.
pub fn sinr_iot(lam_ac: f64, lam_cd: f64, w_c: f64, mu: f64) -> f64 {
    let x = lam_ac / (w_c + 1.0);
    let z = lam_cd / (w_c + 1.0);
    (1.0 - mu) * z * (x + 1.0) / (mu * z + x + 1.0)
}

/// One channel realization for all K pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialDraw {
    pub lambda_ac: Vec<f64>,
    pub lambda_cb: Vec<f64>,
    pub lambda_cd: Vec<f64>,
    pub w_c: f64,
}

/// 0-based index of the pair with the best satellite SINR; ties go to the
/// lowest index.
pub fn select_best_pair(draw: &TrialDraw, mu: f64) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for k in 0..draw.lambda_ac.len() {
        let v = sinr_primary(draw.lambda_ac[k], draw.lambda_cb[k], draw.w_c, mu);
        if v > best_v {
            best_v = v;
            best = k;
        }
    }
    best
}

/// Which SINR expressions the simulation counts outages with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SinrModel {
    /// The exact SINRs with W_c + 1 in the denominators.
    #[default]
    Exact,
    /// The min-form bounds with W_c in place of W_c + 1; its outage
    /// probabilities equal the closed-form lower bounds.
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub n_trials: u64,
    pub seed: u64,
    pub chunk_size: u64,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    pub model: SinrModel,
}

impl McOptions {
    pub fn new(n_trials: u64, seed: u64) -> Self {
        McOptions {
            n_trials,
            seed,
            ..Default::default()
        }
    }
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            n_trials: 100_000,
            seed: 1,
            chunk_size: 1 << 16,
            threads: None,
            model: SinrModel::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub n_trials: u64,
}

impl OutageEstimate {
    pub fn from_counts(outages: u64, n_trials: u64) -> Self {
        let p = outages as f64 / n_trials as f64;
        OutageEstimate {
            p_hat: p,
            std_err: (p * (1.0 - p) / n_trials as f64).sqrt(),
            n_trials,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub sat: OutageEstimate,
    pub iot: OutageEstimate,
}

/// Per-chunk random streams.
///
/// W_c uses stream `chunk << 16` and pair k uses `(chunk << 16) | (k + 1)`,
/// so runs with different K or SNR share their common draws.
struct ChunkStreams {
    wc: ChaCha8Rng,
    pairs: Vec<ChaCha8Rng>,
}

impl ChunkStreams {
    fn new(seed: u64, chunk: u64, k: usize) -> Self {
        let base = ChaCha8Rng::seed_from_u64(seed);
        let stream = |id: u64| {
            let mut r = base.clone();
            r.set_stream(id);
            r
        };
        ChunkStreams {
            wc: stream(chunk << 16),
            pairs: (0..k).map(|i| stream((chunk << 16) | (i as u64 + 1))).collect(),
        }
    }

    fn draw(&mut self, cfg: &ResolvedModel, out: &mut TrialDraw) {
        out.w_c = cfg.interference.wc_sample(&mut self.wc);
        for (k, rng) in self.pairs.iter_mut().enumerate() {
            out.lambda_ac[k] = cfg.eta * cfg.sr_main.sample(rng);
            out.lambda_cb[k] = cfg.eta * cfg.cb.sample(rng);
            out.lambda_cd[k] = cfg.eta * cfg.cd.sample(rng);
        }
    }
}

struct ResolvedModel {
    interference: InterferenceConfig,
    sr_main: SRParams,
    cb: RayleighParams,
    cd: RayleighParams,
    eta: f64,
    k: usize,
}

impl ResolvedModel {
    fn new(cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate()?;
        let interference = cfg.interference();
        interference.validate()?;
        Ok(ResolvedModel {
            interference,
            sr_main: cfg.sr_main.clone(),
            cb: RayleighParams::new(cfg.omega_cb)?,
            cd: RayleighParams::new(cfg.omega_cd)?,
            eta: cfg.eta(),
            k: cfg.k,
        })
    }

    fn empty_draw(&self) -> TrialDraw {
        TrialDraw {
            lambda_ac: vec![0.0; self.k],
            lambda_cb: vec![0.0; self.k],
            lambda_cd: vec![0.0; self.k],
            w_c: 0.0,
        }
    }
}

/// The first `n` trial draws of `run_mc` with the same seed, in order.
pub fn trial_draws(cfg: &NetworkConfig, n: u64, seed: u64, chunk_size: u64) -> Result<Vec<TrialDraw>> {
    let model = ResolvedModel::new(cfg)?;
    let mut out = Vec::with_capacity(n as usize);
    let mut chunk = 0;
    while (out.len() as u64) < n {
        let mut streams = ChunkStreams::new(seed, chunk, model.k);
        let take = chunk_size.min(n - out.len() as u64);
        for _ in 0..take {
            let mut d = model.empty_draw();
            streams.draw(&model, &mut d);
            out.push(d);
        }
        chunk += 1;
    }
    Ok(out)
}

/// Monte Carlo outage probabilities of both networks.
///
/// Each trial draws W_c and all K pairs, selects the pair with the best
/// satellite SINR, and records a satellite outage when that SINR is below
/// γ_p and an IoT outage when the selected pair's IoT SINR is below γ_s.
/// Results depend only on (configuration, seed, n_trials, chunk_size).
pub fn run_mc(cfg: &NetworkConfig, opts: &McOptions) -> Result<McResult> {
    if opts.n_trials == 0 {
        return Err(Error::config("Monte Carlo needs at least one trial"));
    }
    if opts.chunk_size == 0 {
        return Err(Error::config("chunk size must be positive"));
    }
    let mu = cfg.mu()?;
    let model = ResolvedModel::new(cfg)?;
    let gamma_p = cfg.gamma_p();
    let gamma_s = cfg.gamma_s();
    let n_chunks = opts.n_trials.div_ceil(opts.chunk_size);

    let run_chunk = |chunk: u64| -> (u64, u64) {
        let mut streams = ChunkStreams::new(opts.seed, chunk, model.k);
        let start = chunk * opts.chunk_size;
        let len = opts.chunk_size.min(opts.n_trials - start);
        let mut draw = model.empty_draw();
        let mut sat = 0;
        let mut iot = 0;
        for _ in 0..len {
            streams.draw(&model, &mut draw);
            let (s, i) = match opts.model {
                SinrModel::Exact => exact_outage(&draw, mu, gamma_p, gamma_s),
                SinrModel::Bound => bound_outage(&draw, mu, gamma_p, gamma_s),
            };
            sat += s as u64;
            iot += i as u64;
        }
        (sat, iot)
    };

    let reduce = || {
        (0..n_chunks)
            .into_par_iter()
            .map(run_chunk)
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    };
    let (sat, iot) = match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::config(format!("cannot build worker pool: {e}")))?
            .install(reduce),
        None => reduce(),
    };
    Ok(McResult {
        sat: OutageEstimate::from_counts(sat, opts.n_trials),
        iot: OutageEstimate::from_counts(iot, opts.n_trials),
    })
}

fn exact_outage(d: &TrialDraw, mu: f64, gamma_p: f64, gamma_s: f64) -> (bool, bool) {
    let k = select_best_pair(d, mu);
    let sat = sinr_primary(d.lambda_ac[k], d.lambda_cb[k], d.w_c, mu) < gamma_p;
    let iot = sinr_iot(d.lambda_ac[k], d.lambda_cd[k], d.w_c, mu) < gamma_s;
    (sat, iot)
}

fn bound_outage(d: &TrialDraw, mu: f64, gamma_p: f64, gamma_s: f64) -> (bool, bool) {
    let mu_prime = mu / (1.0 - mu);
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for k in 0..d.lambda_ac.len() {
        let v = (d.lambda_ac[k] / d.w_c).min(d.lambda_cb[k]);
        if v > best_v {
            best_v = v;
            best = k;
        }
    }
    let sat = if gamma_p >= mu_prime {
        true
    } else {
        best_v < gamma_p / (mu - (1.0 - mu) * gamma_p)
    };
    let x = d.lambda_ac[best] / d.w_c;
    let z = d.lambda_cd[best] / d.w_c;
    let iot = (mu * z).min(x + 1.0) < mu_prime * gamma_s;
    (sat, iot)
}
