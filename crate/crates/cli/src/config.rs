//! Flat `key = value` scenario files.
//!
//! Every key is optional; missing keys keep the baseline scenario. Lines
//! starting with `#` and text after a `#` are comments.
//!
//! ```text
//! k = 2
//! snr_db = 30
//! mu = adaptive        # or a number in (0, 1)
//! epsilon = 0.1
//! interference_policy = proportional
//! nu_db = -15
//! ```

use std::collections::HashSet;
use std::path::Path;

use ostn_core::{InterferencePolicy, NetworkConfig, PowerSplit, SRParams};

use crate::error::CliError;

/// Recognized keys, in documentation order.
pub const KEYS: &[&str] = &[
    "k",
    "m1",
    "m2",
    "m_ac",
    "b_ac",
    "omega_ac",
    "m_s",
    "b_s",
    "omega_s",
    "omega_t",
    "omega_cb",
    "omega_cd",
    "snr_db",
    "mu",
    "epsilon",
    "r_p",
    "r_s",
    "gamma_p",
    "gamma_s",
    "interference_policy",
    "eta_s_db",
    "eta_t_db",
    "nu_db",
];

pub fn parse_config(path: &Path) -> Result<NetworkConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<NetworkConfig, CliError> {
    let mut cfg = NetworkConfig::baseline();
    let mut seen = HashSet::new();

    let mut sr_main = (cfg.sr_main.m, cfg.sr_main.b, cfg.sr_main.omega);
    let mut sr_int = (cfg.interferers.sr.m, cfg.interferers.sr.b, cfg.interferers.sr.omega);
    let mut mu: Option<String> = None;
    let mut epsilon = 0.1;
    let mut policy = "fixed".to_string();
    let (mut eta_s_db, mut eta_t_db, mut nu_db) = (20.0, 20.0, -15.0);

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let parse_err = |msg: String| CliError::Parse(format!("line {lineno}: {msg}"));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(parse_err(format!("unknown key `{key}`")));
        }
        if !seen.insert(key.to_string()) {
            return Err(parse_err(format!("duplicate key `{key}`")));
        }
        let real = || -> Result<f64, CliError> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(format!("`{key}` expects a number, got `{value}`")))
        };
        let count = || -> Result<usize, CliError> {
            value
                .parse::<usize>()
                .map_err(|_| parse_err(format!("`{key}` expects a nonnegative integer, got `{value}`")))
        };
        match key {
            "k" => cfg.k = count()?,
            "m1" => cfg.interferers.m1 = count()?,
            "m2" => cfg.interferers.m2 = count()?,
            "m_ac" => sr_main.0 = count()?,
            "b_ac" => sr_main.1 = real()?,
            "omega_ac" => sr_main.2 = real()?,
            "m_s" => sr_int.0 = count()?,
            "b_s" => sr_int.1 = real()?,
            "omega_s" => sr_int.2 = real()?,
            "omega_t" => cfg.interferers.omega_t = real()?,
            "omega_cb" => cfg.omega_cb = real()?,
            "omega_cd" => cfg.omega_cd = real()?,
            "snr_db" => cfg.eta_db = real()?,
            "mu" => mu = Some(value.to_string()),
            "epsilon" => epsilon = real()?,
            "r_p" => cfg.r_p = real()?,
            "r_s" => cfg.r_s = real()?,
            "gamma_p" => cfg.r_p = rate_from_threshold(real()?).ok_or_else(|| parse_err("γ_p must be ≥ 0".into()))?,
            "gamma_s" => cfg.r_s = rate_from_threshold(real()?).ok_or_else(|| parse_err("γ_s must be ≥ 0".into()))?,
            "interference_policy" => policy = value.to_ascii_lowercase(),
            "eta_s_db" => eta_s_db = real()?,
            "eta_t_db" => eta_t_db = real()?,
            "nu_db" => nu_db = real()?,
            _ => unreachable!("key list and match arms agree"),
        }
    }

    for (a, b) in [("r_p", "gamma_p"), ("r_s", "gamma_s")] {
        if seen.contains(a) && seen.contains(b) {
            return Err(CliError::Invalid(format!("`{a}` and `{b}` set the same threshold; give one")));
        }
    }
    let invalid = |e: ostn_core::Error| CliError::Invalid(e.to_string());
    cfg.sr_main = SRParams::new(sr_main.0, sr_main.1, sr_main.2).map_err(invalid)?;
    cfg.interferers.sr = SRParams::new(sr_int.0, sr_int.1, sr_int.2).map_err(invalid)?;
    cfg.policy = match policy.as_str() {
        "fixed" => InterferencePolicy::Fixed { eta_s_db, eta_t_db },
        "proportional" => InterferencePolicy::Proportional { nu_db },
        other => {
            return Err(CliError::Invalid(format!(
                "interference_policy must be `fixed` or `proportional`, got `{other}`"
            )))
        }
    };
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(CliError::Invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    cfg.power_split = match mu.as_deref() {
        None => cfg.power_split,
        Some("adaptive") => PowerSplit::Adaptive { epsilon },
        Some(v) => PowerSplit::Fixed(
            v.parse::<f64>()
                .map_err(|_| CliError::Parse(format!("`mu` expects a number or `adaptive`, got `{v}`")))?,
        ),
    };
    cfg.validate().map_err(invalid)?;
    Ok(cfg)
}

/// R with 2^{2R} − 1 = γ.
pub fn rate_from_threshold(gamma: f64) -> Option<f64> {
    (gamma >= 0.0).then(|| (1.0 + gamma).log2() / 2.0)
}
