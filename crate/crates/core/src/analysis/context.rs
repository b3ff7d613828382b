use crate::channels::WcDensity;
use crate::error::{Error, Result};
use crate::specfun::{factorial, MbOptions};
use crate::system::NetworkConfig;

/// Numerical settings of the closed-form evaluators.
#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    /// Contour-quadrature settings for every Meijer-G evaluation.
    pub mb: MbOptions,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            mb: MbOptions {
                tol: 1e-10,
                ..MbOptions::default()
            },
        }
    }
}

/// Derived symbols shared by the closed-form outage expressions.
#[derive(Debug, Clone)]
pub struct ClosedFormContext {
    pub k: usize,
    pub eta: f64,
    pub mu: f64,
    /// μ/(1−μ), the supremum of the relayed satellite SINR.
    pub mu_prime: f64,
    pub gamma_p: f64,
    pub gamma_s: f64,
    /// γ_p/(μ − (1−μ)γ_p); `None` when γ_p ≥ μ′.
    pub gamma_p_tilde: Option<f64>,
    /// μ′γ_s − 1.
    pub gamma_s_tilde: f64,
    pub m_ac: usize,
    pub alpha_c: f64,
    pub zeta_c: Vec<f64>,
    /// (β_c − δ_c)/η.
    pub theta_ca: f64,
    /// 1/(Ω_cb η), rate of the relay-to-satellite hop.
    pub rate_cb: f64,
    /// Θ_ca/rate_cb = (β_c − δ_c) Ω_cb.
    pub r_ratio: f64,
    pub omega_cb: f64,
    pub omega_cd: f64,
    /// γ_s/(Ω_cd η (1−μ)).
    pub c_d: f64,
    pub chi_ct: f64,
    pub chi_cs: f64,
    /// 𝒜_m, m = 0..m_ac−1.
    pub a_m: Vec<f64>,
    pub m2: usize,
    pub wc: WcDensity,
    pub opts: AnalysisOptions,
}

impl ClosedFormContext {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        Self::with_options(cfg, AnalysisOptions::default())
    }

    pub fn with_options(cfg: &NetworkConfig, opts: AnalysisOptions) -> Result<Self> {
        cfg.validate()?;
        let mu = cfg.mu()?;
        let interference = cfg.interference();
        let wc = WcDensity::new(&interference)?;
        let eta = cfg.eta();
        let mu_prime = mu / (1.0 - mu);
        let gamma_p = cfg.gamma_p();
        let gamma_s = cfg.gamma_s();
        let gamma_p_tilde = (gamma_p < mu_prime).then(|| gamma_p / (mu - (1.0 - mu) * gamma_p));
        let sr = &cfg.sr_main;
        let theta_ca = sr.theta() / eta;
        let rate_cb = 1.0 / (cfg.omega_cb * eta);
        let c_d = gamma_s / (cfg.omega_cd * eta * (1.0 - mu));
        let a_m = (0..sr.m)
            .map(|m| {
                (m..sr.m)
                    .map(|l| {
                        sr.zeta[l] / eta.powi(l as i32 + 1) * factorial(l) / factorial(m)
                            * theta_ca.powi(-((l + 1 - m) as i32))
                    })
                    .sum()
            })
            .collect();
        Ok(ClosedFormContext {
            k: cfg.k,
            eta,
            mu,
            mu_prime,
            gamma_p,
            gamma_s,
            gamma_p_tilde,
            gamma_s_tilde: mu_prime * gamma_s - 1.0,
            m_ac: sr.m,
            alpha_c: sr.alpha,
            zeta_c: sr.zeta.clone(),
            theta_ca,
            rate_cb,
            r_ratio: theta_ca / rate_cb,
            omega_cb: cfg.omega_cb,
            omega_cd: cfg.omega_cd,
            c_d,
            chi_ct: wc.p_t + c_d,
            chi_cs: wc.theta_s_tilde + c_d,
            a_m,
            m2: cfg.interferers.m2,
            wc,
            opts,
        })
    }

    /// Θ_ss; the Meijer-G forms need it positive.
    pub fn theta_ss(&self) -> f64 {
        self.wc.theta_ss
    }

    pub(crate) fn require_meijer_form(&self) -> Result<()> {
        let t = self.theta_ss();
        if !(t > 0.0) {
            return Err(Error::config(format!(
                "closed forms need (β_s−δ_s)/η_s > 1/(Ω_t η_t); got Θ_ss = {t}"
            )));
        }
        Ok(())
    }

    /// ϑ_n = nΘ_ca w + (n+1)/(Ω_cb η).
    pub fn vartheta(&self, n: usize, w: f64) -> f64 {
        n as f64 * self.theta_ca * w + (n + 1) as f64 * self.rate_cb
    }

    /// ω_n = (n+1)(Θ_ca w + 1/(Ω_cb η)).
    pub fn omega_n(&self, n: usize, w: f64) -> f64 {
        (n + 1) as f64 * (self.theta_ca * w + self.rate_cb)
    }

    /// 1 − F_{Λ̂_ac}(x | w) = α Σ_m 𝒜_m (xw)^m e^{−Θ_ca x w}.
    pub fn tail_ac(&self, x: f64, w: f64) -> f64 {
        let y = x * w;
        let mut acc = 0.0;
        let mut yp = 1.0;
        for a in &self.a_m {
            acc += a * yp;
            yp *= y;
        }
        self.alpha_c * acc * (-self.theta_ca * y).exp()
    }
}
