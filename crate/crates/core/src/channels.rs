//! Fading models and samplers: shadowed-Rician satellite links, Rayleigh
//! terrestrial links, and the aggregate interference W_c = W_s + W_t.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::specfun::{beta_fn, factorial, gamma_fn, kummer_1f1, lower_inc_gamma, lower_inc_gamma_reg, pochhammer};

/// Shadowed-Rician fading with integer severity.
///
/// The squared envelope has density α Σ_{κ<m} ζ(κ) x^κ e^{−(β−δ)x}.
#[derive(Debug, Clone, PartialEq)]
pub struct SRParams {
    pub m: usize,
    /// Half the multipath power.
    pub b: f64,
    /// Line-of-sight power.
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub zeta: Vec<f64>,
}

/// Builds [`SRParams`] from (m, b, Ω).
pub fn sr_coeffs(m: usize, b: f64, omega: f64) -> Result<SRParams> {
    SRParams::new(m, b, omega)
}

impl SRParams {
    pub fn new(m: usize, b: f64, omega: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("shadowed-Rician severity m must be at least 1"));
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::domain(format!("shadowed-Rician b must be positive, got {b}")));
        }
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::domain(format!("shadowed-Rician Ω must be nonnegative, got {omega}")));
        }
        let mf = m as f64;
        let alpha = (2.0 * b * mf / (2.0 * b * mf + omega)).powf(mf) / (2.0 * b);
        let beta = 1.0 / (2.0 * b);
        let delta = omega / (2.0 * b * (2.0 * b * mf + omega));
        let zeta = (0..m)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let f = factorial(k);
                sign * pochhammer(1.0 - mf, k) * delta.powi(k as i32) / (f * f)
            })
            .collect();
        Ok(SRParams {
            m,
            b,
            omega,
            alpha,
            beta,
            delta,
            zeta,
        })
    }

    /// Exponential rate β − δ of every density term.
    pub fn theta(&self) -> f64 {
        self.beta - self.delta
    }

    pub fn mean(&self) -> f64 {
        2.0 * self.b + self.omega
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut xp = 1.0;
        for z in &self.zeta {
            acc += z * xp;
            xp *= x;
        }
        self.alpha * acc * (-self.theta() * x).exp()
    }

    /// CDF by term-wise integration: α Σ ζ(κ) Υ(κ+1, θx)/θ^{κ+1}.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let th = self.theta();
        let mut acc = 0.0;
        for (k, z) in self.zeta.iter().enumerate() {
            let kp = k as f64 + 1.0;
            acc += z * lower_inc_gamma(kp, th * x).expect("valid incomplete gamma arguments") / th.powf(kp);
        }
        (self.alpha * acc).clamp(0.0, 1.0)
    }

    /// Draws |A e^{jφ} + Z|² with A² ~ Gamma(m, Ω/m), Z ~ CN(0, 2b), φ uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = if self.omega > 0.0 {
            let g = Gamma::new(self.m as f64, self.omega / self.m as f64).expect("valid gamma parameters");
            g.sample(rng).sqrt()
        } else {
            0.0
        };
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let sd = self.b.sqrt();
        let zr: f64 = rng.sample(StandardNormal);
        let zi: f64 = rng.sample(StandardNormal);
        let re = a * phi.cos() + sd * zr;
        let im = a * phi.sin() + sd * zi;
        re * re + im * im
    }
}

/// Rayleigh fading; the channel power is exponential with mean Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighParams {
    pub omega: f64,
}

impl RayleighParams {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::domain(format!("Rayleigh average power must be positive, got {omega}")));
        }
        Ok(RayleighParams { omega })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            (-x / self.omega).exp() / self.omega
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-x / self.omega).exp_m1()
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // 1 − U lies in (0, 1]
        -self.omega * (1.0 - rng.random::<f64>()).ln()
    }
}

pub fn rayleigh_power_pdf(x: f64, p: &RayleighParams) -> f64 {
    p.pdf(x)
}

pub fn rayleigh_power_sample<R: Rng + ?Sized>(rng: &mut R, p: &RayleighParams) -> f64 {
    p.sample(rng)
}

/// Interferer population seen by the IoT nodes.
///
/// `eta_s` and `eta_t` are linear interference-to-noise ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceConfig {
    pub m1: usize,
    pub m2: usize,
    pub sr: SRParams,
    pub omega_t: f64,
    pub eta_s: f64,
    pub eta_t: f64,
}

impl InterferenceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega_t", self.omega_t), ("eta_s", self.eta_s), ("eta_t", self.eta_t)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn require_analytic(&self) -> Result<()> {
        self.validate()?;
        if self.m1 == 0 || self.m2 == 0 {
            return Err(Error::config(format!(
                "analytical interference densities need M1, M2 >= 1 (got M1={}, M2={})",
                self.m1, self.m2
            )));
        }
        Ok(())
    }

    /// 1/(Ω_t η_t), the rate of each terrestrial interference term.
    pub fn p_t(&self) -> f64 {
        1.0 / (self.omega_t * self.eta_t)
    }

    /// (β_s − δ_s)/η_s.
    pub fn theta_s_tilde(&self) -> f64 {
        self.sr.theta() / self.eta_s
    }

    /// (β_s − δ_s)/η_s − 1/(Ω_t η_t).
    pub fn theta_ss(&self) -> f64 {
        self.theta_s_tilde() - self.p_t()
    }

    pub fn mean_wc(&self) -> f64 {
        self.m1 as f64 * self.eta_s * self.sr.mean() + self.m2 as f64 * self.eta_t * self.omega_t
    }

    /// Density of W_s = η_s Σ_{j≤M1} |h_sj|².
    pub fn ws_pdf(&self, x: f64) -> Result<f64> {
        self.require_analytic()?;
        if x < 0.0 {
            return Ok(0.0);
        }
        let rate = self.theta_s_tilde();
        let mut acc = 0.0;
        for t in ws_terms(self)? {
            acc += t.xi / self.eta_s.powi(t.lambda as i32) * x.powi(t.lambda as i32 - 1);
        }
        Ok(acc * (-rate * x).exp())
    }

    pub fn ws_cdf(&self, x: f64) -> Result<f64> {
        self.require_analytic()?;
        if x <= 0.0 {
            return Ok(0.0);
        }
        let rate = self.theta_s_tilde();
        let mut acc = 0.0;
        for t in ws_terms(self)? {
            let l = t.lambda as f64;
            acc += t.xi / (self.eta_s * rate).powi(t.lambda as i32) * lower_inc_gamma(l, rate * x)?;
        }
        Ok(acc.clamp(0.0, 1.0))
    }

    /// Gamma(M2, Ω_t η_t) density of W_t.
    pub fn wt_pdf(&self, x: f64) -> Result<f64> {
        self.require_analytic()?;
        if x < 0.0 {
            return Ok(0.0);
        }
        let p = self.p_t();
        let m2 = self.m2 as i32;
        Ok(p.powi(m2) * x.powi(m2 - 1) * (-p * x).exp() / gamma_fn(self.m2 as f64)?)
    }

    pub fn wt_cdf(&self, x: f64) -> Result<f64> {
        self.require_analytic()?;
        if x <= 0.0 {
            return Ok(0.0);
        }
        lower_inc_gamma_reg(self.m2 as f64, x * self.p_t())
    }

    /// Density of W_c = W_s + W_t; builds the term table on every call, see
    /// [`WcDensity`] for repeated evaluation.
    pub fn wc_pdf(&self, w: f64) -> Result<f64> {
        WcDensity::new(self)?.pdf(w)
    }

    /// η_s Σ|h_s|²; zero when M1 = 0.
    pub fn ws_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        (0..self.m1).map(|_| self.eta_s * self.sr.sample(rng)).sum()
    }

    /// η_t Σ|h_t|²; zero when M2 = 0.
    pub fn wt_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let ray = RayleighParams { omega: self.omega_t };
        (0..self.m2).map(|_| self.eta_t * ray.sample(rng)).sum()
    }

    pub fn wc_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let s = self.ws_sample(rng);
        s + self.wt_sample(rng)
    }
}

/// One multi-index term of the W_s density, Ξ x^{Λ−1} e^{−θx/η_s}/η_s^Λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsTerm {
    pub lambda: usize,
    pub xi: f64,
}

/// Ξ(M1) and Λ for every multi-index i ∈ [0, m_s−1]^{M1}, merged by Λ.
pub fn ws_terms(cfg: &InterferenceConfig) -> Result<Vec<WsTerm>> {
    let m = cfg.sr.m;
    let m1 = cfg.m1;
    let mut by_lambda = vec![0.0; m1 * m + 1];
    let mut idx = vec![0usize; m1];
    loop {
        let lambda = idx.iter().sum::<usize>() + m1;
        let mut xi = cfg.sr.alpha.powi(m1 as i32);
        for &i in &idx {
            xi *= cfg.sr.zeta[i];
        }
        let mut partial = 0;
        for j in 1..m1 {
            partial += idx[j - 1];
            xi *= beta_fn((partial + j) as f64, (idx[j] + 1) as f64)?;
        }
        by_lambda[lambda] += xi;
        // odometer increment
        let mut k = 0;
        while k < m1 {
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == m1 {
            break;
        }
    }
    Ok(by_lambda
        .into_iter()
        .enumerate()
        .filter(|(_, xi)| *xi != 0.0)
        .map(|(lambda, xi)| WsTerm { lambda, xi })
        .collect())
}

/// Cached term table of the W_c density.
///
/// f(w) = Σ_Λ c_Λ w^{Λ+M2−1} e^{−p_t w} ₁F₁(Λ; M2+Λ; −Θ_ss w) with
/// c_Λ = Ξ/η_s^Λ · p_t^{M2} · B(M2, Λ)/Γ(M2).
#[derive(Debug, Clone, PartialEq)]
pub struct WcDensity {
    pub m2: usize,
    pub p_t: f64,
    pub theta_ss: f64,
    pub theta_s_tilde: f64,
    /// (Λ, c_Λ) pairs.
    pub terms: Vec<(usize, f64)>,
}

impl WcDensity {
    pub fn new(cfg: &InterferenceConfig) -> Result<Self> {
        cfg.require_analytic()?;
        let p_t = cfg.p_t();
        let m2 = cfg.m2 as f64;
        let g_m2 = gamma_fn(m2)?;
        let terms = ws_terms(cfg)?
            .into_iter()
            .map(|t| {
                let l = t.lambda as f64;
                let c = t.xi / cfg.eta_s.powi(t.lambda as i32) * p_t.powf(m2) * beta_fn(m2, l)? / g_m2;
                Ok((t.lambda, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WcDensity {
            m2: cfg.m2,
            p_t,
            theta_ss: cfg.theta_ss(),
            theta_s_tilde: cfg.theta_s_tilde(),
            terms,
        })
    }

    pub fn pdf(&self, w: f64) -> Result<f64> {
        if w < 0.0 {
            return Ok(0.0);
        }
        let mut acc = 0.0;
        for &(lambda, c) in &self.terms {
            let l = lambda as f64;
            let m2 = self.m2 as f64;
            acc += c * w.powf(l + m2 - 1.0) * kummer_1f1(l, m2 + l, -self.theta_ss * w)?;
        }
        Ok(acc * (-self.p_t * w).exp())
    }

    /// Slowest decay length of the density, a sensible scale for integration.
    pub fn scale(&self) -> f64 {
        1.0 / self.p_t.min(self.theta_s_tilde)
    }

    /// E[W_c^n] by quadrature.
    pub fn moment(&self, n: u32) -> Result<f64> {
        self.expect(|w| w.powi(n as i32))
    }

    /// E[g(W_c)] by adaptive quadrature on [0, ∞).
    pub fn expect<G: FnMut(f64) -> f64>(&self, mut g: G) -> Result<f64> {
        let mut failure = None;
        let res = integrate_to_infinity(
            |w| match self.pdf(w) {
                Ok(f) => f * g(w),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            self.scale(),
            QuadOptions::new(1e-13, 1e-11),
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(res.value),
        }
    }

    /// ∫₀ˣ f(w) dw.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let res = integrate(|w| self.pdf(w).unwrap_or(f64::NAN), 0.0, x, QuadOptions::new(1e-13, 1e-11))?;
        if res.value.is_nan() {
            return Err(Error::numeric("wc_cdf", "density evaluation failed", None));
        }
        Ok(res.value.clamp(0.0, 1.0))
    }
}
