use super::{ln_binomial, ClosedFormContext};
use crate::error::Result;
use crate::specfun::{ln_gamma, meijer_g_1222_with, MeijerG1222Spec, NeumaierSum};

/// High-SNR approximation, unclamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote {
    pub value: f64,
    /// False when the value is too large for the leading-order expansion to
    /// be meaningful (taken as value ≥ 0.1).
    pub valid: bool,
}

impl Asymptote {
    fn new(value: f64) -> Self {
        Asymptote {
            value,
            valid: value < 0.1,
        }
    }
}

/// How the terrestrial-interference power enters ψ(n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PsiExponent {
    /// (1/(Ω_t η_t))^{−(n+Λ)} replaces the factor (1/(Ω_t η_t))^{M2}; this
    /// equals E[W_c^n].
    #[default]
    Combined,
    /// (1/(Ω_t η_t))^{−(n+Λ)} multiplies the factor (1/(Ω_t η_t))^{M2}.
    Separate,
}

/// ψ(n) = Σ_Λ Ξ/η_s^Λ B(M2,Λ)/Γ(M2) Γ(M2+Λ)/Γ(Λ) p_t^{e}
///        G^{1,2}_{2,2}[Θ_ss/p_t | 1−Λ−M2−n, 1−Λ; 0, 1−Λ−M2].
pub fn psi_moment(ctx: &ClosedFormContext, n: usize, reading: PsiExponent) -> Result<f64> {
    ctx.require_meijer_form()?;
    let m2 = ctx.m2 as f64;
    let p_t = ctx.wc.p_t;
    let mut acc = NeumaierSum::new();
    for &(lambda, coef) in &ctx.wc.terms {
        let l = lambda as f64;
        let g = meijer_g_1222_with(
            &MeijerG1222Spec {
                a1: 1.0 - l - m2 - n as f64,
                a2: 1.0 - l,
                b1: 0.0,
                b2: 1.0 - l - m2,
                z: ctx.theta_ss() / p_t,
            },
            &ctx.opts.mb,
        )
        .map_err(|e| e.in_term("ψ(n)"))?;
        // coef carries p_t^{M2}
        let exponent = match reading {
            PsiExponent::Combined => -(n as f64 + l) - m2,
            PsiExponent::Separate => -(n as f64 + l),
        };
        acc.add(coef * (ln_gamma(m2 + l)? - ln_gamma(l)? + exponent * p_t.ln()).exp() * g);
    }
    Ok(acc.value())
}

/// Σ_n C(K,n) α_c^n/Ω_cb^{K−n} (γ̃_p/η)^K ψ(n); 1 when γ_p ≥ μ′.
pub fn op_sat_asymp(ctx: &ClosedFormContext) -> Result<Asymptote> {
    let Some(gt) = ctx.gamma_p_tilde else {
        return Ok(Asymptote { value: 1.0, valid: true });
    };
    let k = ctx.k;
    let mut acc = NeumaierSum::new();
    for n in 0..=k {
        let psi = psi_moment(ctx, n, PsiExponent::Combined)?;
        let ln = ln_binomial(k, n) + n as f64 * ctx.alpha_c.ln() - (k - n) as f64 * ctx.omega_cb.ln()
            + k as f64 * (gt / ctx.eta).ln();
        acc.add(ln.exp() * psi);
    }
    Ok(Asymptote::new(acc.value()))
}

/// IoT asymptote; the first branch (γ_s < 1/μ′) does not depend on K.
pub fn op_iot_asymp(ctx: &ClosedFormContext) -> Result<Asymptote> {
    let first = ctx.gamma_s / (1.0 - ctx.mu) / (ctx.omega_cd * ctx.eta) * psi_moment(ctx, 1, PsiExponent::Combined)?;
    if ctx.gamma_s < 1.0 / ctx.mu_prime {
        return Ok(Asymptote::new(first));
    }
    let k = ctx.k;
    let gt = ctx.gamma_s_tilde;
    let mut acc = NeumaierSum::new();
    acc.add(first);
    for n in 0..k {
        let psi = psi_moment(ctx, n + 1, PsiExponent::Combined)?;
        let ln = ln_binomial(k - 1, n) + (n + 1) as f64 * ctx.alpha_c.ln()
            - (k - n - 1) as f64 * ctx.omega_cb.ln()
            + k as f64 * (gt / ctx.eta).ln();
        acc.add(ln.exp() * psi);
    }
    Ok(Asymptote::new(acc.value()))
}
