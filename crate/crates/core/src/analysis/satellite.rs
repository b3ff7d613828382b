use super::{alt_sign, clamp_probability, ln_binomial, multinomial_terms, ClosedFormContext};
use crate::error::Result;
use crate::specfun::{ln_gamma, meijer_g_1222_with, MeijerG1222Spec, NeumaierSum};
use crate::system::NetworkConfig;

/// Lower bound on the satellite outage probability.
pub fn op_sat_lb(cfg: &NetworkConfig) -> Result<f64> {
    op_sat_lb_ctx(&ClosedFormContext::new(cfg)?)
}

pub fn op_sat_lb_ctx(ctx: &ClosedFormContext) -> Result<f64> {
    clamp_probability("op_sat_lb", op_sat_lb_raw(ctx)?)
}

/// Unclamped closed form: exactly 1 when γ_p ≥ μ′, otherwise
///
/// Σ_n C(K,n)(−1)^n α_c^n Σ_s n!/∏s_m! ∏𝒜_m^{s_m} γ̃_p^Δ e^{−nγ̃_p/(Ω_cb η)}
///   Σ_Λ c_Λ Γ(M2+Λ)/Γ(Λ) p^{−ν} G^{1,2}_{2,2}[Θ_ss/p | 1−ν, 1−Λ; 0, 1−Λ−M2]
///
/// with p = nγ̃_pΘ_ca + 1/(Ω_t η_t) and ν = Δ+Λ+M2.
pub fn op_sat_lb_raw(ctx: &ClosedFormContext) -> Result<f64> {
    let Some(gt) = ctx.gamma_p_tilde else {
        return Ok(1.0);
    };
    ctx.require_meijer_form()?;
    let m2 = ctx.m2 as f64;
    let mut total = NeumaierSum::new();
    for n in 0..=ctx.k {
        let nf = n as f64;
        let ln_outer = ln_binomial(ctx.k, n) + nf * ctx.alpha_c.ln() - nf * gt * ctx.rate_cb;
        let p = nf * gt * ctx.theta_ca + ctx.wc.p_t;
        for mt in multinomial_terms(n, &ctx.a_m) {
            if mt.delta > 0 && gt == 0.0 {
                continue;
            }
            let ln_gt = if mt.delta > 0 { mt.delta as f64 * gt.ln() } else { 0.0 };
            for &(lambda, coef) in &ctx.wc.terms {
                let l = lambda as f64;
                let nu = mt.delta as f64 + l + m2;
                let g = meijer_g_1222_with(
                    &MeijerG1222Spec {
                        a1: 1.0 - nu,
                        a2: 1.0 - l,
                        b1: 0.0,
                        b2: 1.0 - l - m2,
                        z: ctx.theta_ss() / p,
                    },
                    &ctx.opts.mb,
                )
                .map_err(|e| e.in_term("satellite bound"))?;
                let ln_mag = ln_outer + mt.ln_weight + ln_gt + coef.ln() + ln_gamma(m2 + l)? - ln_gamma(l)?
                    - nu * p.ln();
                total.add(alt_sign(n) * ln_mag.exp() * g);
            }
        }
    }
    Ok(total.value())
}

/// F_{Λ̂_ac}(x | W_c = w) for a single, unselected relay.
pub fn cond_cdf_ac(x: f64, w: f64, ctx: &ClosedFormContext) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (1.0 - ctx.tail_ac(x, w)).clamp(0.0, 1.0)
}

/// E_W[(1 − (1 − F_{Λ̂_ac}(γ̃_p|w))(1 − F_{Λ_cb}(γ̃_p)))^K] by adaptive quadrature.
pub fn semianalytic_op_sat(cfg: &NetworkConfig) -> Result<f64> {
    semianalytic_op_sat_ctx(&ClosedFormContext::new(cfg)?)
}

pub fn semianalytic_op_sat_ctx(ctx: &ClosedFormContext) -> Result<f64> {
    let Some(gt) = ctx.gamma_p_tilde else {
        return Ok(1.0);
    };
    let k = ctx.k as i32;
    let v = ctx.wc.expect(|w| {
        let ln_pass = ctx.tail_ac(gt, w).ln() - gt * ctx.rate_cb;
        (-ln_pass.exp_m1()).powi(k)
    })?;
    clamp_probability("semianalytic_op_sat", v)
}
