use super::{alt_sign, clamp_probability, ln_binomial, multinomial_terms, ClosedFormContext};
use crate::error::Result;
use crate::specfun::{
    beta_fn, binomial, factorial, ln_factorial, ln_gamma, lower_inc_gamma, meijer_g_1222_with,
    BivariateEvaluator, BivariateGSpec, BivariateShape, MeijerG1222Spec, NeumaierSum,
};
use crate::system::NetworkConfig;

/// Components of the IoT lower bound.
///
/// `psi4` and `psi5` are the two parts of Ψ₃ already summed with their
/// common prefactor, so `psi3 = psi4 − psi5`. Ψ₂..Ψ₅ are zero on the
/// γ_s < 1/μ′ branch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IotTerms {
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
    pub psi4: f64,
    pub psi5: f64,
    /// Whether γ_s ≥ 1/μ′, i.e. Ψ₂ and Ψ₃ contribute.
    pub second_branch: bool,
}

impl IotTerms {
    pub fn total(&self) -> f64 {
        self.psi1 + self.psi2 + self.psi3
    }
}

pub fn op_iot_lb(cfg: &NetworkConfig) -> Result<f64> {
    op_iot_lb_ctx(&ClosedFormContext::new(cfg)?)
}

pub fn op_iot_lb_ctx(ctx: &ClosedFormContext) -> Result<f64> {
    clamp_probability("op_iot_lb", op_iot_lb_raw(ctx)?)
}

pub fn op_iot_lb_raw(ctx: &ClosedFormContext) -> Result<f64> {
    Ok(eval_iot_terms(ctx)?.total())
}

/// Type-12 bivariate G with x-branch upper parameter `a_x`.
fn g12(ev: &BivariateEvaluator, alpha: f64, a_x: f64, x: f64, y: f64, lambda: f64, m2: f64) -> Result<f64> {
    ev.eval(&BivariateGSpec {
        shape: BivariateShape::Type12,
        outer: vec![alpha],
        x_upper: vec![a_x],
        x_lower: vec![0.0],
        y_upper: vec![1.0 - lambda],
        y_lower: vec![0.0, 1.0 - lambda - m2],
        x,
        y,
    })
}

/// Type-11 bivariate G with upper parameters `a_x`, `a_y`.
fn g11(ev: &BivariateEvaluator, alpha: f64, a_x: f64, a_y: f64, x: f64, y: f64) -> Result<f64> {
    ev.eval(&BivariateGSpec {
        shape: BivariateShape::Type11,
        outer: vec![alpha],
        x_upper: vec![a_x],
        x_lower: vec![0.0],
        y_upper: vec![a_y],
        y_lower: vec![0.0],
        x,
        y,
    })
}

/// Ψ₁ = 1 − Σ_Λ c_Λ Γ(M2+Λ)/Γ(Λ) χ_ct^{−(Λ+M2)} G^{1,2}_{2,2}[Θ_ss/χ_ct | 1−Λ−M2, 1−Λ; 0, 1−Λ−M2].
fn psi1(ctx: &ClosedFormContext) -> Result<f64> {
    let m2 = ctx.m2 as f64;
    let mut acc = NeumaierSum::new();
    acc.add(1.0);
    for &(lambda, coef) in &ctx.wc.terms {
        let l = lambda as f64;
        let g = meijer_g_1222_with(
            &MeijerG1222Spec {
                a1: 1.0 - l - m2,
                a2: 1.0 - l,
                b1: 0.0,
                b2: 1.0 - l - m2,
                z: ctx.theta_ss() / ctx.chi_ct,
            },
            &ctx.opts.mb,
        )
        .map_err(|e| e.in_term("Ψ1"))?;
        acc.add(-coef * (ln_gamma(m2 + l)? - ln_gamma(l)? - (l + m2) * ctx.chi_ct.ln()).exp() * g);
    }
    Ok(acc.value())
}

/// Evaluates Ψ₁..Ψ₅ of the IoT lower bound.
pub fn eval_iot_terms(ctx: &ClosedFormContext) -> Result<IotTerms> {
    ctx.require_meijer_form()?;
    let psi1 = psi1(ctx)?;
    if ctx.gamma_s < 1.0 / ctx.mu_prime {
        return Ok(IotTerms {
            psi1,
            ..Default::default()
        });
    }
    let ev = BivariateEvaluator::new(ctx.opts.mb);
    let k = ctx.k;
    let m2 = ctx.m2 as f64;
    let eta = ctx.eta;
    let b = ctx.rate_cb;
    let th = ctx.theta_ca;
    let r = ctx.r_ratio;
    let tss = ctx.theta_ss();
    let gts = ctx.gamma_s_tilde;
    let chi_ct = ctx.chi_ct;
    let chi_cs = ctx.chi_cs;

    let mut psi2 = NeumaierSum::new();
    let mut psi4 = NeumaierSum::new();
    let mut psi5 = NeumaierSum::new();
    for n in 0..k {
        let nf = n as f64;
        let nb = (n + 1) as f64 * b;
        let r_n = nf * r / (nf + 1.0);
        let decay = (-nb * gts).exp();
        // χ̃: the rate after the (n+1)Θ_ca γ̃_s shift
        let shift = (nf + 1.0) * th * gts;
        for mt in multinomial_terms(n, &ctx.a_m) {
            let d = mt.delta;
            let df = d as f64;
            for l in 0..ctx.m_ac {
                let zeta = ctx.zeta_c[l];
                if zeta == 0.0 {
                    continue;
                }
                let lf = l as f64;
                // K ζ(l)/η^{l+1} C(K−1,n)(−1)^n α^{n+1} n!/∏s! ∏𝒜^s
                let ln_c = (k as f64).ln() + zeta.ln() - (lf + 1.0) * eta.ln()
                    + ln_binomial(k - 1, n)
                    + (nf + 1.0) * ctx.alpha_c.ln()
                    + mt.ln_weight;
                let sign = alt_sign(n);
                let l_tilde = l + d;
                let lt = l_tilde as f64;
                for &(lambda, coef) in &ctx.wc.terms {
                    let lam = lambda as f64;
                    let ln_gl = ln_gamma(m2 + lam)? - ln_gamma(lam)?;

                    // Ψ₂
                    let dt = df + lf + 1.0 + lam + m2;
                    let mut bracket = NeumaierSum::new();
                    bracket.add(
                        (-dt * chi_ct.ln()).exp()
                            * g12(&ev, dt, -lt, r / chi_ct, tss / chi_ct, lam, m2).map_err(|e| e.in_term("Ψ2"))?,
                    );
                    let chi_t = chi_ct + shift;
                    for q in 0..=l_tilde {
                        let qf = q as f64;
                        let w = gts.powi(q as i32) / factorial(q) * decay * nb.powi(q as i32)
                            * (ln_factorial(l_tilde) - ln_factorial(l_tilde - q)).exp();
                        if w == 0.0 {
                            continue;
                        }
                        bracket.add(
                            -w * (-dt * chi_t.ln()).exp()
                                * g12(&ev, dt, -lt + qf, r / chi_t, tss / chi_t, lam, m2)
                                    .map_err(|e| e.in_term("Ψ2"))?,
                        );
                    }
                    let ln_pre2 = ln_c + coef.ln() + ln_gl - (lt + 1.0) * nb.ln();
                    psi2.add(sign * ln_pre2.exp() * bracket.value());

                    // Ψ₃ = K/(Ω_cb η) Σ … c_Λ Γ(Δ+1) (Ψ₄ − Ψ₅)
                    let ln_pre3 = ln_c + b.ln() + coef.ln() + ln_factorial(d);

                    // Ψ₄
                    let lam_t = df + lam + m2;
                    let mut b4 = NeumaierSum::new();
                    b4.add(
                        (-lam_t * chi_ct.ln()).exp()
                            * g12(&ev, lam_t, -df, r_n / chi_ct, tss / chi_ct, lam, m2)
                                .map_err(|e| e.in_term("Ψ4"))?,
                    );
                    let chi_u = chi_ct + th * gts;
                    for u in 0..=l {
                        let uf = u as f64;
                        let w = (th * gts).powi(u as i32) / factorial(u);
                        if w == 0.0 {
                            continue;
                        }
                        b4.add(
                            -w * (-(lam_t + uf) * chi_u.ln()).exp()
                                * g12(&ev, lam_t + uf, -df, r_n / chi_u, tss / chi_u, lam, m2)
                                    .map_err(|e| e.in_term("Ψ4"))?,
                        );
                    }
                    let ln_pre4 = -(lf + 1.0) * th.ln() + ln_gl + ln_factorial(l) - ln_factorial(d)
                        - (df + 1.0) * nb.ln();
                    psi4.add(sign * (ln_pre3 + ln_pre4).exp() * b4.value());

                    // Ψ₅, from the binomial form of the W_c density
                    let inv_beta = 1.0 / beta_fn(lam, m2)?;
                    for q in 0..=d {
                        let qf = q as f64;
                        let lq = l + q;
                        for g in 0..=ctx.m2 {
                            // C(M2−1, g) vanishes at g = M2
                            let cg = binomial(ctx.m2 - 1, g);
                            if cg == 0.0 {
                                continue;
                            }
                            let gf = g as f64;
                            let g_tilde = df + lf + m2 + 1.0 - gf;
                            let block = |p: f64, ex: f64| -> Result<f64> {
                                let a = g_tilde + ex;
                                let mut s = NeumaierSum::new();
                                s.add(
                                    (-a * p.ln()).exp()
                                        * g11(&ev, a, -df + qf, -(lq as f64), r_n / p, r / p)?,
                                );
                                let pt = p + shift;
                                for j in 0..=lq {
                                    let w = gts.powi(j as i32) / factorial(j) * decay * nb.powi(j as i32)
                                        * (ln_factorial(lq) - ln_factorial(lq - j)).exp();
                                    if w == 0.0 {
                                        continue;
                                    }
                                    s.add(
                                        -w * (-a * pt.ln()).exp()
                                            * g11(&ev, a, -df + qf, -(lq as f64) + j as f64, r_n / pt, r / pt)?,
                                    );
                                }
                                Ok(s.value())
                            };
                            let mut val = NeumaierSum::new();
                            val.add(block(chi_ct, 0.0).map_err(|e| e.in_term("Ψ5"))?);
                            for v in 0..(lambda + g) {
                                let vf = v as f64;
                                val.add(
                                    -tss.powi(v as i32) / factorial(v)
                                        * block(chi_cs, vf).map_err(|e| e.in_term("Ψ5"))?,
                                );
                            }
                            let ln_pre5 = ln_gamma(lam + gf)? - (lam + gf) * tss.ln() - ln_factorial(q)
                                - ln_gamma(df - qf + 1.0)?
                                - (lt + 2.0) * nb.ln();
                            let sg = if g % 2 == 0 { 1.0 } else { -1.0 };
                            psi5.add(sign * sg * cg * inv_beta * (ln_pre3 + ln_pre5).exp() * val.value());
                        }
                    }
                }
            }
        }
    }
    let psi4 = psi4.value();
    let psi5 = psi5.value();
    Ok(IotTerms {
        psi1,
        psi2: psi2.value(),
        psi3: psi4 - psi5,
        psi4,
        psi5,
        second_branch: true,
    })
}

/// F_{Λ̂_{ac_{k*}}}(x | w) of the relay chosen by the max-min selection rule.
pub fn cond_cdf_ac_selected(x: f64, w: f64, ctx: &ClosedFormContext) -> Result<f64> {
    if x <= 0.0 || w <= 0.0 {
        return Ok(0.0);
    }
    let k = ctx.k;
    let b = ctx.rate_cb;
    let tw = ctx.theta_ca * w;
    let mut acc = NeumaierSum::new();
    for n in 0..k {
        let vt = ctx.vartheta(n, w);
        let om = ctx.omega_n(n, w);
        let ln_pre_n = ln_binomial(k - 1, n) + (n + 1) as f64 * ctx.alpha_c.ln();
        for mt in multinomial_terms(n, &ctx.a_m) {
            let d = mt.delta;
            let df = d as f64;
            let pre = alt_sign(n) * (ln_pre_n + mt.ln_weight).exp();
            for l in 0..ctx.m_ac {
                let lf = l as f64;
                let zl = ctx.zeta_c[l] / ctx.eta.powi(l as i32 + 1) * w.powf(df + lf + 1.0);
                if zl == 0.0 {
                    continue;
                }
                let mut br = NeumaierSum::new();
                br.add(lower_inc_gamma(lf + 1.0, tw * x)? / tw.powf(lf + 1.0));
                for q in 0..=d {
                    let qf = q as f64;
                    br.add(
                        -vt.powi(q as i32) / (factorial(q) * om.powf(lf + qf + 1.0))
                            * lower_inc_gamma(lf + qf + 1.0, om * x)?,
                    );
                }
                let first = k as f64 * b * pre * factorial(d) / vt.powf(df + 1.0) * zl * br.value();
                let second = k as f64 * zl * pre * lower_inc_gamma(lf + df + 1.0, om * x)? / om.powf(lf + df + 1.0);
                acc.add(first);
                acc.add(second);
            }
        }
    }
    Ok(acc.value().clamp(0.0, 1.0))
}

pub fn semianalytic_op_iot(cfg: &NetworkConfig) -> Result<f64> {
    semianalytic_op_iot_ctx(&ClosedFormContext::new(cfg)?)
}

/// E_W of the conditional IoT outage bound:
/// F_d(w) on the first branch, F_d + (1 − F_d) F*(γ̃_s | w) on the second,
/// with F_d(w) = 1 − e^{−c_d w}.
pub fn semianalytic_op_iot_ctx(ctx: &ClosedFormContext) -> Result<f64> {
    let c_d = ctx.c_d;
    let v = if ctx.gamma_s < 1.0 / ctx.mu_prime {
        ctx.wc.expect(|w| -(-c_d * w).exp_m1())?
    } else {
        let gts = ctx.gamma_s_tilde;
        let mut failure = None;
        let v = ctx.wc.expect(|w| {
            let pass = (-c_d * w).exp();
            let f = match cond_cdf_ac_selected(gts, w, ctx) {
                Ok(f) => f,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            };
            1.0 - pass * (1.0 - f)
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        v
    };
    clamp_probability("semianalytic_op_iot", v)
}

