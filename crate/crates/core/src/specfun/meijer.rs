//! Meijer-G functions by Mellin–Barnes contour quadrature.
//!
//! Only the shapes needed by the outage expressions are supported: a generic
//! single contour integral over a ratio of gamma functions, the
//! G^{1,2}_{2,2} wrapper around it, and two bivariate shapes evaluated on a
//! product lattice.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;

use super::gamma::{gamma_fn, ln_gamma_complex};
use super::NeumaierSum;
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

/// Magnitude drop (in natural log units) at which contours are truncated.
const TRUNCATION_DROP: f64 = 40.0;
const MAX_TAU: f64 = 5_000.0;

/// ∏Γ(p_k+s) ∏Γ(m_k−s) / (∏Γ(pd_k+s) ∏Γ(md_k−s)).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GammaRatio {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub plus_den: Vec<f64>,
    pub minus_den: Vec<f64>,
}

impl GammaRatio {
    /// Integrand of the standard G^{m,n}_{p,q}[z | a; b] without the z^s factor.
    pub fn meijer(m: usize, n: usize, a: &[f64], b: &[f64]) -> Result<Self> {
        if m > b.len() || n > a.len() {
            return Err(Error::config(format!(
                "Meijer-G orders m={m}, n={n} exceed parameter counts p={}, q={}",
                a.len(),
                b.len()
            )));
        }
        Ok(GammaRatio {
            plus: a[..n].iter().map(|a| 1.0 - a).collect(),
            minus: b[..m].to_vec(),
            plus_den: b[m..].iter().map(|b| 1.0 - b).collect(),
            minus_den: a[n..].to_vec(),
        })
    }

    /// Removes numerator/denominator pairs that are identical.
    fn cancelled(&self) -> Self {
        let mut out = self.clone();
        cancel_pairs(&mut out.plus, &mut out.plus_den);
        cancel_pairs(&mut out.minus, &mut out.minus_den);
        out
    }

    /// Open interval of Re(s) separating the left and right pole families.
    pub fn strip(&self) -> Result<(f64, f64)> {
        let left = self.plus.iter().map(|p| -p).fold(f64::NEG_INFINITY, f64::max);
        let right = self.minus.iter().copied().fold(f64::INFINITY, f64::min);
        if left >= right {
            return Err(Error::config(format!(
                "pole families collide: left poles reach {left}, right poles start at {right}"
            )));
        }
        Ok((left, right))
    }

    fn balance(&self) -> isize {
        (self.plus.len() + self.minus.len()) as isize - (self.plus_den.len() + self.minus_den.len()) as isize
    }

    fn ln_eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in &self.plus {
            acc += ln_gamma_complex(s + p);
        }
        for m in &self.minus {
            acc += ln_gamma_complex(m - s);
        }
        for p in &self.plus_den {
            acc -= ln_gamma_complex(s + p);
        }
        for m in &self.minus_den {
            acc -= ln_gamma_complex(m - s);
        }
        acc
    }

    /// Value of the ratio at a real point (used for residues).
    fn eval_real(&self, s: f64) -> Result<f64> {
        let mut v = 1.0;
        for p in &self.plus {
            v *= gamma_fn(p + s)?;
        }
        for m in &self.minus {
            v *= gamma_fn(m - s)?;
        }
        for p in &self.plus_den {
            v /= gamma_fn(p + s)?;
        }
        for m in &self.minus_den {
            v /= gamma_fn(m - s)?;
        }
        Ok(v)
    }
}

fn cancel_pairs(num: &mut Vec<f64>, den: &mut Vec<f64>) {
    let mut i = 0;
    while i < num.len() {
        if let Some(j) = den.iter().position(|d| *d == num[i]) {
            num.swap_remove(i);
            den.swap_remove(j);
        } else {
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MbOptions {
    /// Target error, relative to the integral of the integrand's modulus.
    pub tol: f64,
    /// Lattice step for the bivariate evaluator; chosen automatically when `None`.
    pub step: Option<f64>,
    /// Number of step halvings allowed before giving up.
    pub max_refine: usize,
}

impl Default for MbOptions {
    fn default() -> Self {
        MbOptions {
            tol: 1e-9,
            step: None,
            max_refine: 3,
        }
    }
}

/// (1/2πi) ∫ R(s) z^s ds along Re(s) = σ, σ midway between the pole families.
pub fn mellin_barnes(ratio: &GammaRatio, z: f64, opts: &MbOptions) -> Result<f64> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("Mellin-Barnes argument must be finite and nonnegative, got {z}")));
    }
    let r = ratio.cancelled();
    let (left, right) = r.strip()?;
    if z == 0.0 {
        return residue_at_origin(&r, right);
    }
    if r.balance() <= 0 {
        return Err(Error::config("Mellin-Barnes integrand does not decay along the contour"));
    }
    let sigma = contour_abscissa(left, right);
    let lnz = z.ln();
    let ln_f = |tau: f64| -> Complex64 {
        let s = Complex64::new(sigma, tau);
        r.ln_eval(s) + s * lnz
    };

    let (tau_max, peak) = truncation_point(|tau| ln_f(tau).re, 0.5)?;
    let scale = peak.exp();
    let panels = tau_max.ceil().max(1.0) as usize;
    let qopts = QuadOptions {
        abs_tol: 1e-13 * scale,
        rel_tol: 1e-12,
        max_intervals: 200,
    };
    let mut total = NeumaierSum::new();
    for k in 0..panels {
        let a = k as f64;
        let res = integrate(|tau| ln_f(tau).exp().re, a, a + 1.0, qopts).map_err(|e| e.in_term("Mellin-Barnes panel"))?;
        if res.abs_err > opts.tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::numeric(
                "mellin_barnes",
                format!("panel [{a}, {}] error {:e} above target", a + 1.0, res.abs_err),
                Some(total.value() / PI),
            ));
        }
        total.add(res.value);
    }
    Ok(total.value() / PI)
}

/// Limit z → 0⁺: only the leftmost right pole survives.
fn residue_at_origin(r: &GammaRatio, right: f64) -> Result<f64> {
    if right > 0.0 {
        return Ok(0.0);
    }
    if right < 0.0 {
        return Err(Error::domain("Mellin-Barnes integral diverges as z → 0"));
    }
    let at_zero = r.minus.iter().filter(|m| **m == 0.0).count();
    if at_zero > 1 {
        return Err(Error::domain("higher-order pole at s = 0; limit z → 0 is unbounded"));
    }
    let mut rest = r.clone();
    let pos = rest.minus.iter().position(|m| *m == 0.0).expect("pole at zero");
    rest.minus.swap_remove(pos);
    rest.eval_real(0.0)
}

fn contour_abscissa(left: f64, right: f64) -> f64 {
    match (left.is_finite(), right.is_finite()) {
        (true, true) => 0.5 * (left + right),
        (true, false) => left + 1.0,
        (false, true) => right - 1.0,
        (false, false) => 0.0,
    }
}

/// Walks τ = 0, step, 2·step, … until ln|f| has dropped `TRUNCATION_DROP`
/// below its running maximum. Returns (τ_max, peak).
fn truncation_point<F: Fn(f64) -> f64>(ln_abs: F, step: f64) -> Result<(f64, f64)> {
    let mut peak = f64::NEG_INFINITY;
    let mut tau = 0.0;
    loop {
        let v = ln_abs(tau);
        if v.is_nan() {
            return Err(Error::numeric("mellin_barnes", format!("integrand undefined at τ = {tau}"), None));
        }
        peak = peak.max(v);
        if tau > 0.0 && v < peak - TRUNCATION_DROP {
            return Ok((tau, peak));
        }
        tau += step;
        if tau > MAX_TAU {
            return Err(Error::numeric(
                "mellin_barnes",
                format!("integrand has not decayed by τ = {MAX_TAU}"),
                None,
            ));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeijerG1222Spec {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub z: f64,
}

/// G^{1,2}_{2,2}[z | a1, a2; b1, b2].
pub fn meijer_g_1222(spec: &MeijerG1222Spec) -> Result<f64> {
    meijer_g_1222_with(spec, &MbOptions::default())
}

pub fn meijer_g_1222_with(spec: &MeijerG1222Spec, opts: &MbOptions) -> Result<f64> {
    if !(spec.z > 0.0) {
        return Err(Error::domain(format!("G^{{1,2}}_{{2,2}} needs z > 0, got {}", spec.z)));
    }
    let ratio = GammaRatio::meijer(1, 2, &[spec.a1, spec.a2], &[spec.b1, spec.b2])?;
    mellin_barnes(&ratio, spec.z, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BivariateShape {
    /// Both branches of type G^{1,1}_{1,1}.
    Type11,
    /// The y branch carries an extra lower parameter: G^{1,1}_{1,2}.
    Type12,
}

/// Bivariate Meijer-G with one outer parameter.
///
/// Packing, with s and t the contour variables of the x and y branches:
///
/// ```text
/// G = (1/(2πi)²) ∫∫ Γ(α+s+t)
///       · Γ(1−a_x+s) Γ(b_x−s) x^s
///       · Γ(1−a_y+t) Γ(b_y−t) / Γ(1−b_y2+t) y^t  ds dt
/// ```
///
/// `outer = [α]`, `x_upper = [a_x]`, `x_lower = [b_x]`, `y_upper = [a_y]`,
/// `y_lower = [b_y]` for [`BivariateShape::Type11`] and `[b_y, b_y2]` for
/// [`BivariateShape::Type12`]. The row order follows the way these functions
/// are usually typeset: outer; x-branch; y-branch upper, then lower.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateGSpec {
    pub shape: BivariateShape,
    pub outer: Vec<f64>,
    pub x_upper: Vec<f64>,
    pub x_lower: Vec<f64>,
    pub y_upper: Vec<f64>,
    pub y_lower: Vec<f64>,
    pub x: f64,
    pub y: f64,
}

impl BivariateGSpec {
    fn validate(&self) -> Result<()> {
        let y_lower = match self.shape {
            BivariateShape::Type11 => 1,
            BivariateShape::Type12 => 2,
        };
        let ok = self.outer.len() == 1
            && self.x_upper.len() == 1
            && self.x_lower.len() == 1
            && self.y_upper.len() == 1
            && self.y_lower.len() == y_lower;
        if !ok {
            return Err(Error::config(format!("parameter counts do not match shape {:?}", self.shape)));
        }
        for v in [self.x, self.y] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("bivariate G arguments must be finite and nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    fn x_branch(&self) -> GammaRatio {
        GammaRatio {
            plus: vec![1.0 - self.x_upper[0]],
            minus: vec![self.x_lower[0]],
            ..Default::default()
        }
    }

    fn y_branch(&self) -> GammaRatio {
        GammaRatio {
            plus: vec![1.0 - self.y_upper[0]],
            minus: vec![self.y_lower[0]],
            plus_den: self.y_lower[1..].iter().map(|b| 1.0 - b).collect(),
            ..Default::default()
        }
    }
}

/// Evaluates a bivariate G with default options and no caching.
pub fn bivariate_meijer_g(spec: &BivariateGSpec) -> Result<f64> {
    BivariateEvaluator::new(MbOptions::default()).eval(spec)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CorrKey {
    x_branch: Vec<u64>,
    y_branch: Vec<u64>,
    x: u64,
    y: u64,
    h: u64,
}

/// Branch correlation on the lattice, independent of the outer parameter.
#[derive(Debug)]
struct Correlation {
    sigma: f64,
    k0: isize,
    /// Σ_i u_i v_{k−i}, all lattice points.
    full: Vec<Complex64>,
    /// Same over even i and even k−i.
    coarse: Vec<Complex64>,
    /// Σ_i |u_i||v_{k−i}|.
    mass: Vec<f64>,
}

/// Bivariate Meijer-G evaluator that caches the α-independent part of the
/// lattice sum, so families of functions that differ only in the outer
/// parameter cost one 1-D sum each.
///
/// The double contour integral is approximated by the trapezoid rule on a
/// square lattice of step h. Since the integrand is analytic in a strip
/// around each contour, the error decays like e^{−2πd/h}; it is estimated
/// from the sub-lattice of step 2h and h is halved until the target is met.
pub struct BivariateEvaluator {
    opts: MbOptions,
    cache: Mutex<HashMap<CorrKey, std::sync::Arc<Correlation>>>,
}

impl BivariateEvaluator {
    pub fn new(opts: MbOptions) -> Self {
        BivariateEvaluator {
            opts,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn options(&self) -> &MbOptions {
        &self.opts
    }

    pub fn eval(&self, spec: &BivariateGSpec) -> Result<f64> {
        spec.validate()?;
        let alpha = spec.outer[0];
        let xb = spec.x_branch().cancelled();
        let yb = spec.y_branch().cancelled();
        if spec.x == 0.0 || spec.y == 0.0 {
            return degenerate(alpha, &xb, &yb, spec.x, spec.y, &self.opts);
        }
        let (xl, xr) = xb.strip()?;
        let (yl, yr) = yb.strip()?;
        let sx = contour_abscissa(xl, xr);
        let sy = contour_abscissa(yl, yr);
        let outer_re = alpha + sx + sy;
        if outer_re <= 0.0 {
            return Err(Error::config(format!(
                "outer gamma Γ({alpha}+s+t) has poles on the chosen contours (Re = {outer_re})"
            )));
        }
        let d = [sx - xl, xr - sx, sy - yl, yr - sy, 0.5 * outer_re, 1.0]
            .into_iter()
            .filter(|v| v.is_finite())
            .fold(f64::INFINITY, f64::min);
        let growth = d * (spec.x.ln().abs() + spec.y.ln().abs());
        let mut h = self
            .opts
            .step
            .unwrap_or_else(|| 2.0 * PI * d / ((1.0 / (self.opts.tol * 1e-4)).ln() + growth));

        let mut last_err = f64::INFINITY;
        let mut last_val = f64::NAN;
        for _ in 0..=self.opts.max_refine {
            let corr = self.correlation(&xb, &yb, spec.x, spec.y, (sx, sy), h)?;
            let (val, coarse, mass) = outer_sum(&corr, alpha, h);
            let diff = (val - coarse).abs();
            let err = if mass > 0.0 { diff * diff / mass } else { 0.0 };
            if err <= self.opts.tol * mass || diff == 0.0 {
                return Ok(val);
            }
            last_err = err;
            last_val = val;
            h *= 0.5;
        }
        Err(Error::numeric(
            "bivariate_meijer_g",
            format!("lattice refinement did not reach tolerance (estimated error {last_err:e})"),
            Some(last_val),
        ))
    }

    fn correlation(
        &self,
        xb: &GammaRatio,
        yb: &GammaRatio,
        x: f64,
        y: f64,
        sigma: (f64, f64),
        h: f64,
    ) -> Result<std::sync::Arc<Correlation>> {
        let key = CorrKey {
            x_branch: ratio_bits(xb),
            y_branch: ratio_bits(yb),
            x: x.to_bits(),
            y: y.to_bits(),
            h: h.to_bits(),
        };
        if let Some(c) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(c.clone());
        }
        let u = branch_samples(xb, sigma.0, x, h)?;
        let v = branch_samples(yb, sigma.1, y, h)?;
        let corr = std::sync::Arc::new(correlate(&u, &v, sigma.0 + sigma.1));
        self.cache.lock().expect("cache lock").insert(key, corr.clone());
        Ok(corr)
    }
}

fn ratio_bits(r: &GammaRatio) -> Vec<u64> {
    let mut out = Vec::new();
    for (tag, list) in [(1u64, &r.plus), (2, &r.minus), (3, &r.plus_den), (4, &r.minus_den)] {
        out.push(tag << 60 | list.len() as u64);
        out.extend(list.iter().map(|v| v.to_bits()));
    }
    out
}

/// Branch values on τ = i·h, i ∈ [−N, N], as (values, N).
fn branch_samples(r: &GammaRatio, sigma: f64, z: f64, h: f64) -> Result<(Vec<Complex64>, usize)> {
    let lnz = z.ln();
    let ln_f = |tau: f64| {
        let s = Complex64::new(sigma, tau);
        r.ln_eval(s) + s * lnz
    };
    let (tau_max, _) = truncation_point(|t| ln_f(t).re, h.min(0.5))?;
    let n = (tau_max / h).ceil() as usize;
    let mut vals = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for i in 0..=n {
        let f = ln_f(i as f64 * h).exp();
        vals[n + i] = f;
        vals[n - i] = f.conj();
    }
    Ok((vals, n))
}

fn correlate(u: &(Vec<Complex64>, usize), v: &(Vec<Complex64>, usize), sigma: f64) -> Correlation {
    let (uv, nu) = (&u.0, u.1 as isize);
    let (vv, nv) = (&v.0, v.1 as isize);
    let k0 = nu + nv;
    let len = (2 * k0 + 1) as usize;
    let mut full = vec![Complex64::new(0.0, 0.0); len];
    let mut coarse = vec![Complex64::new(0.0, 0.0); len];
    let mut mass = vec![0.0; len];
    for (ii, ui) in uv.iter().enumerate() {
        let i = ii as isize - nu;
        let ua = ui.norm();
        for (jj, vj) in vv.iter().enumerate() {
            let j = jj as isize - nv;
            let idx = (i + j + k0) as usize;
            let p = ui * vj;
            full[idx] += p;
            mass[idx] += ua * vj.norm();
            if i % 2 == 0 && j % 2 == 0 {
                coarse[idx] += p;
            }
        }
    }
    Correlation {
        sigma,
        k0,
        full,
        coarse,
        mass,
    }
}

/// Returns (value on h, value on 2h, integral of the modulus).
fn outer_sum(c: &Correlation, alpha: f64, h: f64) -> (f64, f64, f64) {
    let mut full = NeumaierSum::new();
    let mut coarse = NeumaierSum::new();
    let mut mass = NeumaierSum::new();
    let base = alpha + c.sigma;
    for (idx, f) in c.full.iter().enumerate() {
        let k = idx as isize - c.k0;
        let o = ln_gamma_complex(Complex64::new(base, k as f64 * h)).exp();
        full.add((o * f).re);
        mass.add(o.norm() * c.mass[idx]);
        if k % 2 == 0 {
            coarse.add((o * c.coarse[idx]).re);
        }
    }
    let w = h * h / (4.0 * PI * PI);
    (w * full.value(), 4.0 * w * coarse.value(), w * mass.value())
}

/// x = 0 and/or y = 0: only the residue at the leftmost right pole of the
/// vanishing branch survives.
fn degenerate(alpha: f64, xb: &GammaRatio, yb: &GammaRatio, x: f64, y: f64, opts: &MbOptions) -> Result<f64> {
    let pole_x = xb.strip()?.1;
    let pole_y = yb.strip()?.1;
    if (x == 0.0 && pole_x > 0.0) || (y == 0.0 && pole_y > 0.0) {
        return Ok(0.0);
    }
    let collapse = |r: &GammaRatio| -> Result<(f64, f64)> {
        let (_, right) = r.strip()?;
        if right < 0.0 {
            return Err(Error::domain("bivariate G diverges at a zero argument"));
        }
        let mut rest = r.clone();
        let pos = rest.minus.iter().position(|m| *m == right).expect("pole");
        rest.minus.swap_remove(pos);
        Ok((right, rest.eval_real(right)?))
    };
    match (x == 0.0, y == 0.0) {
        (true, true) => {
            let (px, cx) = collapse(xb)?;
            let (py, cy) = collapse(yb)?;
            Ok(cx * cy * gamma_fn(alpha + px + py)?)
        }
        (true, false) => {
            let (px, cx) = collapse(xb)?;
            let mut r = yb.clone();
            r.plus.push(alpha + px);
            Ok(cx * mellin_barnes(&r, y, opts)?)
        }
        (false, true) => {
            let (py, cy) = collapse(yb)?;
            let mut r = xb.clone();
            r.plus.push(alpha + py);
            Ok(cy * mellin_barnes(&r, x, opts)?)
        }
        (false, false) => unreachable!("degenerate path needs a zero argument"),
    }
}
