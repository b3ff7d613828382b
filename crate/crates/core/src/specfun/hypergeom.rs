//! Kummer's confluent hypergeometric function ₁F₁(a; b; z).

use super::gamma::ln_gamma_signed;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 10_000;
const SERIES_EPS: f64 = 1e-16;

/// ₁F₁(a; b; z) for real arguments.
///
/// For `z < 0` with `b − a ≥ 0` the Kummer transform
/// ₁F₁(a; b; z) = e^z ₁F₁(b−a; b; −z) is applied first so that the series
/// has positive terms. Very negative `z` falls back to the large-argument
/// expansion.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if b <= 0.0 && b == b.floor() {
        return Err(Error::domain(format!("1F1 has a pole at b = {b}")));
    }
    if z == 0.0 || a == 0.0 {
        return Ok(1.0);
    }
    if z < -600.0 {
        return asymptotic_negative(a, b, z);
    }
    if z < 0.0 && b - a >= 0.0 {
        return Ok(z.exp() * series(b - a, b, -z)?);
    }
    series(a, b, z)
}

fn series(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        // Neumaier step
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term == 0.0 || (term.abs() < SERIES_EPS * (sum + comp).abs() && kf > z.abs()) {
            return Ok(sum + comp);
        }
    }
    Err(Error::numeric(
        "kummer_1f1",
        format!("series unconverged after {MAX_TERMS} terms (last term {term:e})"),
        Some(sum + comp),
    ))
}

/// ₁F₁(a; b; z) ≈ Γ(b)/Γ(b−a) (−z)^{−a} Σ (a)_k (a−b+1)_k / k! (−z)^{−k} as z → −∞.
fn asymptotic_negative(a: f64, b: f64, z: f64) -> Result<f64> {
    let x = -z;
    let (lgb, sb) = ln_gamma_signed(b)?;
    let (lgba, sba) = match ln_gamma_signed(b - a) {
        Ok(v) => v,
        // 1/Γ(b−a) = 0: the algebraic part vanishes, the e^z part underflows.
        Err(_) => return Ok(0.0),
    };
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..60 {
        let kf = k as f64;
        let next = term * (a + kf) * (a - b + 1.0 + kf) / ((kf + 1.0) * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < SERIES_EPS * sum.abs() {
            break;
        }
    }
    Ok(sb * sba * (lgb - lgba - a * x.ln()).exp() * sum)
}
