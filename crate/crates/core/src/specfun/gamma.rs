//! Gamma, log-gamma and Beta functions for real and complex arguments.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn lanczos_sum(x: f64) -> f64 {
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// Γ(x) for real `x` that is not a pole.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("gamma of NaN"));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::domain(format!("gamma has a pole at {x}")));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1−x) = π / sin(πx)
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x == x.floor() && x <= 171.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    if x > 140.0 {
        return ln_gamma_pos(x).exp();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

fn ln_gamma_pos(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        // ln Γ(x) = ln π − ln sin(πx) − ln Γ(1−x); sin(πx) > 0 on (0, 1/2)
        return Ok(PI.ln() - (PI * x).sin().ln() - ln_gamma_pos(1.0 - x));
    }
    Ok(ln_gamma_pos(x))
}

/// Logarithm of |Γ(x)| together with the sign of Γ(x).
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if is_nonpositive_integer(x) {
        return Err(Error::domain(format!("gamma has a pole at {x}")));
    }
    if x > 0.0 {
        return Ok((ln_gamma(x)?, 1.0));
    }
    let s = (PI * x).sin();
    let (lg, sg) = ln_gamma_signed(1.0 - x)?;
    Ok((PI.ln() - s.abs().ln() - lg, s.signum() * sg))
}

/// Beta function Φ(a, b) = Γ(a)Γ(b)/Γ(a+b) for positive arguments.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    Ok(ln_beta(a, b)?.exp())
}

/// ln Φ(a, b) for positive arguments.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!("beta requires positive arguments, got ({a}, {b})")));
    }
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

/// ln n!.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 { 0.0 } else { ln_gamma_pos(n as f64 + 1.0) }
}

/// n! as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Principal-ish branch of ln Γ(z) for complex `z` away from the poles.
///
/// Only `exp` of the result is meaningful to callers; the imaginary part may
/// differ from the principal branch by a multiple of 2π.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // ln Γ(z) = ln π − ln sin(πz) − ln Γ(1−z)
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_complex(1.0 - z);
    }
    let zm = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += *c / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (zm + 0.5) * t.ln() - t + acc.ln()
}

/// ln sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let y = z.im;
    if y.abs() < 20.0 {
        (PI * z).sin().ln()
    } else if y > 0.0 {
        -i * PI * z + (1.0 - (2.0 * PI * i * z).exp()).ln() + Complex64::new(0.0, 0.5).ln()
    } else {
        i * PI * z + (1.0 - (-2.0 * PI * i * z).exp()).ln() - Complex64::new(0.0, 2.0).ln()
    }
}
