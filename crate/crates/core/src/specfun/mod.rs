//! Real-valued special functions used by the channel models and the outage
//! evaluators, including univariate and bivariate Meijer-G evaluation by
//! Mellin–Barnes contour quadrature.

mod gamma;
mod hypergeom;
mod incgamma;
mod meijer;

pub use gamma::{beta_fn, factorial, gamma_fn, ln_beta, ln_factorial, ln_gamma, ln_gamma_complex, ln_gamma_signed};
pub use hypergeom::kummer_1f1;
pub use incgamma::{lower_inc_gamma, lower_inc_gamma_reg, upper_inc_gamma_reg};
pub use meijer::{
    bivariate_meijer_g, meijer_g_1222, meijer_g_1222_with, mellin_barnes, BivariateEvaluator, BivariateGSpec, BivariateShape,
    GammaRatio, MbOptions, MeijerG1222Spec,
};

/// Rising factorial (a)_n = a(a+1)…(a+n−1); the empty product is 1.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    let mut p = 1.0;
    for k in 0..n {
        p *= a + k as f64;
        if p == 0.0 {
            break;
        }
    }
    p
}

/// Binomial coefficient C(n, k) as a float, zero for k > n.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

/// Neumaier-compensated running sum.
///
/// Also tracks the sum of magnitudes so callers can judge cancellation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Σ|x| over everything added so far.
    pub fn abs_total(&self) -> f64 {
        self.abs
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}
