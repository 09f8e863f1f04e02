use super::{point_mass, SpectralLaw};
use crate::quad::{integrate_estimate, QuadOptions};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Marčenko–Pastur law with ratio `c` and unit variance: the `τ = 0` reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchenkoPastur {
    c: f64,
    lower: f64,
    upper: f64,
}

impl MarchenkoPastur {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Config("ratio c must be positive and finite"));
        }
        let r = c.sqrt();
        Ok(MarchenkoPastur {
            c,
            lower: (1.0 - r) * (1.0 - r),
            upper: (1.0 + r) * (1.0 + r),
        })
    }

    /// `((1 − √c)², (1 + √c)²)`.
    pub fn edges(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// `sqrt((b − x)(x − a)) / (2π c x)` on `[a, b]`, zero elsewhere.
    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 || x < self.lower || x > self.upper {
            return 0.0;
        }
        ((self.upper - x) * (x - self.lower)).max(0.0).sqrt()
            / (2.0 * core::f64::consts::PI * self.c * x)
    }

    /// `∫_a^x` of the density via `x = a + (b − a)sin²θ`, which removes both
    /// square-root edges (and the `x^{−1/2}` pole when `c = 1`).
    fn continuous_cdf(&self, x: f64) -> f64 {
        let (a, b) = (self.lower, self.upper);
        let w = b - a;
        let theta_max = ((x - a) / w).clamp(0.0, 1.0).sqrt().asin();
        let integrand = |theta: f64| {
            let (s, co) = theta.sin_cos();
            let xx = a + w * s * s;
            if xx <= 0.0 {
                // c = 1 at θ = 0: w²s²co²/(π c w s²) = w co²/(π c).
                return w * co * co / (core::f64::consts::PI * self.c);
            }
            w * w * s * s * co * co / (core::f64::consts::PI * self.c * xx)
        };
        let opts = QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 1000,
        };
        integrate_estimate(integrand, 0.0, theta_max, opts).value
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let atom = point_mass(self.c);
        if x < 0.0 {
            return 0.0;
        }
        if x >= self.upper {
            return 1.0;
        }
        (atom + self.continuous_cdf(x)).clamp(0.0, 1.0)
    }
}

impl SpectralLaw for MarchenkoPastur {
    fn cdf(&self, x: f64) -> f64 {
        MarchenkoPastur::cdf(self, x)
    }

    fn atom(&self) -> f64 {
        point_mass(self.c)
    }
}

/// Marčenko–Pastur density without building a model.
pub fn mp_density(x: f64, c: f64) -> Result<f64> {
    Ok(MarchenkoPastur::new(c)?.density(x))
}
