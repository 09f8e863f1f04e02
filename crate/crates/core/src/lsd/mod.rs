//! Limiting spectral distribution `F_c` of `M_n(τ)` for `τ ≥ 1`.
//!
//! For a ratio `c = lim n/T` the law has the density
//!
//! ```text
//! φ_c(x) = 1/(2cπ) · sqrt( y₀²/(1+y₀) − ((1−c)/|x| + 1/sqrt(1+y₀))² ),   |x| ≤ d(c)
//! ```
//!
//! where `y₀` is the largest real root of
//! `x²y³ − ((1−c)² − x²)y² − 4y − 4 = 0`. The support edge is
//! `d(c) = (1−c)·sqrt(1+y₁)/(y₁−1)` with `y₁` the root of
//! `((1−c)²−1)y³ + y² + y − 1 = 0` lying in `(1, ∞)` for `c < 1` and in
//! `(0, 1)` for `c > 1`; `d(1) = 2`. For `c > 1` there is an atom of mass
//! `1 − 1/c` at the origin.
//!
//! The density is continuous on `(0, d)` for `c ≠ 1` and behaves like
//! `|x|^{−1/2}` at the origin for `c = 1`; [`LsdModel::cdf`] integrates with
//! the substitutions `x = t²` near 0 and `x = d − s²` near the edge so both
//! ends are smooth for the Gauss–Kronrod rule.

use crate::cubic::{solve_cubic, CubicRoots};
use crate::quad::{integrate_estimate, QuadOptions};
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

mod mp;
pub mod stieltjes;

pub use mp::{mp_density, MarchenkoPastur};
pub use stieltjes::{
    select_branch, stieltjes, stieltjes_roots, BranchChoice, SelectionMethod, StieltjesEvaluation,
};

/// `|c − 1|` below which `c` is treated as exactly 1 for the boundary.
pub const UNIT_RATIO_TOL: f64 = 1e-8;

const CDF_QUAD: QuadOptions = QuadOptions {
    abs_tol: 1e-11,
    rel_tol: 1e-11,
    max_intervals: 2000,
};

/// A distribution on the real line: continuous part plus an optional atom at 0.
pub trait SpectralLaw {
    /// `F(x)`, right-continuous.
    fn cdf(&self, x: f64) -> f64;

    /// Mass of the atom at the origin.
    fn atom(&self) -> f64;

    /// `F(x⁻)`; differs from [`SpectralLaw::cdf`] only at the origin.
    fn cdf_left(&self, x: f64) -> f64 {
        if x == 0.0 {
            self.cdf(0.0) - self.atom()
        } else {
            self.cdf(x)
        }
    }
}

/// `max(0, 1 − 1/c)`.
pub fn point_mass(c: f64) -> f64 {
    (1.0 - 1.0 / c).max(0.0)
}

/// Roots of `x²y³ − ((1−c)² − x²)y² − 4y − 4` for complex `x` (the cubic is
/// scaled by `x²`, which leaves the roots unchanged).
pub fn y0_cubic(x: C64, c: f64) -> Result<CubicRoots> {
    if x.norm() == 0.0 {
        return Err(Error::SingularPoint);
    }
    let x2 = x * x;
    let omc2 = (1.0 - c) * (1.0 - c);
    solve_cubic(
        x2,
        -(C64::new(omc2, 0.0) - x2),
        C64::new(-4.0, 0.0),
        C64::new(-4.0, 0.0),
    )
}

/// Largest real root `y₀` of the density cubic at real `x ≠ 0`.
pub fn y0_at(x: f64, c: f64) -> Result<f64> {
    let roots = y0_cubic(C64::new(x, 0.0), c)?;
    Ok(roots.largest_real().unwrap_or_else(|| {
        // A real cubic always has a real root; take the least complex one.
        roots
            .roots
            .iter()
            .min_by(|a, b| a.im.abs().total_cmp(&b.im.abs()))
            .map(|z| z.re)
            .unwrap_or(f64::NAN)
    }))
}

/// The support edge together with the root `y₁` it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary {
    pub d: f64,
    /// `None` at `c = 1`, where `d = 2` is used directly.
    pub y1: Option<f64>,
}

/// `d(c)`. Solved in `h = y₁ − 1`:
/// `a·h³ + (3a+1)·h² + 3(1−c)²·h + (1−c)² = 0` with `a = (1−c)² − 1`,
/// which keeps full precision as `c → 1`.
pub fn boundary_with_root(c: f64) -> Result<Boundary> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Config("ratio c must be positive and finite"));
    }
    if (c - 1.0).abs() <= UNIT_RATIO_TOL {
        return Ok(Boundary { d: 2.0, y1: None });
    }
    let omc2 = (1.0 - c) * (1.0 - c);
    let a = c * (c - 2.0);
    let in_range = |h: f64| {
        if c < 1.0 {
            h > 0.0
        } else {
            h > -1.0 && h < 0.0
        }
    };
    let h = if a == 0.0 {
        // c = 2: h² + 3h + 1 = 0 (the cubic drops a degree).
        (-3.0 + 5.0f64.sqrt()) / 2.0
    } else {
        let coeffs = [
            C64::new(a, 0.0),
            C64::new(3.0 * a + 1.0, 0.0),
            C64::new(3.0 * omc2, 0.0),
            C64::new(omc2, 0.0),
        ];
        let roots = solve_cubic(coeffs[0], coeffs[1], coeffs[2], coeffs[3])?;
        let mut best: Option<(f64, f64)> = None;
        let mut qualifying = 0;
        for h in roots.real_roots().filter(|h| in_range(*h)) {
            qualifying += 1;
            let res = crate::cubic::residual(coeffs, C64::new(h, 0.0));
            if best.is_none_or(|(_, r)| res < r) {
                best = Some((h, res));
            }
        }
        debug_assert!(qualifying <= 1, "several roots y1 in range for c = {c}");
        best.ok_or(Error::Config("no root y1 in the expected range"))?
            .0
    };
    let d = (1.0 - c) * (2.0 + h).sqrt() / h;
    Ok(Boundary {
        d,
        y1: Some(1.0 + h),
    })
}

/// Support edge `d(c)`.
pub fn boundary(c: f64) -> Result<f64> {
    boundary_with_root(c).map(|b| b.d)
}

/// `F_c` for a fixed ratio. `d(c)` and the atom are computed once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsdModel {
    c: f64,
    d: f64,
    atom: f64,
}

impl LsdModel {
    pub fn new(c: f64) -> Result<Self> {
        let d = boundary(c)?;
        Ok(LsdModel {
            c,
            d,
            atom: point_mass(c),
        })
    }

    pub fn ratio(&self) -> f64 {
        self.c
    }

    pub fn boundary(&self) -> f64 {
        self.d
    }

    pub fn point_mass(&self) -> f64 {
        self.atom
    }

    /// `φ_c(x)`. Zero outside `[−d, d]` and `+∞` at the origin.
    pub fn density(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax == 0.0 {
            return f64::INFINITY;
        }
        if ax >= self.d || !ax.is_finite() {
            return 0.0;
        }
        let c = self.c;
        let y = match y0_at(ax, c) {
            Ok(y) if y > -1.0 => y,
            _ => return 0.0,
        };
        // The two squares under the root both grow like 1/x² near the origin.
        // Multiplying by x²(1+y₀) and using the cubic for x²y₀² gives
        //   x²(1+y₀)·[…] = 4 − x² − 2(1−c)|x|√(1+y₀) − (1−c)²(1+2y₀)/(1+y₀)
        // whose terms stay bounded.
        let k = 1.0 - c;
        let s = (1.0 + y).sqrt();
        let arg = 4.0 - ax * ax - 2.0 * k * s * ax - k * k * (1.0 + 2.0 * y) / (s * s);
        // Negative arguments only come from roundoff near the edge.
        arg.max(0.0).sqrt() / (ax * s * 2.0 * c * core::f64::consts::PI)
    }

    /// `∫_a^b φ_c` for `0 ≤ a ≤ b ≤ d`.
    fn half_integral(&self, a: f64, b: f64) -> f64 {
        let d = self.d;
        let split = 0.5 * d;
        let mut total = 0.0;
        // x = t² on [a, min(b, d/2)].
        let lo_hi = b.min(split);
        if a < lo_hi {
            total += integrate_estimate(
                |t| 2.0 * t * self.density(t * t),
                a.sqrt(),
                lo_hi.sqrt(),
                CDF_QUAD,
            )
            .value;
        }
        // x = d − s² on [max(a, d/2), b].
        let hi_lo = a.max(split);
        if hi_lo < b {
            let (s_lo, s_hi) = ((d - b).max(0.0).sqrt(), (d - hi_lo).sqrt());
            total +=
                integrate_estimate(|s| 2.0 * s * self.density(d - s * s), s_lo, s_hi, CDF_QUAD)
                    .value;
        }
        total
    }

    /// `∫ φ_c` over the whole support, analytically `min(1, 1/c)`.
    pub fn continuous_mass(&self) -> f64 {
        2.0 * self.half_integral(0.0, self.d)
    }

    /// `F_c(x) = atom·1{x ≥ 0} + ∫_{−d}^{min(x, d)} φ_c`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        let half = 0.5 * (1.0 - self.atom);
        if x <= -self.d {
            return 0.0;
        }
        if x >= self.d {
            return 1.0;
        }
        let inner = self.half_integral(0.0, x.abs());
        let value = if x < 0.0 {
            half - inner
        } else {
            half + self.atom + inner
        };
        value.clamp(0.0, 1.0)
    }

    /// Tabulates `(x, φ_c(x))`.
    pub fn density_curve<'a>(&'a self, xs: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
        xs.iter().map(move |&x| (x, self.density(x)))
    }
}

impl SpectralLaw for LsdModel {
    fn cdf(&self, x: f64) -> f64 {
        LsdModel::cdf(self, x)
    }

    fn atom(&self) -> f64 {
        self.atom
    }
}

/// `φ_c(x)` without building a model.
pub fn density(x: f64, c: f64) -> Result<f64> {
    Ok(LsdModel::new(c)?.density(x))
}

/// `F_c(x)` without building a model.
pub fn cdf(x: f64, c: f64) -> Result<f64> {
    Ok(LsdModel::new(c)?.cdf(x))
}
