//! Cardano's formula in complex arithmetic, followed by Newton polishing.

use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Imaginary-part threshold for calling a root real: `|Im| ≤ REAL_TOL·(1 + |root|)`.
pub const REAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub roots: [C64; 3],
    pub is_real: [bool; 3],
}

impl CubicRoots {
    /// Real parts of the roots flagged real.
    pub fn real_roots(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots
            .iter()
            .zip(self.is_real)
            .filter(|(_, r)| *r)
            .map(|(z, _)| z.re)
    }

    pub fn largest_real(&self) -> Option<f64> {
        self.real_roots()
            .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.max(x))))
    }
}

fn eval(coeffs: &[C64; 4], y: C64) -> C64 {
    ((coeffs[0] * y + coeffs[1]) * y + coeffs[2]) * y + coeffs[3]
}

fn eval_derivative(coeffs: &[C64; 4], y: C64) -> C64 {
    (coeffs[0] * 3.0 * y + coeffs[1] * 2.0) * y + coeffs[2]
}

/// Roots of `a3·y³ + a2·y² + a1·y + a0`.
pub fn solve_cubic(a3: C64, a2: C64, a1: C64, a0: C64) -> Result<CubicRoots> {
    if a3 == C64::new(0.0, 0.0) {
        return Err(Error::Degree);
    }
    let (b, c, d) = (a2 / a3, a1 / a3, a0 / a3);
    // y = t − b/3 gives t³ + p t + q = 0.
    let shift = b / 3.0;
    let p = c - b * shift;
    let q = shift * shift * shift * 2.0 - shift * c + d;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    // Pick the sign that avoids cancellation in u³.
    let u3 = {
        let plus = -q / 2.0 + disc;
        let minus = -q / 2.0 - disc;
        if plus.norm() >= minus.norm() {
            plus
        } else {
            minus
        }
    };
    let omega = C64::new(-0.5, 3.0f64.sqrt() / 2.0);
    let mut roots = [C64::new(0.0, 0.0); 3];
    if u3.norm() == 0.0 {
        roots = [-shift; 3];
    } else {
        let u = u3.cbrt();
        let mut rot = C64::new(1.0, 0.0);
        for root in &mut roots {
            let uk = u * rot;
            *root = uk - p / (uk * 3.0) - shift;
            rot *= omega;
        }
    }
    let coeffs = [C64::new(1.0, 0.0), b, c, d];
    for root in &mut roots {
        polish(&coeffs, root);
    }
    let is_real = roots.map(|z| z.im.abs() <= REAL_TOL * (1.0 + z.norm()));
    Ok(CubicRoots { roots, is_real })
}

/// Newton steps that are kept only while they shrink the residual.
fn polish(coeffs: &[C64; 4], root: &mut C64) {
    let mut res = eval(coeffs, *root).norm();
    for _ in 0..4 {
        if res == 0.0 {
            return;
        }
        let dp = eval_derivative(coeffs, *root);
        if dp.norm() == 0.0 {
            return;
        }
        let candidate = *root - eval(coeffs, *root) / dp;
        let cres = eval(coeffs, candidate).norm();
        if cres < res {
            *root = candidate;
            res = cres;
        } else {
            return;
        }
    }
}

/// `|p(y)|` for the original (unnormalised) coefficients.
pub fn residual(coeffs: [C64; 4], y: C64) -> f64 {
    eval(&coeffs, y).norm()
}
