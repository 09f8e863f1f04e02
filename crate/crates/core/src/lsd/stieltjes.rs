//! The four algebraic branches of the Stieltjes transform of `F_c`.
//!
//! Every branch solves `(1 − c²m²)(c + czm − 1)² = 1`. They are
//!
//! ```text
//! m₁,₂ = [ (a + s) ± sqrt((a − 1/s)² − y₀²/(1+y₀)) ] / (2c)
//! m₃,₄ = [ (a − s) ± sqrt((a + 1/s)² − y₀²/(1+y₀)) ] / (2c)
//! ```
//!
//! with `a = (1−c)/z`, `s = sqrt(1+y₀)` and `y₀` the root of largest modulus
//! of `z²y³ − ((1−c)² − z²)y² − 4y − 4 = 0`. Square roots take the value
//! with positive imaginary part.
//!
//! The genuine transform is identified by `Im m > 0` (for `c < 1`) or
//! `Im(m + (c−1)/(cz)) > 0` (for `c > 1`). Away from the real axis, or above
//! the interior of the support, two branches can pass that test, so the
//! selection also requires the Nevanlinna bound `|m̃|² ≤ μ·Im m̃ / Im z`
//! (Cauchy–Schwarz for a measure of mass `μ`). When both candidates satisfy
//! it as well, the branch is followed down from far above the axis, where
//! the choice is unambiguous.

use super::{boundary, y0_cubic, UNIT_RATIO_TOL};
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Square root with nonnegative imaginary part; on the real axis the
/// nonnegative real root.
pub fn sqrt_upper(w: C64) -> C64 {
    let s = w.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

/// Four branch values at one point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StieltjesEvaluation {
    pub z: C64,
    pub c: f64,
    pub y0: C64,
    pub branches: [C64; 4],
}

impl StieltjesEvaluation {
    /// `|(1 − c²m²)(c + czm − 1)² − 1|` for branch `i`.
    pub fn residual(&self, i: usize) -> f64 {
        quartic_residual(self.branches[i], self.z, self.c)
    }

    pub fn residuals(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.residual(i))
    }

    /// `m` for `c < 1`, `m + (c−1)/(cz)` otherwise: the transform of the
    /// continuous part.
    pub fn continuous_part(&self, i: usize) -> C64 {
        let m = self.branches[i];
        if self.c < 1.0 - UNIT_RATIO_TOL {
            m
        } else {
            m + (self.c - 1.0) / (self.z * self.c)
        }
    }

    /// Imaginary part of the selection quantity for branch `i`.
    pub fn criterion(&self, i: usize) -> f64 {
        self.continuous_part(i).im
    }

    /// Branches whose selection quantity has positive imaginary part.
    pub fn positive_branches(&self) -> impl Iterator<Item = usize> + '_ {
        (0..4).filter(move |&i| self.criterion(i) > 0.0)
    }

    /// Whether branch `i` lies in the disk `|m̃ − iμ/(2v)| ≤ μ/(2v)` that
    /// contains every Stieltjes transform of a measure of mass `μ`.
    pub fn within_nevanlinna_disk(&self, i: usize) -> bool {
        let mass = if self.c > 1.0 { 1.0 / self.c } else { 1.0 };
        let mt = self.continuous_part(i);
        let v = self.z.im;
        mt.im > 0.0 && mt.norm_sqr() <= mass * mt.im / v * (1.0 + 1e-9)
    }

    fn candidates(&self) -> impl Iterator<Item = usize> + '_ {
        self.positive_branches()
            .filter(move |&i| self.within_nevanlinna_disk(i))
    }
}

pub fn quartic_residual(m: C64, z: C64, c: f64) -> f64 {
    let cm = m * c;
    let lin = cm * z + (c - 1.0);
    ((C64::new(1.0, 0.0) - cm * cm) * lin * lin - 1.0).norm()
}

/// Evaluates all four branches at `z` (`Im z > 0`).
pub fn stieltjes_roots(z: C64, c: f64) -> Result<StieltjesEvaluation> {
    if !(z.im > 0.0) {
        return Err(Error::HalfPlane { im: z.im });
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Config("ratio c must be positive and finite"));
    }
    let roots = y0_cubic(z, c)?;
    // Largest modulus, skipping y = −1 (a root when c = 1) where s would vanish.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| roots.roots[j].norm().total_cmp(&roots.roots[i].norm()));
    let y0 = order
        .iter()
        .map(|&i| roots.roots[i])
        .find(|y| (y + 1.0).norm() > 1e-6 * (1.0 + y.norm()))
        .unwrap_or(roots.roots[order[0]]);
    let s = sqrt_upper(y0 + 1.0);
    let a = C64::new(1.0 - c, 0.0) / z;
    let tail = y0 * y0 / (y0 + 1.0);
    let q12 = sqrt_upper((a - s.inv()).powi(2) - tail);
    let q34 = sqrt_upper((a + s.inv()).powi(2) - tail);
    let two_c = 2.0 * c;
    let branches = [
        (a + s + q12) / two_c,
        (a + s - q12) / two_c,
        (a - s + q34) / two_c,
        (a - s - q34) / two_c,
    ];
    Ok(StieltjesEvaluation { z, c, y0, branches })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SelectionMethod {
    /// A single branch passed the positivity and disk tests at `z`.
    Direct,
    /// Identified by following the branch down from far above the axis.
    Continuation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchChoice {
    pub index: usize,
    pub value: C64,
    pub method: SelectionMethod,
}

const CONTINUATION_STEPS: f64 = 400.0;

/// Picks the branch that is the Stieltjes transform of `F_c`.
pub fn select_branch(ev: &StieltjesEvaluation) -> Result<BranchChoice> {
    let mut direct = ev.candidates();
    if let (Some(i), None) = (direct.next(), direct.next()) {
        return Ok(BranchChoice {
            index: i,
            value: ev.branches[i],
            method: SelectionMethod::Direct,
        });
    }
    let tracked = continue_from_far_field(ev)?;
    let index = nearest(&ev.branches, tracked).0;
    if ev.criterion(index) <= 0.0 {
        return Err(Error::BranchAmbiguity {
            count: ev.positive_branches().count(),
        });
    }
    Ok(BranchChoice {
        index,
        value: ev.branches[index],
        method: SelectionMethod::Continuation,
    })
}

/// Index of the branch closest to `target`, with its distance and the
/// distance to the runner-up.
fn nearest(branches: &[C64; 4], target: C64) -> (usize, f64, f64) {
    let mut best = (0, f64::INFINITY, f64::INFINITY);
    for (i, m) in branches.iter().enumerate() {
        let dist = (m - target).norm();
        if dist < best.1 {
            best = (i, dist, best.1);
        } else if dist < best.2 {
            best.2 = dist;
        }
    }
    best
}

fn continue_from_far_field(ev: &StieltjesEvaluation) -> Result<C64> {
    let (u, v_target, c) = (ev.z.re, ev.z.im, ev.c);
    let d = boundary(c)?;
    let start = (4.0 * (d + u.abs())).max(4.0).max(v_target);
    let far = stieltjes_roots(C64::new(u, start), c)?;
    let mut current = {
        let mut it = far.candidates();
        match (it.next(), it.next()) {
            (Some(i), None) => far.branches[i],
            // m(z) ≈ −1/z far from the support.
            _ => far.branches[nearest(&far.branches, -far.z.inv()).0],
        }
    };
    let base_ratio = (v_target / start).powf(1.0 / CONTINUATION_STEPS);
    let mut ratio = base_ratio;
    let mut v = start;
    while v > v_target {
        let next_v = (v * ratio).max(v_target);
        let step = stieltjes_roots(C64::new(u, next_v), c)?;
        let (i, d1, d2) = nearest(&step.branches, current);
        if d1 < 0.5 * d2 {
            current = step.branches[i];
            v = next_v;
            ratio = base_ratio;
        } else {
            ratio = ratio.sqrt();
            if 1.0 - ratio < 1e-12 {
                return Err(Error::BranchAmbiguity { count: 2 });
            }
        }
    }
    Ok(current)
}

/// The Stieltjes transform of `F_c` at `z`.
pub fn stieltjes(z: C64, c: f64) -> Result<C64> {
    select_branch(&stieltjes_roots(z, c)?).map(|b| b.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_convention() {
        assert_eq!(sqrt_upper(C64::new(-4.0, 0.0)), C64::new(0.0, 2.0));
        assert_eq!(sqrt_upper(C64::new(-4.0, -0.0)), C64::new(0.0, 2.0));
        assert_eq!(sqrt_upper(C64::new(4.0, 0.0)), C64::new(2.0, 0.0));
        let s = sqrt_upper(C64::new(1.0, -1.0));
        assert!(s.im > 0.0 && (s * s - C64::new(1.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn lower_half_plane_rejected() {
        assert_eq!(
            stieltjes_roots(C64::new(1.0, 0.0), 0.5),
            Err(Error::HalfPlane { im: 0.0 })
        );
        assert!(stieltjes_roots(C64::new(1.0, -0.5), 0.5).is_err());
    }

    #[test]
    fn residual_example() {
        let ev = stieltjes_roots(C64::new(0.5, 0.1), 0.2).unwrap();
        for r in ev.residuals() {
            assert!(r <= 1e-8, "{r}");
        }
    }

    #[test]
    fn unit_ratio_skips_degenerate_root() {
        let ev = stieltjes_roots(C64::new(-3.0, 1.0), 1.0).unwrap();
        assert!(ev.residuals().iter().all(|r| *r < 1e-10));
    }

    #[test]
    fn far_field_asymptotics() {
        for c in [0.2, 2.5] {
            let z = C64::new(0.3, 200.0);
            let m = stieltjes(z, c).unwrap();
            assert!((m + z.inv()).norm() < 1e-3 / z.norm());
        }
    }
}
