//! ESD-versus-LSD diagnostics and Monte Carlo checks of the support edges.

mod detect;
mod verify;

pub use detect::{
    classify_orders, detect_orders, phi_spectra, DetectionReport, DetectionScenario, Margins,
};
pub use verify::{
    run_replicate, verify_extremes, ReplicateRecord, Tolerances, VerificationChecks,
    VerificationReport, VerificationSummary, NEAR_ZERO_REL,
};

use alloc::vec::Vec;

use crate::eig::{EmpiricalSpectralDistribution, Spectrum};
use crate::lsd::SpectralLaw;
use crate::{Error, Result};

/// Eigenvalues with `|λ| ≤ ZERO_SNAP · max|λ|` count as exact zeros when an
/// ESD is compared with a law that has an atom at the origin.
pub const ZERO_SNAP: f64 = 1e-8;

/// `sup_x |F_n(x) − F(x)|`, exact for a step function against a law that is
/// continuous except for an atom at 0.
///
/// Between consecutive atoms `F_n` is flat and `F` is monotone, so the
/// supremum is reached at an atom (from the right or the left) or at the
/// origin. Eigenvalues that are zero up to roundoff are snapped to 0 first.
pub fn kolmogorov_distance<L: SpectralLaw + ?Sized>(
    esd: &EmpiricalSpectralDistribution,
    law: &L,
) -> f64 {
    let atoms = esd.atoms();
    let snap = ZERO_SNAP * atoms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // Snapping is monotone, so the copy stays sorted.
    let ys: Vec<f64> = atoms
        .iter()
        .map(|&v| if v.abs() <= snap { 0.0 } else { v })
        .collect();
    let n = ys.len() as f64;
    let at_zero = core::iter::once(0.0);
    let mut sup = 0.0f64;
    let mut prev = f64::NAN;
    for x in ys.iter().copied().chain(at_zero) {
        if x == prev {
            continue;
        }
        prev = x;
        let right = ys.partition_point(|&v| v <= x) as f64 / n;
        let left = ys.partition_point(|&v| v < x) as f64 / n;
        sup = sup
            .max((right - law.cdf(x)).abs())
            .max((left - law.cdf_left(x)).abs());
    }
    sup
}

/// `sup_x |F(x) − G(x)|` for two step functions.
pub fn ks_two_sample(f: &EmpiricalSpectralDistribution, g: &EmpiricalSpectralDistribution) -> f64 {
    f.atoms()
        .iter()
        .chain(g.atoms())
        .map(|&x| (f.cdf(x) - g.cdf(x)).abs())
        .fold(0.0, f64::max)
}

/// `#{λ_j ∈ [a, b]}`.
pub fn count_in_interval(s: &Spectrum, a: f64, b: f64) -> Result<usize> {
    if !(a <= b) {
        return Err(Error::Interval { a, b });
    }
    let v = s.values();
    Ok(v.partition_point(|&x| x <= b) - v.partition_point(|&x| x < a))
}

/// Fraction of eigenvalues with `|λ| < eps`.
pub fn near_zero_fraction(s: &Spectrum, eps: f64) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    near_zero_count(s, eps) as f64 / s.len() as f64
}

pub fn near_zero_count(s: &Spectrum, eps: f64) -> usize {
    s.values().iter().filter(|v| v.abs() < eps).count()
}
