//! Dense Hermitian eigenvalues and empirical spectral distributions.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::matrices::HermitianMatrix;
use crate::{Error, Result};

#[cfg(any(test, feature = "oracle"))]
pub mod inertia;
pub mod tridiag;

pub use tridiag::{ql_eigenvalues, tridiagonalize, Tridiagonal, MAX_SWEEPS};

/// Real eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the values; rejects NaN and infinities.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("spectrum values must be finite"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Spectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max |λ|`, the spectral norm for a Hermitian source.
    pub fn spectral_radius(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(a), Some(b)) => a.abs().max(b.abs()),
            _ => 0.0,
        }
    }

    /// Replaces every `|λ| ≤ tol` by an exact zero.
    pub fn snap_zeros(&self, tol: f64) -> Spectrum {
        let values = self
            .values
            .iter()
            .map(|&v| if v.abs() <= tol { 0.0 } else { v })
            .collect();
        Spectrum { values }
    }
}

/// All eigenvalues of `m`, ascending.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<Spectrum> {
    let t = tridiagonalize(m);
    Spectrum::new(ql_eigenvalues(&t)?)
}

/// `(λ_min, λ_max)`.
pub fn extreme(s: &Spectrum) -> Result<(f64, f64)> {
    match (s.values.first(), s.values.last()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => Err(Error::EmptyInput),
    }
}

/// Step CDF `F_n(x) = #{λ_j ≤ x} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSpectralDistribution {
    sorted: Vec<f64>,
}

pub fn esd(s: &Spectrum) -> Result<EmpiricalSpectralDistribution> {
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(EmpiricalSpectralDistribution {
        sorted: s.values.clone(),
    })
}

impl EmpiricalSpectralDistribution {
    pub fn atoms(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `F_n(x)`, right-continuous.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// `F_n(x⁻)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.sorted.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exchange_matrix() {
        let m = HermitianMatrix::from_upper(2, |i, j| {
            if i == j {
                C64::new(0.0, 0.0)
            } else {
                C64::new(1.0, 0.0)
            }
        });
        let s = hermitian_eigenvalues(&m).unwrap();
        assert_abs_diff_eq!(s.values()[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.values()[1], 1.0, epsilon = 1e-15);
        assert_eq!(extreme(&s).unwrap(), (s.values()[0], s.values()[1]));
    }

    #[test]
    fn diagonal_input() {
        let s =
            hermitian_eigenvalues(&HermitianMatrix::from_real_diagonal(&[3.0, -2.0, 5.0])).unwrap();
        assert_eq!(s.values(), &[-2.0, 3.0, 5.0]);
    }

    #[test]
    fn extremes() {
        let s = Spectrum::new(alloc::vec![1.0, -1.0, 0.0]).unwrap();
        assert_eq!(extreme(&s).unwrap(), (-1.0, 1.0));
        assert_eq!(
            extreme(&Spectrum::new(alloc::vec![4.0]).unwrap()).unwrap(),
            (4.0, 4.0)
        );
        assert_eq!(
            extreme(&Spectrum::new(alloc::vec![]).unwrap()),
            Err(Error::EmptyInput)
        );
    }

    #[test]
    fn esd_steps() {
        let f = esd(&Spectrum::new(alloc::vec![-1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(f.cdf(0.0), 0.5);
        assert_eq!(f.cdf(1.0), 1.0);
        assert_eq!(f.cdf(-2.0), 0.0);
        let g = esd(&Spectrum::new(alloc::vec![2.0, 2.0, 2.0]).unwrap()).unwrap();
        assert_eq!(g.cdf(2.0 - 1e-12), 0.0);
        assert_eq!(g.cdf(2.0), 1.0);
        assert_eq!(g.cdf_left(2.0), 0.0);
        assert!(esd(&Spectrum::new(alloc::vec![]).unwrap()).is_err());
    }

    #[test]
    fn rejects_nan() {
        assert!(Spectrum::new(alloc::vec![f64::NAN]).is_err());
    }

    #[test]
    fn snap() {
        let s = Spectrum::new(alloc::vec![-1e-12, 3.0, 2e-13])
            .unwrap()
            .snap_zeros(1e-10);
        assert_eq!(s.values(), &[0.0, 0.0, 3.0]);
    }
}
