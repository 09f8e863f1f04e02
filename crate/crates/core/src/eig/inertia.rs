//! Slow eigenvalue oracle: bisection on the negative inertia of `A − σI`.
//!
//! The count `#{λ < σ}` comes from the signs of the pivots of an unpivoted
//! `LDL*` factorisation of the full Hermitian matrix (Sylvester's law of
//! inertia), so nothing here shares code with the Householder/QL path.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::matrices::HermitianMatrix;
use crate::C64;

/// Number of eigenvalues strictly below `sigma`.
pub fn count_below(m: &HermitianMatrix, sigma: f64) -> usize {
    let n = m.order();
    let scale = m.norm_inf().max(1.0);
    let tiny = f64::EPSILON * f64::EPSILON * scale;
    let mut l = alloc::vec![C64::new(0.0, 0.0); n * n];
    let mut d: Vec<f64> = alloc::vec![0.0; n];
    let mut negatives = 0;
    for k in 0..n {
        let mut dk = m.get(k, k).re - sigma;
        for j in 0..k {
            dk -= l[k * n + j].norm_sqr() * d[j];
        }
        if dk.abs() < tiny {
            dk = -tiny;
        }
        d[k] = dk;
        if dk < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let mut s = m.get(i, k);
            for j in 0..k {
                s -= l[i * n + j] * l[k * n + j].conj() * d[j];
            }
            l[i * n + k] = s / dk;
        }
    }
    negatives
}

/// All eigenvalues, ascending, each bisected to absolute width `tol`.
pub fn bisection_eigenvalues(m: &HermitianMatrix, tol: f64) -> Vec<f64> {
    let n = m.order();
    let r = m.norm_inf() + 1.0;
    (0..n)
        .map(|k| {
            // Smallest σ with count_below(σ) > k is λ_k.
            let (mut lo, mut hi) = (-r, r);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if count_below(m, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_on_diagonal() {
        let m = HermitianMatrix::from_real_diagonal(&[3.0, -2.0, 5.0]);
        assert_eq!(count_below(&m, -3.0), 0);
        assert_eq!(count_below(&m, 0.0), 1);
        assert_eq!(count_below(&m, 4.0), 2);
        assert_eq!(count_below(&m, 6.0), 3);
        let ev = bisection_eigenvalues(&m, 1e-13);
        assert!(
            (ev[0] + 2.0).abs() < 1e-12
                && (ev[1] - 3.0).abs() < 1e-12
                && (ev[2] - 5.0).abs() < 1e-12
        );
    }
}
