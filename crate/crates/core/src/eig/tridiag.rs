use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::matrices::HermitianMatrix;
use crate::{Error, Result, C64};

/// Per-eigenvalue cap on implicit QL sweeps.
pub const MAX_SWEEPS: usize = 50;

/// Real symmetric tridiagonal matrix: `diag[i]` and `offdiag[i]` coupling `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

/// Unitary Householder reduction `Q* A Q = T`. The complex subdiagonal that
/// results is rotated onto the nonnegative reals by a diagonal unitary, which
/// leaves the spectrum unchanged.
pub fn tridiagonalize(m: &HermitianMatrix) -> Tridiagonal {
    let n = m.order();
    let mut a: Vec<C64> = m.as_slice().to_vec();
    let mut sub = alloc::vec![0.0; n.saturating_sub(1)];
    let mut v = alloc::vec![C64::new(0.0, 0.0); n];
    let mut p = alloc::vec![C64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(1) {
        let len = n - k - 1;
        let x0 = a[(k + 1) * n + k];
        let tail: f64 = (k + 2..n).map(|i| a[i * n + k].norm_sqr()).sum();
        let xnorm = (x0.norm_sqr() + tail).sqrt();
        if tail == 0.0 {
            // Already reduced in this column.
            sub[k] = x0.norm();
            continue;
        }
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        // v = x − αe₁, normalised.
        for (idx, i) in (k + 1..n).enumerate() {
            v[idx] = a[i * n + k];
        }
        v[0] -= alpha;
        let vnorm = v[..len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v[..len] {
            *z /= vnorm;
        }
        // p = A₂₂ v, K = v* p, w = p − K v, A₂₂ ← A₂₂ − 2(v w* + w v*).
        for (r, i) in (k + 1..n).enumerate() {
            let row = &a[i * n + k + 1..i * n + n];
            p[r] = row
                .iter()
                .zip(&v[..len])
                .fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x * y);
        }
        let kappa = v[..len]
            .iter()
            .zip(&p[..len])
            .fold(0.0, |acc, (x, y)| acc + (x.conj() * y).re);
        for r in 0..len {
            p[r] -= v[r] * kappa;
        }
        for (r, i) in (k + 1..n).enumerate() {
            let (vr, wr) = (v[r], p[r]);
            let row = &mut a[i * n + k + 1..i * n + n];
            for (s, entry) in row.iter_mut().enumerate() {
                *entry -= (vr * p[s].conj() + wr * v[s].conj()) * 2.0;
            }
        }
        // Column k below the subdiagonal is now (α, 0, …, 0).
        sub[k] = alpha.norm();
        for i in k + 1..n {
            a[i * n + k] = C64::new(0.0, 0.0);
            a[k * n + i] = C64::new(0.0, 0.0);
        }
    }
    let diag = (0..n).map(|i| a[i * n + i].re).collect();
    Tridiagonal { diag, offdiag: sub }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson-type shifts. An off-diagonal is dropped when
/// `|e| ≤ ε(|d_i| + |d_{i+1}|)` or `|e| ≤ ε‖T‖`. Output is unsorted.
pub fn ql_eigenvalues(t: &Tridiagonal) -> Result<Vec<f64>> {
    let n = t.diag.len();
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    e.push(0.0);
    // Gershgorin bound on ‖T‖. Off-diagonals below ε‖T‖ are roundoff, which
    // the relative test alone never sees inside clusters of near-zero values.
    let norm = (0..n).fold(0.0f64, |acc, i| {
        let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
        acc.max(d[i].abs() + e[i].abs() + left)
    });
    let floor = f64::EPSILON * norm;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd
                    || e[m].abs() <= floor
                    || e[m].abs() < f64::MIN_POSITIVE
                {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps == MAX_SWEEPS {
                return Err(Error::SolverFailure { iterations: sweeps });
            }
            sweeps += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_preserves_trace_and_frobenius() {
        let m = HermitianMatrix::from_upper(5, |i, j| {
            C64::new((i + 2 * j) as f64, (j as f64 - i as f64) * 0.5)
        });
        let t = tridiagonalize(&m);
        let trace: f64 = t.diag.iter().sum();
        assert!((trace - m.trace()).abs() < 1e-12);
        let fro2: f64 = t.diag.iter().map(|x| x * x).sum::<f64>()
            + 2.0 * t.offdiag.iter().map(|x| x * x).sum::<f64>();
        assert!((fro2.sqrt() - m.frobenius_norm()).abs() < 1e-10);
    }

    #[test]
    fn ql_on_known_tridiagonal() {
        // 1-2-1 stencil: eigenvalues 2 − 2cos(kπ/(n+1)).
        let n = 8;
        let t = Tridiagonal {
            diag: alloc::vec![2.0; n],
            offdiag: alloc::vec![-1.0; n - 1],
        };
        let mut ev = ql_eigenvalues(&t).unwrap();
        ev.sort_by(f64::total_cmp);
        for (k, lam) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * (core::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((lam - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn already_diagonal() {
        let t = Tridiagonal {
            diag: alloc::vec![3.0, -1.0],
            offdiag: alloc::vec![0.0],
        };
        assert_eq!(ql_eigenvalues(&t).unwrap(), alloc::vec![3.0, -1.0]);
    }
}
