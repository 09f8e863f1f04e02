//! Oracles shared by the integration tests. Nothing here calls into the
//! crate's own root finders or quadrature.
#![allow(dead_code)]

use lagspec_core::eig::Tridiagonal;
use std::f64::consts::PI;

/// `y³ − ((1−c)² − x²)/x²·y² − (4/x²)y − 4/x²`.
pub fn y0_poly(y: f64, x: f64, c: f64) -> f64 {
    let x2 = x * x;
    let b = ((1.0 - c) * (1.0 - c) - x2) / x2;
    ((y - b) * y - 4.0 / x2) * y - 4.0 / x2
}

/// Largest real root of the y₀ cubic: walk down from the Cauchy bound to
/// the first sign change, then bisect.
pub fn y0_bisect(x: f64, c: f64) -> f64 {
    let x2 = x * x;
    let b = ((1.0 - c) * (1.0 - c) - x2) / x2;
    let r = 1.0 + b.abs().max(4.0 / x2);
    let steps = 400_000;
    let h = 2.0 * r / steps as f64;
    let mut hi = r;
    let mut lo = r - h;
    while y0_poly(lo, x, c) > 0.0 {
        hi = lo;
        lo -= h;
        assert!(lo > -r - h, "no sign change");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if y0_poly(mid, x, c) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Argument of the square root in the textbook density formula.
pub fn density_argument(x: f64, c: f64) -> f64 {
    let y = y0_bisect(x.abs(), c);
    let s = (1.0 + y).sqrt();
    y * y / (1.0 + y) - ((1.0 - c) / x.abs() + 1.0 / s).powi(2)
}

/// The density formula evaluated literally, without rearrangement.
pub fn literal_density(x: f64, c: f64) -> f64 {
    density_argument(x, c).max(0.0).sqrt() / (2.0 * c * PI)
}

/// Tanh–sinh quadrature on `[a, b]`; endpoint singularities of the
/// integrable kind are harmless because the nodes never touch `a` or `b`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let h = 1.0 / 128.0;
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for k in -(6 * 128)..=(6 * 128) {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
        let xi = u.tanh();
        // half·(1 − |tanh u|), computed without cancellation.
        let gap = half / (u.abs().exp() * u.cosh());
        let x = if xi < 0.0 { a + gap } else { b - gap };
        if gap > 0.0 && x > a && x < b {
            sum += w * f(x);
        }
    }
    sum * h * half
}

// Sturm count: number of eigenvalues of the tridiagonal below x.
pub fn sturm_count(t: &Tridiagonal, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 0..t.diag.len() {
        let e2 = if i == 0 {
            0.0
        } else {
            t.offdiag[i - 1] * t.offdiag[i - 1]
        };
        q = t.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (t.diag[i].abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of `t` in ascending order by bisection on the Sturm count.
pub fn sturm_eigenvalues(t: &Tridiagonal) -> Vec<f64> {
    let n = t.diag.len();
    let r = (0..n)
        .map(|i| {
            let left = if i > 0 { t.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { t.offdiag[i].abs() } else { 0.0 };
            t.diag[i].abs() + left + right
        })
        .fold(0.0, f64::max)
        + 1.0;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-r, r);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if sturm_count(t, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}
