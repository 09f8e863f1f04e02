//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
#![allow(clippy::excessive_precision)]

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Weights of the embedded 7-point Gauss rule (odd Kronrod nodes).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    Segment { a, b, value, error }
}

/// `∫_a^b f`. Bisects the worst segment until the summed error estimate
/// drops below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    let (result, converged) = adapt(f, a, b, opts);
    if converged {
        Ok(result)
    } else {
        Err(Error::Quadrature {
            error_estimate: result.error,
        })
    }
}

/// Like [`integrate`] but returns the last estimate even when the
/// subdivision budget runs out.
pub fn integrate_estimate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> QuadResult {
    adapt(f, a, b, opts).0
}

fn adapt<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> (QuadResult, bool) {
    if a == b {
        return (
            QuadResult {
                value: 0.0,
                error: 0.0,
                evaluations: 0,
            },
            true,
        );
    }
    let mut segments: Vec<Segment> = alloc::vec![kronrod(&mut f, a, b)];
    let mut evaluations = 15;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return (
                QuadResult {
                    value,
                    error,
                    evaluations,
                },
                true,
            );
        }
        if segments.len() >= opts.max_intervals {
            return (
                QuadResult {
                    value,
                    error,
                    evaluations,
                },
                false,
            );
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a.min(s.b) || mid >= s.a.max(s.b) {
            // Interval below floating-point resolution; keep its estimate.
            segments.push(Segment { error: 0.0, ..s });
            continue;
        }
        segments.push(kronrod(&mut f, s.a, mid));
        segments.push(kronrod(&mut f, mid, s.b));
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_exact() {
        let r = integrate(
            |x| x.powi(5) - 3.0 * x * x,
            -1.0,
            2.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, 10.5 - 9.0, epsilon = 1e-13);
    }

    #[test]
    fn sqrt_edge_singularity() {
        let r = integrate(
            |x| (1.0 - x * x).max(0.0).sqrt(),
            -1.0,
            1.0,
            QuadOptions {
                abs_tol: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, core::f64::consts::FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn reversed_limits() {
        let r = integrate(
            |x| x.sin(),
            core::f64::consts::PI,
            0.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, -2.0, epsilon = 1e-13);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_intervals: 3,
        };
        assert!(matches!(
            integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, opts),
            Err(Error::Quadrature { .. })
        ));
    }
}
