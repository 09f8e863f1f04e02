//! Seeded innovation panels.
//!
//! A panel holds `n × (T+τ)` i.i.d. draws `ε_{it}` with mean 0 and variance 1.
//! Column `k` is generated from its own ChaCha stream `(seed, k)`, so a panel
//! is bit-identical no matter how the columns are scheduled.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result, C64};

/// Stream ids at or above this value are reserved for factor draws.
pub(crate) const FACTOR_STREAM_BASE: u64 = 1 << 63;
/// Stream ids in `[LOADING_STREAM_BASE, FACTOR_STREAM_BASE)` are reserved for loadings.
pub(crate) const LOADING_STREAM_BASE: u64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationConfig {
    /// Dimension n.
    pub n: usize,
    /// Sample length T.
    #[cfg_attr(feature = "serde", serde(rename = "T"))]
    pub t: usize,
    /// Lag τ; the panel carries `T + τ` columns.
    pub tau: usize,
}

impl SimulationConfig {
    pub fn new(n: usize, t: usize, tau: usize) -> Result<Self> {
        let cfg = SimulationConfig { n, t, tau };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be positive"));
        }
        if self.t == 0 {
            return Err(Error::Config("T must be positive"));
        }
        if self.tau > self.t {
            return Err(Error::Config("tau must not exceed T"));
        }
        Ok(())
    }

    /// Dimension-to-sample ratio `c_n = n / T`.
    pub fn ratio(&self) -> f64 {
        self.n as f64 / self.t as f64
    }

    pub fn columns(&self) -> usize {
        self.t + self.tau
    }
}

/// Innovation law. Every variant has mean 0, `E|ε|² = 1` and a finite fourth moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DistributionKind {
    /// `(X + iY)/√2` with X, Y independent standard normals.
    #[default]
    ComplexGaussian,
    RealGaussian,
    /// ±1 with equal probability.
    Rademacher,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 3] = [
        DistributionKind::ComplexGaussian,
        DistributionKind::RealGaussian,
        DistributionKind::Rademacher,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistributionKind::ComplexGaussian => "complex-gaussian",
            DistributionKind::RealGaussian => "real-gaussian",
            DistributionKind::Rademacher => "rademacher",
        }
    }

    /// Population mean.
    pub fn mean(self) -> C64 {
        C64::new(0.0, 0.0)
    }

    /// Population `E|ε|²`.
    pub fn variance(self) -> f64 {
        match self {
            // E(Re ε)² + E(Im ε)² = 1/2 + 1/2 for the complex law.
            DistributionKind::ComplexGaussian => 1.0,
            DistributionKind::RealGaussian => 1.0,
            DistributionKind::Rademacher => 1.0,
        }
    }

    /// Population `E|ε|⁴`.
    pub fn fourth_moment(self) -> f64 {
        match self {
            // |ε|² ~ Exp(1), so E|ε|⁴ = 2.
            DistributionKind::ComplexGaussian => 2.0,
            DistributionKind::RealGaussian => 3.0,
            DistributionKind::Rademacher => 1.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> C64 {
        match self {
            DistributionKind::ComplexGaussian => {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                C64::new(x, y) * core::f64::consts::FRAC_1_SQRT_2
            }
            DistributionKind::RealGaussian => C64::new(rng.sample(StandardNormal), 0.0),
            DistributionKind::Rademacher => {
                C64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)
            }
        }
    }

    /// Mean and standard deviation of `ε·1{|ε| ≤ level}`.
    pub fn truncated_moments(self, level: f64) -> (C64, f64) {
        // All three laws are symmetric, so truncation keeps the mean at 0.
        let mean = C64::new(0.0, 0.0);
        let second = match self {
            DistributionKind::ComplexGaussian => {
                // |ε|² ~ Exp(1): E[R·1{R ≤ C²}] = 1 − (1 + C²)e^{−C²}.
                let c2 = level * level;
                1.0 - (1.0 + c2) * (-c2).exp()
            }
            DistributionKind::RealGaussian => {
                // ∫_{−C}^{C} x²φ(x)dx = erf(C/√2) − 2Cφ(C).
                let pdf = (-0.5 * level * level).exp() / (2.0 * core::f64::consts::PI).sqrt();
                libm::erf(level * core::f64::consts::FRAC_1_SQRT_2) - 2.0 * level * pdf
            }
            DistributionKind::Rademacher => {
                if level >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        (mean, second.max(0.0).sqrt())
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DistributionKind::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or(Error::Config("unknown distribution"))
    }
}

/// RNG for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n × (T+τ)` innovations, stored row-major (`entries[i * cols + t]`).
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePanel {
    entries: Vec<C64>,
    pub config: SimulationConfig,
    pub dist: DistributionKind,
    pub seed: u64,
}

impl NoisePanel {
    /// Wraps existing data; `entries.len()` must equal `n·(T+τ)`.
    pub fn from_entries(
        config: SimulationConfig,
        dist: DistributionKind,
        seed: u64,
        entries: Vec<C64>,
    ) -> Result<Self> {
        config.validate()?;
        if entries.len() != config.n * config.columns() {
            return Err(Error::Config("entry count does not match n x (T + tau)"));
        }
        Ok(NoisePanel {
            entries,
            config,
            dist,
            seed,
        })
    }

    pub fn rows(&self) -> usize {
        self.config.n
    }

    pub fn cols(&self) -> usize {
        self.config.columns()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[C64] {
        let cols = self.cols();
        &self.entries[i * cols..(i + 1) * cols]
    }

    pub fn get(&self, i: usize, t: usize) -> C64 {
        self.entries[i * self.cols() + t]
    }

    /// Column `k` (0-based), i.e. `e_{k+1}`.
    pub fn column(&self, k: usize) -> Vec<C64> {
        (0..self.rows()).map(|i| self.get(i, k)).collect()
    }

    pub(crate) fn into_entries(self) -> Vec<C64> {
        self.entries
    }
}

/// Draws a panel; column `k` comes from stream `(seed, k)`.
pub fn sample_panel(
    config: SimulationConfig,
    dist: DistributionKind,
    seed: u64,
) -> Result<NoisePanel> {
    config.validate()?;
    let (n, cols) = (config.n, config.columns());
    let mut entries = alloc::vec![C64::new(0.0, 0.0); n * cols];
    for k in 0..cols {
        let mut rng = stream_rng(seed, k as u64);
        for i in 0..n {
            entries[i * cols + k] = dist.sample(&mut rng);
        }
    }
    Ok(NoisePanel {
        entries,
        config,
        dist,
        seed,
    })
}

/// Maps every entry to `(ε·1{|ε| ≤ C} − μ_C)/σ_C` using the population
/// moments of the truncated law.
pub fn preprocess(panel: &NoisePanel, level: f64) -> Result<NoisePanel> {
    if !(level > 0.0) {
        return Err(Error::Config("truncation level must be positive"));
    }
    let (mu, sigma) = panel.dist.truncated_moments(level);
    if !(sigma > 0.0) {
        return Err(Error::DegenerateTruncation { level });
    }
    let entries = panel
        .entries
        .iter()
        .map(|&e| {
            let kept = if e.norm() <= level {
                e
            } else {
                C64::new(0.0, 0.0)
            };
            (kept - mu) / sigma
        })
        .collect();
    Ok(NoisePanel {
        entries,
        ..panel.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, t: usize, tau: usize) -> SimulationConfig {
        SimulationConfig::new(n, t, tau).unwrap()
    }

    #[test]
    fn rademacher_panel_is_deterministic() {
        let a = sample_panel(cfg(2, 3, 1), DistributionKind::Rademacher, 7).unwrap();
        let b = sample_panel(cfg(2, 3, 1), DistributionKind::Rademacher, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.entries().len(), 8);
        assert!(a.entries().iter().all(|e| e.im == 0.0 && e.re.abs() == 1.0));
        let var = a.entries().iter().map(|e| e.norm_sqr()).sum::<f64>() / 8.0;
        assert_eq!(var, 1.0);
    }

    #[test]
    fn seeds_and_streams_differ() {
        let a = sample_panel(cfg(3, 5, 0), DistributionKind::ComplexGaussian, 1).unwrap();
        let b = sample_panel(cfg(3, 5, 0), DistributionKind::ComplexGaussian, 2).unwrap();
        assert_ne!(a, b);
        assert_ne!(a.column(0), a.column(1));
    }

    #[test]
    fn closed_form_moments() {
        for d in DistributionKind::ALL {
            assert_eq!(d.mean(), C64::new(0.0, 0.0));
            assert_eq!(d.variance(), 1.0);
            assert!(d.fourth_moment().is_finite());
            let (_, s) = d.truncated_moments(50.0);
            assert!((s - 1.0).abs() < 1e-15, "{d}: {s}");
        }
    }

    #[test]
    fn invalid_configs() {
        assert!(SimulationConfig::new(0, 3, 0).is_err());
        assert!(SimulationConfig::new(3, 0, 0).is_err());
        assert!(SimulationConfig::new(3, 3, 4).is_err());
        assert!(SimulationConfig::new(1, 1, 1).is_ok());
        assert!(sample_panel(
            SimulationConfig { n: 2, t: 2, tau: 5 },
            DistributionKind::Rademacher,
            0
        )
        .is_err());
    }

    #[test]
    fn rademacher_preprocess_is_identity() {
        let p = sample_panel(cfg(4, 6, 2), DistributionKind::Rademacher, 3).unwrap();
        let q = preprocess(&p, 2.0).unwrap();
        assert_eq!(p, q);
        assert_eq!(preprocess(&q, 2.0).unwrap(), q);
    }

    #[test]
    fn degenerate_truncation() {
        let p = sample_panel(cfg(2, 2, 0), DistributionKind::Rademacher, 3).unwrap();
        assert_eq!(
            preprocess(&p, 0.5),
            Err(Error::DegenerateTruncation { level: 0.5 })
        );
        assert!(preprocess(&p, 0.0).is_err());
    }

    #[test]
    fn real_gaussian_preprocess_bounded() {
        let p = sample_panel(cfg(30, 40, 1), DistributionKind::RealGaussian, 9).unwrap();
        let (mu, sigma) = DistributionKind::RealGaussian.truncated_moments(1.0);
        let bound = (1.0 + mu.norm()) / sigma;
        let q = preprocess(&p, 1.0).unwrap();
        assert!(q.entries().iter().all(|e| e.norm() <= bound));
    }

    #[test]
    fn parse_names() {
        for d in DistributionKind::ALL {
            assert_eq!(d.name().parse::<DistributionKind>().unwrap(), d);
        }
        assert!("cauchy".parse::<DistributionKind>().is_err());
    }
}
