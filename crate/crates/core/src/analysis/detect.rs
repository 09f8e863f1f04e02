//! Factor-order estimation by counting eigenvalues of `Φ_n(τ)` that leave
//! the noise-only support.

use alloc::vec::Vec;

use crate::eig::{hermitian_eigenvalues, Spectrum};
use crate::lsd::{boundary, MarchenkoPastur};
use crate::matrices::{build_phi_tau, simulate_factor_panel, FactorModelConfig, ObservationPanel};
use crate::noise::{DistributionKind, SimulationConfig};
use crate::{Error, Result};

/// Relative margin `δ₀` on the Marčenko–Pastur edge and absolute margin
/// `δ₁` on `d(c_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Margins {
    pub delta0: f64,
    pub delta1: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Margins {
            delta0: 0.15,
            delta1: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectionReport {
    /// `N(τ)` for `τ = 0, …, τ_max`.
    pub counts: Vec<usize>,
    pub k_hat: usize,
    pub q_hat: usize,
    /// `(1 + √c_n)²(1 + δ₀)`.
    pub lag0_threshold: f64,
    /// `d(c_n) + δ₁`.
    pub lag_threshold: f64,
    pub margins: Margins,
    pub ratio: f64,
}

/// A factor model family indexed by seed: seed `s` draws fresh loadings and
/// a fresh panel, both from `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectionScenario {
    pub n: usize,
    #[cfg_attr(feature = "serde", serde(rename = "T"))]
    pub t: usize,
    pub tau_max: usize,
    pub k: usize,
    pub q: usize,
    /// Euclidean norm of every loading column.
    pub strength: f64,
    pub dist: DistributionKind,
}

impl DetectionScenario {
    pub fn model(&self, seed: u64) -> Result<FactorModelConfig> {
        let base = SimulationConfig::new(self.n, self.t, self.tau_max)?;
        let mut fc = if self.k == 0 {
            FactorModelConfig::noise_only(base, self.dist)
        } else {
            FactorModelConfig::with_random_loadings(base, self.k, self.q, self.strength, seed)
        };
        fc.noise_dist = self.dist;
        Ok(fc)
    }

    pub fn panel(&self, seed: u64) -> Result<ObservationPanel> {
        simulate_factor_panel(&self.model(seed)?, seed)
    }

    pub fn ratio(&self) -> f64 {
        self.n as f64 / self.t as f64
    }

    pub fn spectra(&self, seed: u64) -> Result<Vec<Spectrum>> {
        phi_spectra(&self.panel(seed)?, self.tau_max)
    }
}

/// Spectra of `Φ_n(τ)` for `τ = 0, …, τ_max`.
pub fn phi_spectra(obs: &ObservationPanel, tau_max: usize) -> Result<Vec<Spectrum>> {
    if tau_max == 0 {
        return Err(Error::Config("tau_max must be at least 1"));
    }
    let t = obs.sample_length();
    if t + tau_max > obs.cols() {
        return Err(Error::Dimension {
            needed: t + tau_max,
            available: obs.cols(),
        });
    }
    (0..=tau_max)
        .map(|tau| hermitian_eigenvalues(&build_phi_tau(obs, tau)?))
        .collect()
}

/// Applies the counting rule to precomputed spectra (`spectra[τ]` of `Φ_n(τ)`)
/// at ratio `c = n/T`.
pub fn classify_orders(spectra: &[Spectrum], c: f64, margins: Margins) -> Result<DetectionReport> {
    if spectra.len() < 2 {
        return Err(Error::Config("need spectra for lags 0 and at least 1"));
    }
    let lag0_threshold = MarchenkoPastur::new(c)?.edges().1 * (1.0 + margins.delta0);
    let lag_threshold = boundary(c)? + margins.delta1;
    let counts: Vec<usize> = spectra
        .iter()
        .enumerate()
        .map(|(tau, s)| {
            let v = s.values().iter();
            if tau == 0 {
                v.filter(|&&x| x > lag0_threshold).count()
            } else {
                v.filter(|&&x| x.abs() > lag_threshold).count()
            }
        })
        .collect();
    let q_hat = (1..counts.len())
        .rev()
        .find(|&tau| counts[tau] > 0)
        .unwrap_or(0);
    // Nearest integer, halves rounded up.
    let k_hat = (2 * counts[0] + q_hat + 1) / (2 * (q_hat + 1));
    Ok(DetectionReport {
        counts,
        k_hat,
        q_hat,
        lag0_threshold,
        lag_threshold,
        margins,
        ratio: c,
    })
}

/// `N(0)` counts eigenvalues of `Φ_n(0)` above the inflated MP edge; for
/// `τ ≥ 1`, `N(τ)` counts eigenvalues of `Φ_n(τ)` outside `±(d(c_n) + δ₁)`.
/// `q̂` is the last lag with an outlier and `k̂ = round(N(0)/(q̂+1))`.
pub fn detect_orders(
    obs: &ObservationPanel,
    tau_max: usize,
    margins: Margins,
) -> Result<DetectionReport> {
    let spectra = phi_spectra(obs, tau_max)?;
    classify_orders(
        &spectra,
        obs.rows() as f64 / obs.sample_length() as f64,
        margins,
    )
}
