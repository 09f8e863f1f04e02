//! Repeated simulations of `M_n(τ)` checked against `±d(c_n)`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{count_in_interval, kolmogorov_distance, near_zero_count};
use crate::eig::{esd, extreme, hermitian_eigenvalues};
use crate::lsd::LsdModel;
use crate::matrices::build_m_tau;
use crate::noise::{sample_panel, DistributionKind, SimulationConfig};
use crate::{Error, Result};

/// Near-zero threshold relative to `‖M‖`.
pub const NEAR_ZERO_REL: f64 = 1e-8;

/// Thresholds that decide pass/fail.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerances {
    /// Bound on `|λ_max − d(c_n)|` and `|λ_min + d(c_n)|`.
    pub edge: f64,
    /// Probe intervals are `[d + lo, d + hi]` and their mirror images.
    pub probe: (f64, f64),
    /// Bound on the Kolmogorov distance to `F_{c_n}`.
    pub kolmogorov: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            edge: 0.15,
            probe: (0.2, 1.0),
            kolmogorov: 0.06,
        }
    }
}

/// Outcome of one seed. Numeric fields are `None` when the solver failed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReplicateRecord {
    pub seed: u64,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    /// Eigenvalues inside either probe interval.
    pub outliers: Option<usize>,
    /// `#{|λ| < 1e-8·‖M‖}`.
    pub near_zero: Option<usize>,
    pub kolmogorov: Option<f64>,
    pub error: Option<String>,
}

impl ReplicateRecord {
    fn failed(seed: u64, err: Error) -> Self {
        ReplicateRecord {
            seed,
            lambda_min: None,
            lambda_max: None,
            outliers: None,
            near_zero: None,
            kolmogorov: None,
            error: Some(err.to_string()),
        }
    }
}

/// Simulates one panel and measures it against `law` (built at `c_n`).
pub fn run_replicate(
    config: SimulationConfig,
    dist: DistributionKind,
    seed: u64,
    law: &LsdModel,
    probe: (f64, f64),
) -> ReplicateRecord {
    match measure(config, dist, seed, law, probe) {
        Ok(rec) => rec,
        Err(err) => ReplicateRecord::failed(seed, err),
    }
}

fn measure(
    config: SimulationConfig,
    dist: DistributionKind,
    seed: u64,
    law: &LsdModel,
    probe: (f64, f64),
) -> Result<ReplicateRecord> {
    let panel = sample_panel(config, dist, seed)?;
    let m = build_m_tau(&panel, config.tau)?;
    let spectrum = hermitian_eigenvalues(&m)?;
    let (lo, hi) = extreme(&spectrum)?;
    let d = law.boundary();
    let outliers = count_in_interval(&spectrum, d + probe.0, d + probe.1)?
        + count_in_interval(&spectrum, -d - probe.1, -d - probe.0)?;
    let near_zero = near_zero_count(&spectrum, NEAR_ZERO_REL * spectrum.spectral_radius());
    let ks = kolmogorov_distance(&esd(&spectrum)?, law);
    Ok(ReplicateRecord {
        seed,
        lambda_min: Some(lo),
        lambda_max: Some(hi),
        outliers: Some(outliers),
        near_zero: Some(near_zero),
        kolmogorov: Some(ks),
        error: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationChecks {
    pub extremes: bool,
    pub no_outliers: bool,
    pub kolmogorov: bool,
}

/// Aggregates over the successful records. Every field is an exact count,
/// maximum or minimum, or a mean in seed order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationSummary {
    pub reps: usize,
    pub failures: usize,
    pub ratio: f64,
    pub boundary: f64,
    pub mean_lambda_max: f64,
    pub mean_lambda_min: f64,
    pub max_upper_deviation: f64,
    pub max_lower_deviation: f64,
    pub total_outliers: usize,
    pub min_near_zero: usize,
    pub mean_kolmogorov: f64,
    pub max_kolmogorov: f64,
    pub checks: VerificationChecks,
    pub passed: bool,
}

impl VerificationSummary {
    pub fn from_records(
        records: &[ReplicateRecord],
        ratio: f64,
        boundary: f64,
        tol: &Tolerances,
    ) -> Self {
        let ok: Vec<&ReplicateRecord> = records.iter().filter(|r| r.error.is_none()).collect();
        let count = ok.len().max(1) as f64;
        let mean =
            |f: &dyn Fn(&ReplicateRecord) -> f64| ok.iter().map(|r| f(r)).sum::<f64>() / count;
        let max = |f: &dyn Fn(&ReplicateRecord) -> f64| ok.iter().map(|r| f(r)).fold(0.0, f64::max);
        let hi = |r: &ReplicateRecord| r.lambda_max.unwrap_or(f64::NAN);
        let lo = |r: &ReplicateRecord| r.lambda_min.unwrap_or(f64::NAN);
        let ks = |r: &ReplicateRecord| r.kolmogorov.unwrap_or(f64::NAN);

        let failures = records.len() - ok.len();
        let max_upper_deviation = max(&|r| (hi(r) - boundary).abs());
        let max_lower_deviation = max(&|r| (lo(r) + boundary).abs());
        let total_outliers = ok.iter().map(|r| r.outliers.unwrap_or(0)).sum();
        let max_kolmogorov = max(&ks);
        let checks = VerificationChecks {
            extremes: failures == 0
                && max_upper_deviation <= tol.edge
                && max_lower_deviation <= tol.edge,
            no_outliers: failures == 0 && total_outliers == 0,
            kolmogorov: failures == 0 && max_kolmogorov < tol.kolmogorov,
        };
        VerificationSummary {
            reps: records.len(),
            failures,
            ratio,
            boundary,
            mean_lambda_max: mean(&hi),
            mean_lambda_min: mean(&lo),
            max_upper_deviation,
            max_lower_deviation,
            total_outliers,
            min_near_zero: ok.iter().filter_map(|r| r.near_zero).min().unwrap_or(0),
            mean_kolmogorov: mean(&ks),
            max_kolmogorov,
            checks,
            passed: checks.extremes && checks.no_outliers && checks.kolmogorov,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub config: SimulationConfig,
    pub dist: DistributionKind,
    pub seed0: u64,
    pub tolerances: Tolerances,
    pub records: Vec<ReplicateRecord>,
    pub summary: VerificationSummary,
}

impl VerificationReport {
    /// Assembles a report from records already ordered by seed.
    pub fn from_records(
        config: SimulationConfig,
        dist: DistributionKind,
        seed0: u64,
        tolerances: Tolerances,
        records: Vec<ReplicateRecord>,
    ) -> Result<Self> {
        let law = LsdModel::new(config.ratio())?;
        let summary =
            VerificationSummary::from_records(&records, law.ratio(), law.boundary(), &tolerances);
        Ok(VerificationReport {
            config,
            dist,
            seed0,
            tolerances,
            records,
            summary,
        })
    }

    /// Recomputes the summary from the records.
    pub fn recompute_summary(&self) -> VerificationSummary {
        VerificationSummary::from_records(
            &self.records,
            self.summary.ratio,
            self.summary.boundary,
            &self.tolerances,
        )
    }
}

/// Runs `reps` seeds `seed0, seed0 + 1, …` one after another.
pub fn verify_extremes(
    config: SimulationConfig,
    dist: DistributionKind,
    reps: usize,
    seed0: u64,
    tolerances: Tolerances,
) -> Result<VerificationReport> {
    if reps == 0 {
        return Err(Error::Config("reps must be at least 1"));
    }
    config.validate()?;
    let law = LsdModel::new(config.ratio())?;
    let records = (0..reps as u64)
        .map(|r| run_replicate(config, dist, seed0.wrapping_add(r), &law, tolerances.probe))
        .collect();
    VerificationReport::from_records(config, dist, seed0, tolerances, records)
}
