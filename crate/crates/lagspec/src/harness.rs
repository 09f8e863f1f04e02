//! Rayon-backed batch runs. Each seed is an independent job and results are
//! collected in seed order, so output never depends on the worker count.

use lagspec_core::analysis::{
    classify_orders, run_replicate, DetectionReport, DetectionScenario, Margins, Tolerances,
    VerificationReport,
};
use lagspec_core::eig::Spectrum;
use lagspec_core::lsd::LsdModel;
use lagspec_core::noise::{DistributionKind, SimulationConfig};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{AppError, AppResult};

/// A pool capped at `threads` workers; `None` lets rayon decide.
pub fn pool(threads: Option<usize>) -> AppResult<ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(AppError::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    builder.build().map_err(|e| AppError::Usage(e.to_string()))
}

/// Parallel counterpart of [`lagspec_core::analysis::verify_extremes`];
/// the report is identical to the sequential one.
pub fn verify_extremes_parallel(
    config: SimulationConfig,
    dist: DistributionKind,
    reps: usize,
    seed0: u64,
    tolerances: Tolerances,
    threads: Option<usize>,
) -> AppResult<VerificationReport> {
    if reps == 0 {
        return Err(AppError::Usage("reps must be at least 1".into()));
    }
    config.validate()?;
    let law = LsdModel::new(config.ratio())?;
    let records = pool(threads)?.install(|| {
        (0..reps as u64)
            .into_par_iter()
            .map(|r| run_replicate(config, dist, seed0.wrapping_add(r), &law, tolerances.probe))
            .collect()
    });
    Ok(VerificationReport::from_records(
        config, dist, seed0, tolerances, records,
    )?)
}

/// `Φ_n(τ)` spectra for every seed, in seed order.
pub fn scenario_spectra(
    scenario: &DetectionScenario,
    seeds: &[u64],
    threads: Option<usize>,
) -> AppResult<Vec<(u64, Vec<Spectrum>)>> {
    let out: Result<Vec<_>, _> = pool(threads)?.install(|| {
        seeds
            .par_iter()
            .map(|&s| scenario.spectra(s).map(|sp| (s, sp)))
            .collect()
    });
    Ok(out?)
}

pub fn detect_batch(
    scenario: &DetectionScenario,
    seeds: &[u64],
    margins: Margins,
    threads: Option<usize>,
) -> AppResult<Vec<(u64, DetectionReport)>> {
    scenario_spectra(scenario, seeds, threads)?
        .into_iter()
        .map(|(s, sp)| Ok((s, classify_orders(&sp, scenario.ratio(), margins)?)))
        .collect()
}
