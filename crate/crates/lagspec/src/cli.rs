//! Command-line surface.
//!
//! Exit status: 0 when every check passes, 1 when a verification check
//! fails, 2 on usage errors, 3 on internal failures.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use lagspec_core::analysis::{
    near_zero_count, DetectionScenario, Margins, Tolerances, VerificationReport, NEAR_ZERO_REL,
};
use lagspec_core::eig::{hermitian_eigenvalues, Spectrum};
use lagspec_core::lsd::{stieltjes_roots, LsdModel};
use lagspec_core::matrices::build_m_tau;
use lagspec_core::noise::{preprocess, sample_panel, DistributionKind, SimulationConfig};
use lagspec_core::C64;
use serde::Serialize;

use crate::error::{AppError, AppResult};
use crate::formats::{self, BranchRecord};
use crate::harness::{detect_batch, pool, verify_extremes_parallel};
use crate::pilot::{self, CALIBRATED_MARGINS, DETECTION_STRENGTH};
use crate::plot::{render_svg, PlotInput};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lagspec",
    version,
    about = "Spectra of symmetrized lag-tau auto-cross covariance matrices"
)]
pub struct Cli {
    /// Caps the number of worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, env = "LAGSPEC_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate M_n(tau) and write its spectrum.
    Simulate(SimulateArgs),
    /// Limiting density (and CDF) of F_c on a grid.
    Density(DensityArgs),
    /// Print the support boundary d(c) and the atom at the origin.
    Boundary(RatioArgs),
    /// Stieltjes branch diagnostics on a grid of the upper half-plane.
    Stieltjes(StieltjesArgs),
    /// Monte Carlo verification suites.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// SVG overlay of the eigenvalue histogram and the limiting density.
    Plot(PlotArgs),
    /// Calibration runs behind the frozen thresholds.
    Pilot(PilotArgs),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Extreme eigenvalues against ±d(c_n).
    Extremes(VerifyArgs),
    /// No eigenvalues in the probe intervals beyond ±d(c_n).
    NoOutliers(VerifyArgs),
    /// Kolmogorov distance of the ESD to F_{c_n}.
    Ks(VerifyArgs),
    /// Exact zeros forced by the rank bound when n > T + tau.
    Pointmass(PointMassArgs),
    /// Factor-order detection over seeds.
    Detect(DetectArgs),
}

/// `a:b:N`, `N ≥ 1` evenly spaced points from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.end
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected a:b:N, got {s:?}"));
        };
        let start: f64 = a.parse().map_err(|e| format!("{a:?}: {e}"))?;
        let end: f64 = b.parse().map_err(|e| format!("{b:?}: {e}"))?;
        let points: usize = n.parse().map_err(|e| format!("{n:?}: {e}"))?;
        if !start.is_finite() || !end.is_finite() || start > end || points == 0 {
            return Err(format!("need finite a <= b and N >= 1, got {s:?}"));
        }
        Ok(Grid { start, end, points })
    }
}

fn parse_dist(s: &str) -> Result<DistributionKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = DistributionKind::ALL.iter().map(|d| d.name()).collect();
        format!(
            "unknown distribution {s:?}; expected one of {}",
            names.join(", ")
        )
    })
}

fn parse_ratio(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(c) if c > 0.0 && c.is_finite() => Ok(c),
        Ok(_) => Err("c must be positive and finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Args)]
pub struct PanelArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "T", visible_alias = "t")]
    pub t: usize,
    #[arg(long, default_value_t = 1)]
    pub tau: usize,
    #[arg(long, default_value = "complex-gaussian", value_parser = parse_dist)]
    pub dist: DistributionKind,
}

impl PanelArgs {
    fn config(&self) -> AppResult<SimulationConfig> {
        Ok(SimulationConfig::new(self.n, self.t, self.tau)?)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub panel: PanelArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Truncate at this level, then centre and rescale.
    #[arg(long)]
    pub preprocess: Option<f64>,
    /// Spectrum CSV; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the matrix in the LSPC binary format.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Also write the panel as CSV.
    #[arg(long)]
    pub panel_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    #[arg(long, value_parser = parse_ratio)]
    pub c: f64,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long, value_parser = parse_ratio)]
    pub c: f64,
    #[arg(long, allow_hyphen_values = true, default_value = "-3:3:601")]
    pub grid: Grid,
    /// Add a CDF column.
    #[arg(long)]
    pub cdf: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StieltjesArgs {
    #[arg(long, value_parser = parse_ratio)]
    pub c: f64,
    /// Grid of real parts.
    #[arg(long, allow_hyphen_values = true, default_value = "-3:3:100")]
    pub re: Grid,
    /// Grid of imaginary parts (all > 0).
    #[arg(long, default_value = "0.5:0.5:1")]
    pub im: Grid,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub panel: PanelArgs,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed0: u64,
    #[arg(long, default_value_t = Tolerances::default().edge)]
    pub edge_tol: f64,
    #[arg(long, default_value_t = Tolerances::default().probe.0)]
    pub probe_lo: f64,
    #[arg(long, default_value_t = Tolerances::default().probe.1)]
    pub probe_hi: f64,
    #[arg(long, default_value_t = Tolerances::default().kolmogorov)]
    pub ks_tol: f64,
    /// Report JSON; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// One-row summary CSV.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointMassArgs {
    #[command(flatten)]
    pub panel: PanelArgs,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed0: u64,
    /// Allowed gap between the near-zero fraction and 1 − 1/c_n.
    #[arg(long, default_value_t = 0.02)]
    pub fraction_tol: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long = "T", visible_alias = "t", default_value_t = 1000)]
    pub t: usize,
    #[arg(long, default_value_t = 3)]
    pub tau_max: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    /// Euclidean norm of each loading column.
    #[arg(long, default_value_t = DETECTION_STRENGTH)]
    pub strength: f64,
    #[arg(long, default_value = "complex-gaussian", value_parser = parse_dist)]
    pub dist: DistributionKind,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed0: u64,
    #[arg(long, default_value_t = CALIBRATED_MARGINS.delta0)]
    pub delta0: f64,
    #[arg(long, default_value_t = CALIBRATED_MARGINS.delta1)]
    pub delta1: f64,
    /// Fraction of seeds that must recover (k, q).
    #[arg(long, default_value_t = 0.9)]
    pub min_success: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Per-seed CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Eigenvalues from a spectrum CSV instead of a fresh simulation.
    #[arg(long, conflicts_with_all = ["n", "t", "tau", "seed"])]
    pub spectrum: Option<PathBuf>,
    #[arg(long, required_unless_present = "spectrum")]
    pub n: Option<usize>,
    #[arg(long = "T", visible_alias = "t", required_unless_present = "spectrum")]
    pub t: Option<usize>,
    #[arg(long)]
    pub tau: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "complex-gaussian", value_parser = parse_dist)]
    pub dist: DistributionKind,
    /// Ratio of the overlaid law; defaults to n/T for simulations.
    #[arg(long, value_parser = parse_ratio)]
    pub c: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PilotArgs {
    /// Few replicates; for smoke tests only.
    #[arg(long)]
    pub quick: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` and runs; returns the exit status. Clap handles `--help`
/// and parse errors itself.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
        }
    };
    match run(&cli) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_INTERNAL
            }
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.cli.out_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Writes `body` to the resolved path plus a `.meta.json` sidecar, or to
    /// stdout when no path was given.
    fn emit<F>(&self, path: Option<&Path>, command: &str, body: F) -> AppResult<()>
    where
        F: FnOnce(&mut dyn Write) -> AppResult<()>,
    {
        match path {
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                body(&mut lock)?;
                lock.flush().map_err(|e| AppError::io("<stdout>", e))
            }
            Some(p) => {
                let p = self.resolve(p);
                formats::save(&p, |w| body(w))?;
                self.write_meta(&p, command)
            }
        }
    }

    fn write_meta(&self, primary: &Path, command: &str) -> AppResult<()> {
        #[derive(Serialize)]
        struct Meta<'a> {
            command: &'a str,
            args: Vec<String>,
            version: &'a str,
            threads: Option<usize>,
            unix_time: u64,
        }
        let meta = Meta {
            command,
            args: std::env::args().skip(1).collect(),
            version: env!("CARGO_PKG_VERSION"),
            threads: self.cli.threads,
            unix_time: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        };
        let mut name = primary.as_os_str().to_owned();
        name.push(".meta.json");
        formats::save(Path::new(&name), |w| formats::write_json(w, &meta))
    }
}

pub fn run(cli: &Cli) -> AppResult<bool> {
    let ctx = Ctx { cli };
    // Fail fast on a bad cap even for commands that never spawn workers.
    pool(cli.threads)?;
    match &cli.command {
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Density(a) => density(&ctx, a),
        Command::Boundary(a) => {
            let law = LsdModel::new(a.c)?;
            println!("boundary {}", formats::num(law.boundary()));
            println!("atom {}", formats::num(law.point_mass()));
            Ok(true)
        }
        Command::Stieltjes(a) => stieltjes(&ctx, a),
        Command::Verify(v) => verify(&ctx, v),
        Command::Plot(a) => plot(&ctx, a),
        Command::Pilot(a) => {
            let report = pilot::run_pilot(a.quick, cli.threads)?;
            ctx.emit(a.output.as_deref(), "pilot", |w| {
                formats::write_json(w, &report)
            })?;
            Ok(true)
        }
    }
}

fn simulate_spectrum(
    config: SimulationConfig,
    dist: DistributionKind,
    seed: u64,
) -> AppResult<Spectrum> {
    let panel = sample_panel(config, dist, seed)?;
    Ok(hermitian_eigenvalues(&build_m_tau(&panel, config.tau)?)?)
}

fn simulate(ctx: &Ctx<'_>, a: &SimulateArgs) -> AppResult<bool> {
    let config = a.panel.config()?;
    let mut panel = sample_panel(config, a.panel.dist, a.seed)?;
    if let Some(level) = a.preprocess {
        panel = preprocess(&panel, level)?;
    }
    if let Some(p) = &a.panel_out {
        ctx.emit(Some(p), "simulate", |w| formats::write_panel_csv(w, &panel))?;
    }
    let m = build_m_tau(&panel, config.tau)?;
    if let Some(p) = &a.matrix {
        let p = ctx.resolve(p);
        formats::save(&p, |w| {
            formats::write_matrix_binary(w, &m).map_err(|e| AppError::io(&p, e))
        })?;
    }
    let spectrum = hermitian_eigenvalues(&m)?;
    ctx.emit(a.output.as_deref(), "simulate", |w| {
        formats::write_spectrum_csv(w, &spectrum).map_err(|e| AppError::io("<spectrum>", e))
    })?;
    Ok(true)
}

fn density(ctx: &Ctx<'_>, a: &DensityArgs) -> AppResult<bool> {
    let law = LsdModel::new(a.c)?;
    let rows: Vec<(f64, Vec<f64>)> = a
        .grid
        .values()
        .into_iter()
        .map(|x| {
            let mut ys = vec![law.density(x)];
            if a.cdf {
                ys.push(law.cdf(x));
            }
            (x, ys)
        })
        .collect();
    let names: &[&str] = if a.cdf {
        &["density", "cdf"]
    } else {
        &["density"]
    };
    ctx.emit(a.output.as_deref(), "density", |w| {
        formats::write_curve_csv(w, names, &rows).map_err(|e| AppError::io("<density>", e))
    })?;
    Ok(true)
}

fn stieltjes(ctx: &Ctx<'_>, a: &StieltjesArgs) -> AppResult<bool> {
    if !(a.im.start > 0.0) {
        return Err(AppError::Usage("imaginary parts must be positive".into()));
    }
    let mut records = Vec::new();
    for y in a.im.values() {
        for x in a.re.values() {
            records.push(BranchRecord::from_evaluation(&stieltjes_roots(
                C64::new(x, y),
                a.c,
            )?));
        }
    }
    ctx.emit(a.output.as_deref(), "stieltjes", |w| {
        formats::write_json(w, &records)
    })?;
    Ok(records.iter().all(|r| r.error.is_none()))
}

fn verify(ctx: &Ctx<'_>, v: &VerifyCommand) -> AppResult<bool> {
    match v {
        VerifyCommand::Extremes(a) => {
            verify_suite(ctx, a, "verify extremes", |r| r.summary.checks.extremes)
        }
        VerifyCommand::NoOutliers(a) => verify_suite(ctx, a, "verify no-outliers", |r| {
            r.summary.checks.no_outliers
        }),
        VerifyCommand::Ks(a) => verify_suite(ctx, a, "verify ks", |r| r.summary.checks.kolmogorov),
        VerifyCommand::Pointmass(a) => verify_point_mass(ctx, a),
        VerifyCommand::Detect(a) => verify_detect(ctx, a),
    }
}

fn verify_suite(
    ctx: &Ctx<'_>,
    a: &VerifyArgs,
    command: &str,
    check: fn(&VerificationReport) -> bool,
) -> AppResult<bool> {
    let tol = Tolerances {
        edge: a.edge_tol,
        probe: (a.probe_lo, a.probe_hi),
        kolmogorov: a.ks_tol,
    };
    if !(tol.probe.0 <= tol.probe.1) {
        return Err(AppError::Usage(
            "--probe-lo must not exceed --probe-hi".into(),
        ));
    }
    let report = verify_extremes_parallel(
        a.panel.config()?,
        a.panel.dist,
        a.reps,
        a.seed0,
        tol,
        ctx.cli.threads,
    )?;
    ctx.emit(a.output.as_deref(), command, |w| {
        formats::write_json(w, &report)
    })?;
    if let Some(p) = &a.summary {
        ctx.emit(Some(p), command, |w| formats::write_summary_csv(w, &report))?;
    }
    Ok(report.summary.failures == 0 && check(&report))
}

#[derive(Debug, Clone, Serialize)]
pub struct PointMassRecord {
    pub seed: u64,
    pub exact_zeros: Option<usize>,
    pub fraction: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointMassReport {
    pub config: SimulationConfig,
    pub dist: DistributionKind,
    /// `n − (T + τ)`, the rank deficiency of `M_n(τ)`.
    pub required_zeros: usize,
    /// `1 − 1/c_n`.
    pub expected_fraction: f64,
    pub fraction_tol: f64,
    pub records: Vec<PointMassRecord>,
    pub passed: bool,
}

fn verify_point_mass(ctx: &Ctx<'_>, a: &PointMassArgs) -> AppResult<bool> {
    let config = a.panel.config()?;
    if a.reps == 0 {
        return Err(AppError::Usage("reps must be at least 1".into()));
    }
    let required_zeros = config.n.saturating_sub(config.t + config.tau);
    let expected_fraction = LsdModel::new(config.ratio())?.point_mass();
    let records: Vec<PointMassRecord> = pool(ctx.cli.threads)?.install(|| {
        use rayon::prelude::*;
        (0..a.reps as u64)
            .into_par_iter()
            .map(|r| {
                let seed = a.seed0.wrapping_add(r);
                match simulate_spectrum(config, a.panel.dist, seed) {
                    Ok(s) => {
                        let zeros = near_zero_count(&s, NEAR_ZERO_REL * s.spectral_radius());
                        PointMassRecord {
                            seed,
                            exact_zeros: Some(zeros),
                            fraction: Some(zeros as f64 / s.len() as f64),
                            error: None,
                        }
                    }
                    Err(e) => PointMassRecord {
                        seed,
                        exact_zeros: None,
                        fraction: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });
    let passed = records.iter().all(|r| match (r.exact_zeros, r.fraction) {
        (Some(z), Some(f)) => {
            z >= required_zeros && (f - expected_fraction).abs() <= a.fraction_tol
        }
        _ => false,
    });
    let report = PointMassReport {
        config,
        dist: a.panel.dist,
        required_zeros,
        expected_fraction,
        fraction_tol: a.fraction_tol,
        records,
        passed,
    };
    ctx.emit(a.output.as_deref(), "verify pointmass", |w| {
        formats::write_json(w, &report)
    })?;
    Ok(passed)
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionSuite {
    pub scenario: DetectionScenario,
    pub margins: Margins,
    pub seed0: u64,
    pub correct: usize,
    pub reps: usize,
    pub min_success: f64,
    pub reports: Vec<(u64, lagspec_core::analysis::DetectionReport)>,
    pub passed: bool,
}

fn verify_detect(ctx: &Ctx<'_>, a: &DetectArgs) -> AppResult<bool> {
    if a.reps == 0 {
        return Err(AppError::Usage("reps must be at least 1".into()));
    }
    let scenario = DetectionScenario {
        n: a.n,
        t: a.t,
        tau_max: a.tau_max,
        k: a.k,
        q: if a.k == 0 { 0 } else { a.q },
        strength: a.strength,
        dist: a.dist,
    };
    let margins = Margins {
        delta0: a.delta0,
        delta1: a.delta1,
    };
    let seeds: Vec<u64> = (0..a.reps as u64)
        .map(|r| a.seed0.wrapping_add(r))
        .collect();
    let reports = detect_batch(&scenario, &seeds, margins, ctx.cli.threads)?;
    let correct = reports
        .iter()
        .filter(|(_, r)| (r.k_hat, r.q_hat) == (scenario.k, scenario.q))
        .count();
    let passed = correct as f64 >= a.min_success * a.reps as f64;
    if let Some(p) = &a.csv {
        ctx.emit(Some(p), "verify detect", |w| {
            formats::write_detection_csv(w, &reports)
        })?;
    }
    let suite = DetectionSuite {
        scenario,
        margins,
        seed0: a.seed0,
        correct,
        reps: a.reps,
        min_success: a.min_success,
        reports,
        passed,
    };
    ctx.emit(a.output.as_deref(), "verify detect", |w| {
        formats::write_json(w, &suite)
    })?;
    Ok(passed)
}

fn plot(ctx: &Ctx<'_>, a: &PlotArgs) -> AppResult<bool> {
    let (values, c, default_title) = match &a.spectrum {
        Some(p) => {
            let s = formats::read_spectrum_csv(formats::open(p)?)?;
            let c =
                a.c.ok_or_else(|| AppError::Usage("--c is required with --spectrum".into()))?;
            (s.values().to_vec(), c, format!("ESD from {}", p.display()))
        }
        None => {
            let (n, t) = (a.n.unwrap_or(0), a.t.unwrap_or(0));
            let tau = a.tau.unwrap_or(1);
            let config = SimulationConfig::new(n, t, tau)?;
            let s = simulate_spectrum(config, a.dist, a.seed.unwrap_or(0))?;
            let c = a.c.unwrap_or(config.ratio());
            (
                s.values().to_vec(),
                c,
                format!("n = {n}, T = {t}, tau = {tau}, c = {c}"),
            )
        }
    };
    let svg = render_svg(&PlotInput {
        eigenvalues: &values,
        c,
        bins: a.bins,
        title: a.title.clone().unwrap_or(default_title),
    })?;
    ctx.emit(Some(&a.output), "plot", |w| {
        w.write_all(svg.as_bytes())
            .map_err(|e| AppError::io("<svg>", e))
    })?;
    Ok(true)
}
