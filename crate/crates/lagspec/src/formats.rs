//! On-disk formats. Numbers are written with 17 significant digits so every
//! `f64` survives a round trip; nothing depends on the locale.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use lagspec_core::analysis::{DetectionReport, VerificationReport};
use lagspec_core::eig::Spectrum;
use lagspec_core::lsd::{select_branch, SelectionMethod, StieltjesEvaluation};
use lagspec_core::matrices::HermitianMatrix;
use lagspec_core::noise::{DistributionKind, NoisePanel, SimulationConfig};
use lagspec_core::C64;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

pub const MATRIX_MAGIC: &[u8; 4] = b"LSPC";
pub const MATRIX_VERSION: u32 = 1;

/// `{:.16e}`: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(field: &str) -> AppResult<f64> {
    field
        .trim()
        .parse()
        .map_err(|e| AppError::format("number", format!("{field:?}: {e}")))
}

pub fn create(path: &Path) -> AppResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| AppError::io(path, e))
}

pub fn open(path: &Path) -> AppResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| AppError::io(path, e))
}

fn finish<W: Write>(mut w: W, path: &Path) -> AppResult<()> {
    w.flush().map_err(|e| AppError::io(path, e))
}

// Panels

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PanelHeader {
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub tau: usize,
    pub dist: DistributionKind,
    pub seed: u64,
}

/// One JSON header line, then one CSV row per series `i` holding
/// `re,im` pairs for `t = 1, …, T+τ`.
pub fn write_panel_csv<W: Write + ?Sized>(w: &mut W, panel: &NoisePanel) -> AppResult<()> {
    let header = PanelHeader {
        n: panel.config.n,
        t: panel.config.t,
        tau: panel.config.tau,
        dist: panel.dist,
        seed: panel.seed,
    };
    let io = |e| AppError::io("<panel>", e);
    writeln!(w, "{}", serde_json::to_string(&header)?).map_err(io)?;
    for i in 0..panel.rows() {
        let line: Vec<String> = panel
            .row(i)
            .iter()
            .flat_map(|z| [num(z.re), num(z.im)])
            .collect();
        writeln!(w, "{}", line.join(",")).map_err(io)?;
    }
    Ok(())
}

pub fn read_panel_csv<R: BufRead>(mut r: R) -> AppResult<NoisePanel> {
    let mut first = String::new();
    r.read_line(&mut first)
        .map_err(|e| AppError::io("<panel>", e))?;
    let header: PanelHeader =
        serde_json::from_str(first.trim()).map_err(|e| AppError::format("panel header", e))?;
    let config = SimulationConfig::new(header.n, header.t, header.tau)?;
    let cols = config.columns();
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
    let mut entries = Vec::with_capacity(header.n * cols);
    for record in reader.records() {
        let record = record?;
        if record.len() != 2 * cols {
            return Err(AppError::format(
                "panel row",
                format!("expected {} fields, found {}", 2 * cols, record.len()),
            ));
        }
        for pair in record.iter().collect::<Vec<_>>().chunks(2) {
            entries.push(C64::new(parse_f64(pair[0])?, parse_f64(pair[1])?));
        }
    }
    Ok(NoisePanel::from_entries(
        config,
        header.dist,
        header.seed,
        entries,
    )?)
}

// Matrices

/// `"LSPC"`, `u32` version, `u64` order, then `n²` row-major `(re, im)`
/// pairs of `f64`. Everything little-endian.
pub fn write_matrix_binary<W: Write + ?Sized>(w: &mut W, m: &HermitianMatrix) -> io::Result<()> {
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&MATRIX_VERSION.to_le_bytes())?;
    w.write_all(&(m.order() as u64).to_le_bytes())?;
    for z in m.as_slice() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_matrix_binary<R: Read>(mut r: R) -> AppResult<HermitianMatrix> {
    let io = |e| AppError::io("<matrix>", e);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MATRIX_MAGIC {
        return Err(AppError::format("matrix", "bad magic"));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4).map_err(io)?;
    let version = u32::from_le_bytes(b4);
    if version != MATRIX_VERSION {
        return Err(AppError::format(
            "matrix",
            format!("unsupported version {version}"),
        ));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8).map_err(io)?;
    let n = usize::try_from(u64::from_le_bytes(b8)).map_err(|e| AppError::format("matrix", e))?;
    let mut data = Vec::with_capacity(n.saturating_mul(n).min(1 << 24));
    for _ in 0..n * n {
        r.read_exact(&mut b8).map_err(io)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8).map_err(io)?;
        data.push(C64::new(re, f64::from_le_bytes(b8)));
    }
    Ok(HermitianMatrix::from_rows(n, data)?)
}

/// `n` rows of `re,im` pairs.
pub fn write_matrix_csv<W: Write + ?Sized>(w: &mut W, m: &HermitianMatrix) -> io::Result<()> {
    for i in 0..m.order() {
        let line: Vec<String> = m
            .row(i)
            .iter()
            .flat_map(|z| [num(z.re), num(z.im)])
            .collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

// Spectra and curves

/// One eigenvalue per line, ascending.
pub fn write_spectrum_csv<W: Write + ?Sized>(w: &mut W, s: &Spectrum) -> io::Result<()> {
    for v in s.values() {
        writeln!(w, "{}", num(*v))?;
    }
    Ok(())
}

pub fn read_spectrum_csv<R: BufRead>(r: R) -> AppResult<Spectrum> {
    let mut values = Vec::new();
    for line in r.lines() {
        let line = line.map_err(|e| AppError::io("<spectrum>", e))?;
        if !line.trim().is_empty() {
            values.push(parse_f64(&line)?);
        }
    }
    Ok(Spectrum::new(values)?)
}

/// Header `x,<names…>`, then one row per grid point.
pub fn write_curve_csv<W: Write + ?Sized>(
    w: &mut W,
    names: &[&str],
    rows: &[(f64, Vec<f64>)],
) -> io::Result<()> {
    writeln!(w, "x,{}", names.join(","))?;
    for (x, ys) in rows {
        let mut line = num(*x);
        for y in ys {
            line.push(',');
            line.push_str(&num(*y));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

// JSON

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BranchRecord {
    pub z_re: f64,
    pub z_im: f64,
    pub y0: [f64; 2],
    pub m1: [f64; 2],
    pub m2: [f64; 2],
    pub m3: [f64; 2],
    pub m4: [f64; 2],
    pub residuals: [f64; 4],
    /// Imaginary part of the selection quantity per branch.
    pub criteria: [f64; 4],
    /// 1-based index of the selected branch, absent if selection failed.
    pub selected: Option<usize>,
    pub method: Option<SelectionMethod>,
    pub error: Option<String>,
}

impl BranchRecord {
    pub fn from_evaluation(ev: &StieltjesEvaluation) -> Self {
        let pair = |z: C64| [z.re, z.im];
        let choice = select_branch(ev);
        BranchRecord {
            z_re: ev.z.re,
            z_im: ev.z.im,
            y0: pair(ev.y0),
            m1: pair(ev.branches[0]),
            m2: pair(ev.branches[1]),
            m3: pair(ev.branches[2]),
            m4: pair(ev.branches[3]),
            residuals: ev.residuals(),
            criteria: [0, 1, 2, 3].map(|i| ev.criterion(i)),
            selected: choice.as_ref().ok().map(|b| b.index + 1),
            method: choice.as_ref().ok().map(|b| b.method),
            error: choice.err().map(|e| e.to_string()),
        }
    }
}

pub fn write_json<W: Write + ?Sized, T: Serialize + ?Sized>(w: &mut W, value: &T) -> AppResult<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w).map_err(|e| AppError::io("<json>", e))
}

pub const SUMMARY_COLUMNS: [&str; 14] = [
    "n",
    "T",
    "tau",
    "dist",
    "seed0",
    "reps",
    "failures",
    "boundary",
    "max_upper_deviation",
    "max_lower_deviation",
    "total_outliers",
    "min_near_zero",
    "max_kolmogorov",
    "passed",
];

/// Header plus one summary row.
pub fn write_summary_csv<W: Write + ?Sized>(
    w: &mut W,
    report: &VerificationReport,
) -> AppResult<()> {
    let s = &report.summary;
    let c = &report.config;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SUMMARY_COLUMNS)?;
    out.write_record([
        c.n.to_string(),
        c.t.to_string(),
        c.tau.to_string(),
        report.dist.name().to_owned(),
        report.seed0.to_string(),
        s.reps.to_string(),
        s.failures.to_string(),
        num(s.boundary),
        num(s.max_upper_deviation),
        num(s.max_lower_deviation),
        s.total_outliers.to_string(),
        s.min_near_zero.to_string(),
        num(s.max_kolmogorov),
        s.passed.to_string(),
    ])?;
    out.flush().map_err(|e| AppError::io("<summary>", e))
}

/// Per-seed detection outcomes, one row each.
pub fn write_detection_csv<W: Write + ?Sized>(
    w: &mut W,
    reports: &[(u64, DetectionReport)],
) -> AppResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["seed", "k_hat", "q_hat", "counts"])?;
    for (seed, r) in reports {
        let counts: Vec<String> = r.counts.iter().map(|c| c.to_string()).collect();
        out.write_record([
            seed.to_string(),
            r.k_hat.to_string(),
            r.q_hat.to_string(),
            counts.join(" "),
        ])?;
    }
    out.flush().map_err(|e| AppError::io("<detection>", e))
}

pub fn save<F>(path: &Path, body: F) -> AppResult<()>
where
    F: FnOnce(&mut BufWriter<File>) -> AppResult<()>,
{
    let mut w = create(path)?;
    body(&mut w)?;
    finish(w, path)
}
