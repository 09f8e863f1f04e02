//! SVG overlay of a normalised eigenvalue histogram and the density `φ_c`.

use std::fmt::Write as _;

use lagspec_core::analysis::ZERO_SNAP;
use lagspec_core::lsd::LsdModel;

use crate::error::AppResult;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const CURVE_POINTS: usize = 400;
const MAX_BINS: usize = 400;

#[derive(Debug, Clone)]
pub struct PlotInput<'a> {
    pub eigenvalues: &'a [f64],
    pub c: f64,
    /// Overrides the Freedman–Diaconis rule.
    pub bins: Option<usize>,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    /// Bar heights: count / (n · width), so bar area is the fraction of all
    /// `n` eigenvalues.
    pub heights: Vec<f64>,
}

/// Freedman–Diaconis bin count `(max − min) / (2·IQR·m^{−1/3})`, at least 1.
pub fn freedman_diaconis_bins(sorted: &[f64]) -> usize {
    let m = sorted.len();
    if m < 2 {
        return 1;
    }
    let quantile = |p: f64| {
        let pos = p * (m - 1) as f64;
        let (i, frac) = (pos.floor() as usize, pos.fract());
        let next = sorted[(i + 1).min(m - 1)];
        sorted[i] + frac * (next - sorted[i])
    };
    let iqr = quantile(0.75) - quantile(0.25);
    let range = sorted[m - 1] - sorted[0];
    if !(iqr > 0.0) || !(range > 0.0) {
        return 1;
    }
    let h = 2.0 * iqr / (m as f64).cbrt();
    ((range / h).ceil() as usize).clamp(1, MAX_BINS)
}

/// Histogram of `values` normalised by `total`.
pub fn histogram(values: &[f64], total: usize, bins: Option<usize>) -> Option<Histogram> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let bins = bins
        .unwrap_or_else(|| freedman_diaconis_bins(&sorted))
        .max(1);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        1.0
    };
    let mut counts = vec![0usize; bins];
    for v in &sorted {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let heights = counts
        .iter()
        .map(|&k| k as f64 / (total as f64 * width))
        .collect();
    Some(Histogram { lo, width, heights })
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    x0: f64,
    x1: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - y.min(self.y1) / self.y1 * (HEIGHT - TOP - BOTTOM)
    }
}

/// Renders the overlay. When `c > 1` the eigenvalues at the origin are left
/// out of the bars and the atom is reported in the legend instead.
pub fn render_svg(input: &PlotInput<'_>) -> AppResult<String> {
    let law = LsdModel::new(input.c)?;
    let d = law.boundary();
    let atom = law.point_mass();
    let n = input.eigenvalues.len();
    let scale = input.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let snap = ZERO_SNAP * scale;
    let drawn: Vec<f64> = if atom > 0.0 {
        input
            .eigenvalues
            .iter()
            .copied()
            .filter(|v| v.abs() > snap)
            .collect()
    } else {
        input.eigenvalues.to_vec()
    };
    let excluded = n - drawn.len();
    let hist = histogram(&drawn, n, input.bins);

    let curve: Vec<(f64, f64)> = (0..=CURVE_POINTS)
        .map(|i| -d + 2.0 * d * i as f64 / CURVE_POINTS as f64)
        .filter(|x| *x != 0.0)
        .map(|x| (x, law.density(x)))
        .collect();

    let data_lo = drawn.iter().copied().fold(-d, f64::min);
    let data_hi = drawn.iter().copied().fold(d, f64::max);
    let pad = 0.05 * (data_hi - data_lo);
    let bar_max = hist
        .as_ref()
        .map_or(0.0, |h| h.heights.iter().copied().fold(0.0, f64::max));
    // Ignore the c = 1 pole when sizing the vertical axis.
    let curve_max = curve
        .iter()
        .filter(|(x, _)| x.abs() >= 0.02 * d)
        .map(|p| p.1)
        .fold(0.0, f64::max);
    let frame = Frame {
        x0: data_lo - pad,
        x1: data_hi + pad,
        y1: 1.1 * bar_max.max(curve_max).max(1e-12),
    };

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        w,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&input.title)
    );

    // Axes and ticks.
    let (ax0, ax1, ay0, ay1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(w, r#"<g id="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(
        w,
        r#"<line x1="{ax0:.2}" y1="{ay0:.2}" x2="{ax1:.2}" y2="{ay0:.2}"/>"#
    );
    let _ = writeln!(
        w,
        r#"<line x1="{ax0:.2}" y1="{ay0:.2}" x2="{ax0:.2}" y2="{ay1:.2}"/>"#
    );
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, r#"<g id="ticks" text-anchor="middle">"#);
    for i in 0..=4 {
        let xv = frame.x0 + (frame.x1 - frame.x0) * i as f64 / 4.0;
        let x = frame.px(xv);
        let _ = writeln!(
            w,
            r#"<line x1="{x:.2}" y1="{ay0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            ay0 + 5.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{x:.2}" y="{:.2}">{xv:.2}</text>"#,
            ay0 + 18.0
        );
        let yv = frame.y1 * i as f64 / 4.0;
        let y = frame.py(yv);
        let _ = writeln!(
            w,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{ax0:.2}" y2="{y:.2}" stroke="black"/>"#,
            ax0 - 5.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.2}</text>"#,
            ax0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">eigenvalue</text>"#,
        (ax0 + ax1) / 2.0,
        HEIGHT - 14.0
    );

    let _ = writeln!(
        w,
        r##"<g id="bars" fill="#9ecae1" stroke="#3182bd" stroke-width="0.5">"##
    );
    if let Some(h) = &hist {
        for (i, height) in h.heights.iter().enumerate() {
            let xa = frame.px(h.lo + i as f64 * h.width);
            let xb = frame.px(h.lo + (i + 1) as f64 * h.width);
            let top = frame.py(*height);
            let _ = writeln!(
                w,
                r#"<rect x="{xa:.2}" y="{top:.2}" width="{:.2}" height="{:.2}"/>"#,
                (xb - xa).max(0.0),
                (ay0 - top).max(0.0)
            );
        }
    }
    let _ = writeln!(w, "</g>");

    let points: Vec<String> = curve
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", frame.px(*x), frame.py(*y)))
        .collect();
    let _ = writeln!(
        w,
        r##"<polyline id="density" fill="none" stroke="#d62728" stroke-width="1.5" points="{}"/>"##,
        points.join(" ")
    );

    let mut legend = vec![
        (
            format!(
                "ESD histogram, n = {n}, {} bins",
                hist.as_ref().map_or(0, |h| h.heights.len())
            ),
            "#9ecae1",
        ),
        (
            format!("density, c = {}, d(c) = {:.4}", input.c, d),
            "#d62728",
        ),
    ];
    if atom > 0.0 {
        legend.push((
            format!("atom at 0 of mass {atom:.4} not drawn ({excluded} zero eigenvalues)"),
            "none",
        ));
    }
    let _ = writeln!(w, r#"<g id="legend">"#);
    for (i, (label, colour)) in legend.iter().enumerate() {
        let y = TOP + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            w,
            r#"<rect x="{:.2}" y="{:.2}" width="12" height="10" fill="{colour}" stroke="black" stroke-width="0.5"/>"#,
            ax1 - 330.0,
            y - 9.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{y:.2}">{}</text>"#,
            ax1 - 312.0,
            escape(label)
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, "</svg>");
    Ok(s)
}
