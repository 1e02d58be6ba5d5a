//! SVG renderings of reliability diagrams, cumulative-difference
//! plots, and sweep line charts.
//!
//! Documents are plain SVG 1.1 with generic font families and fully
//! deterministic output: every coordinate is formatted with a fixed
//! precision, so identical inputs produce byte-identical documents.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::binning::BinSummary;
use crate::cumulative::{CumulativeCurve, EcceReport};
use crate::error::{Error, Result};
use crate::experiments::{BootstrapBand, SweepResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    Reliability,
    Cumulative,
    SweepLines,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub title: String,
    pub width: u32,
    pub height: u32,
    pub x_label: String,
    pub y_label: String,
    pub kind: PlotKind,
}

impl PlotSpec {
    pub fn new(kind: PlotKind, title: impl Into<String>) -> Self {
        let (x_label, y_label) = match kind {
            PlotKind::Reliability => ("average score", "average response"),
            PlotKind::Cumulative => ("k/n", "cumulative difference"),
            PlotKind::SweepLines => ("axis", "value"),
        };
        PlotSpec {
            title: title.into(),
            width: 640,
            height: 480,
            x_label: x_label.into(),
            y_label: y_label.into(),
            kind,
        }
    }
}

const MARGIN_LEFT: f64 = 62.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 48.0;

/// Affine data-to-pixel frame.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    px_left: f64,
    px_right: f64,
    px_top: f64,
    px_bottom: f64,
    log_x: bool,
}

impl Frame {
    fn new(spec: &PlotSpec, x0: f64, x1: f64, y0: f64, y1: f64, log_x: bool) -> Frame {
        Frame {
            x0: if log_x { x0.log10() } else { x0 },
            x1: if log_x { x1.log10() } else { x1 },
            y0,
            y1,
            px_left: MARGIN_LEFT,
            px_right: spec.width as f64 - MARGIN_RIGHT,
            px_top: MARGIN_TOP,
            px_bottom: spec.height as f64 - MARGIN_BOTTOM,
            log_x,
        }
    }

    fn x(&self, v: f64) -> f64 {
        let v = if self.log_x { v.log10() } else { v };
        self.px_left + (v - self.x0) / (self.x1 - self.x0) * (self.px_right - self.px_left)
    }

    fn y(&self, v: f64) -> f64 {
        self.px_bottom - (v - self.y0) / (self.y1 - self.y0) * (self.px_bottom - self.px_top)
    }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

struct SvgDoc {
    body: String,
    width: u32,
    height: u32,
}

impl SvgDoc {
    fn new(spec: &PlotSpec) -> SvgDoc {
        let mut doc = SvgDoc {
            body: String::new(),
            width: spec.width,
            height: spec.height,
        };
        doc.text(
            spec.width as f64 / 2.0,
            20.0,
            &spec.title,
            "middle",
            13.0,
            "#000000",
        );
        doc
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64, dash: &str) {
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(" stroke-dasharray=\"{dash}\"")
        };
        writeln!(
            self.body,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"{width}\"{dash_attr}/>",
            px(x1), px(y1), px(x2), px(y2),
        )
        .unwrap();
    }

    fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64) {
        let pts: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{},{}", px(x), px(y)))
            .collect();
        writeln!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
            pts.join(" "),
        )
        .unwrap();
    }

    fn polygon(&mut self, points: &[(f64, f64)], fill: &str) {
        let pts: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{},{}", px(x), px(y)))
            .collect();
        writeln!(
            self.body,
            "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"none\"/>",
            pts.join(" "),
        )
        .unwrap();
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        writeln!(
            self.body,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"{fill}\"/>",
            px(x),
            px(y),
        )
        .unwrap();
    }

    fn text(&mut self, x: f64, y: f64, text: &str, anchor: &str, size: f64, fill: &str) {
        writeln!(
            self.body,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"{size}\" fill=\"{fill}\">{}</text>",
            px(x),
            px(y),
            escape(text),
        )
        .unwrap();
    }

    fn axes(&mut self, spec: &PlotSpec, frame: &Frame, x_ticks: &[f64], y_ticks: &[f64]) {
        self.line(frame.px_left, frame.px_bottom, frame.px_right, frame.px_bottom, "#000000", 1.0, "");
        self.line(frame.px_left, frame.px_top, frame.px_left, frame.px_bottom, "#000000", 1.0, "");
        for &t in x_ticks {
            let x = frame.x(t);
            self.line(x, frame.px_bottom, x, frame.px_bottom + 4.0, "#000000", 1.0, "");
            self.text(x, frame.px_bottom + 16.0, &tick_label(t), "middle", 10.0, "#000000");
        }
        for &t in y_ticks {
            let y = frame.y(t);
            self.line(frame.px_left - 4.0, y, frame.px_left, y, "#000000", 1.0, "");
            self.text(frame.px_left - 7.0, y + 3.0, &tick_label(t), "end", 10.0, "#000000");
        }
        self.text(
            (frame.px_left + frame.px_right) / 2.0,
            spec.height as f64 - 12.0,
            &spec.x_label,
            "middle",
            11.0,
            "#000000",
        );
        writeln!(
            self.body,
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#000000\" transform=\"rotate(-90 16 {})\">{}</text>",
            px((frame.px_top + frame.px_bottom) / 2.0),
            px((frame.px_top + frame.px_bottom) / 2.0),
            escape(&spec.y_label),
        )
        .unwrap();
    }

    fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body,
        )
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1000.0 || v.abs() < 0.01 {
        format!("{v:.0e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

fn validate_spec(spec: &PlotSpec) -> Result<()> {
    if spec.width == 0 || spec.height == 0 {
        return Err(Error::InvalidArgument(
            "plot dimensions must be positive".into(),
        ));
    }
    Ok(())
}

/// Reliability diagram: the per-bin (average score, average response)
/// polyline with markers, the diagonal reference, and the bootstrap
/// curves in light gray underneath when provided.
pub fn reliability_diagram(
    bins: &[BinSummary],
    band: Option<&BootstrapBand>,
    spec: &PlotSpec,
) -> Result<String> {
    validate_spec(spec)?;
    if bins.is_empty() {
        return Err(Error::InvalidArgument("no bins to plot".into()));
    }
    let frame = Frame::new(spec, 0.0, 1.0, 0.0, 1.0, false);
    let mut doc = SvgDoc::new(spec);
    let ticks = [0.0, 0.25, 0.5, 0.75, 1.0];
    doc.axes(spec, &frame, &ticks, &ticks);

    if let Some(band) = band {
        for curve in &band.curves {
            let points: Vec<(f64, f64)> = curve
                .iter()
                .map(|&(s, r)| (frame.x(s), frame.y(r)))
                .collect();
            doc.polyline(&points, "#cccccc", 1.0);
        }
    }

    // Diagonal of perfect calibration.
    doc.line(frame.x(0.0), frame.y(0.0), frame.x(1.0), frame.y(1.0), "#888888", 1.0, "4 3");

    let main: Vec<(f64, f64)> = bins
        .iter()
        .map(|b| (frame.x(b.avg_score), frame.y(b.avg_response)))
        .collect();
    doc.polyline(&main, "#1f4e9c", 1.5);
    for &(x, y) in &main {
        doc.circle(x, y, 2.5, "#1f4e9c");
    }
    Ok(doc.finish())
}

/// Cumulative-difference plot: C_k versus k/n with a zero line and a
/// triangle at the origin of total height four sigma, so sigma is a
/// quarter of the triangle's height. An optional report adds the
/// statistics and P-values as legend text.
pub fn cumulative_plot(
    curve: &CumulativeCurve,
    sigma: f64,
    report: Option<&EcceReport>,
    spec: &PlotSpec,
) -> Result<String> {
    validate_spec(spec)?;
    if sigma <= 0.0 {
        return Err(Error::InvalidArgument("sigma must be positive".into()));
    }
    let max_abs = curve
        .values()
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let y_extent = max_abs.max(2.0 * sigma) * 1.1;
    let frame = Frame::new(spec, 0.0, 1.0, -y_extent, y_extent, false);
    let mut doc = SvgDoc::new(spec);
    doc.axes(
        spec,
        &frame,
        &[0.0, 0.25, 0.5, 0.75, 1.0],
        &[-y_extent / 1.1, -y_extent / 2.2, 0.0, y_extent / 2.2, y_extent / 1.1],
    );

    doc.line(frame.x(0.0), frame.y(0.0), frame.x(1.0), frame.y(0.0), "#888888", 1.0, "4 3");

    // Triangle of total height 4 sigma, apex pointing into the plot.
    let apex_x = frame.px_left + 0.03 * (frame.px_right - frame.px_left);
    doc.polygon(
        &[
            (frame.x(0.0), frame.y(2.0 * sigma)),
            (frame.x(0.0), frame.y(-2.0 * sigma)),
            (apex_x, frame.y(0.0)),
        ],
        "#b0b0b0",
    );

    let points: Vec<(f64, f64)> = curve
        .abscissas()
        .zip(curve.values().iter())
        .map(|(x, &y)| (frame.x(x), frame.y(y)))
        .collect();
    doc.polyline(&points, "#1f4e9c", 1.2);

    if let Some(r) = report {
        let lines = [
            format!(
                "ECCE-MAD = {:.5} / \u{03c3}_n = {:.4} (P = {})",
                r.ecce_mad,
                r.mad_normalized,
                pvalue_label(r.p_mad)
            ),
            format!(
                "ECCE-R = {:.5} / \u{03c3}_n = {:.4} (P = {})",
                r.ecce_r,
                r.r_normalized,
                pvalue_label(r.p_r)
            ),
        ];
        for (i, line) in lines.iter().enumerate() {
            doc.text(
                frame.px_right - 6.0,
                frame.px_top + 14.0 + 14.0 * i as f64,
                line,
                "end",
                11.0,
                "#333333",
            );
        }
    }
    Ok(doc.finish())
}

fn pvalue_label(p: f64) -> String {
    if p == 0.0 {
        "0".into()
    } else {
        format!("{p:.2e}")
    }
}

const PALETTE: [&str; 8] = [
    "#1f4e9c", "#c23b22", "#2a7e43", "#8e5fa8", "#b8860b", "#17818c", "#d05c92", "#555555",
];

/// Line chart of sweep series, one line and legend entry per series.
/// The x-axis switches to logarithmic when the axis spans at least two
/// decades.
pub fn sweep_plot(result: &SweepResult, spec: &PlotSpec) -> Result<String> {
    validate_spec(spec)?;
    if result.series.is_empty() || result.axis.is_empty() {
        return Err(Error::InvalidArgument("empty sweep result".into()));
    }
    let x_min = *result.axis.first().unwrap() as f64;
    let x_max = *result.axis.last().unwrap() as f64;
    let log_x = x_min > 0.0 && x_max / x_min >= 100.0;

    let mut y_max = f64::MIN;
    let mut y_min = f64::MAX;
    for values in result.series.values() {
        for &v in values {
            if !v.is_finite() {
                return Err(Error::InvalidArgument("non-finite series value".into()));
            }
            y_max = y_max.max(v);
            y_min = y_min.min(v);
        }
    }
    if y_min == y_max {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let pad = 0.08 * (y_max - y_min);
    let frame = Frame::new(
        spec,
        x_min,
        x_max.max(x_min + 1.0),
        y_min - pad,
        y_max + pad,
        log_x,
    );
    let mut doc = SvgDoc::new(spec);
    let x_ticks: Vec<f64> = result.axis.iter().map(|&a| a as f64).collect();
    let y_ticks: Vec<f64> = (0..=4)
        .map(|i| y_min - pad + (y_max - y_min + 2.0 * pad) * i as f64 / 4.0)
        .collect();
    doc.axes(spec, &frame, &x_ticks, &y_ticks);

    for (i, (name, values)) in result.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<(f64, f64)> = result
            .axis
            .iter()
            .zip(values)
            .map(|(&x, &y)| (frame.x(x as f64), frame.y(y)))
            .collect();
        doc.polyline(&points, color, 1.4);
        for &(x, y) in &points {
            doc.circle(x, y, 2.0, color);
        }
        let ly = frame.px_top + 12.0 + 13.0 * i as f64;
        doc.line(frame.px_right - 110.0, ly - 3.0, frame.px_right - 94.0, ly - 3.0, color, 2.0, "");
        doc.text(frame.px_right - 90.0, ly, name, "start", 10.0, "#000000");
    }
    Ok(doc.finish())
}
