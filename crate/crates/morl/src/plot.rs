//! Deterministic SVG rendering of experiment summaries.
//!
//! Every chart is assembled as plain text with fixed-precision coordinates,
//! so identical summaries produce byte-identical files — no fonts are
//! measured, no system renderer is consulted.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{MorlError, Result};
use crate::harness::report::{PhiSweepSummary, Summary, VariantComparisonSummary};

/// Chart pixel geometry plus the data window it maps onto.
struct Frame {
    width: f64,
    height: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn new(x_range: (f64, f64), y_range: (f64, f64)) -> Frame {
        Frame {
            width: 800.0,
            height: 480.0,
            left: 70.0,
            right: 20.0,
            top: 56.0,
            bottom: 52.0,
            x_min: x_range.0,
            x_max: x_range.1,
            y_min: y_range.0,
            y_max: y_range.1,
        }
    }

    fn plot_width(&self) -> f64 {
        self.width - self.left - self.right
    }

    fn plot_height(&self) -> f64 {
        self.height - self.top - self.bottom
    }

    fn x(&self, v: f64) -> f64 {
        self.left + (v - self.x_min) / (self.x_max - self.x_min) * self.plot_width()
    }

    fn y(&self, v: f64) -> f64 {
        self.height - self.bottom - (v - self.y_min) / (self.y_max - self.y_min) * self.plot_height()
    }
}

/// Series colors, assigned by index (wraps around).
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// Fixed-precision pixel coordinate (deterministic across runs).
fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Tick label: fixed precision with trailing zeros trimmed.
fn label(v: f64) -> String {
    let mut s = format!("{v:.3}");
    while s.contains('.') && (s.ends_with('0') || s.ends_with('.')) {
        s.pop();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Widens a degenerate or tight range so every chart has visible extent.
fn pad_range(min: f64, max: f64) -> (f64, f64) {
    let span = max - min;
    if span <= 0.0 {
        let pad = if min.abs() > 1e-12 { min.abs() * 0.1 } else { 1.0 };
        (min - pad, max + pad)
    } else {
        (min - span * 0.05, max + span * 0.05)
    }
}

/// Step chosen from the 1–2–5 ladder so roughly `target` ticks fit.
fn tick_step(span: f64, target: usize) -> f64 {
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    for mult in [1.0, 2.0, 5.0, 10.0] {
        if mag * mult >= raw {
            return mag * mult;
        }
    }
    mag * 10.0
}

fn ticks(min: f64, max: f64, target: usize) -> Vec<f64> {
    let step = tick_step(max - min, target);
    let mut v = (min / step).ceil() * step;
    let mut out = Vec::new();
    while v <= max + step * 1e-9 {
        // Snap near-zero ticks so labels read "0" rather than "-0".
        out.push(if v.abs() < step * 1e-9 { 0.0 } else { v });
        v += step;
    }
    out
}

fn open_svg(frame: &Frame, title: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"monospace\" font-size=\"12\">\n",
        w = frame.width,
        h = frame.height
    );
    let _ = write!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n",
        w = frame.width,
        h = frame.height
    );
    let _ = write!(
        s,
        "<text x=\"{}\" y=\"22\" font-size=\"15\" fill=\"#111111\">{}</text>\n",
        px(frame.left),
        xml_escape(title)
    );
    s
}

/// Axes, gridlines, tick labels, and axis titles.
fn draw_axes(s: &mut String, frame: &Frame, x_title: &str, y_title: &str) {
    let x0 = frame.left;
    let x1 = frame.width - frame.right;
    let y0 = frame.height - frame.bottom;
    let y1 = frame.top;
    for ty in ticks(frame.y_min, frame.y_max, 6) {
        let ypx = frame.y(ty);
        let _ = write!(
            s,
            "<line x1=\"{}\" y1=\"{ypx}\" x2=\"{}\" y2=\"{ypx}\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n\
             <text x=\"{}\" y=\"{}\" text-anchor=\"end\" fill=\"#333333\">{}</text>\n",
            px(x0),
            px(x1),
            px(x0 - 8.0),
            px(ypx + 4.0),
            label(ty),
            ypx = px(ypx),
        );
    }
    let _ = write!(
        s,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"#333333\" stroke-width=\"1\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        x0 = px(x0),
        x1 = px(x1),
        y0 = px(y0),
        y1 = px(y1),
    );
    let _ = write!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#333333\">{}</text>\n",
        px((x0 + x1) / 2.0),
        px(frame.height - 12.0),
        xml_escape(x_title)
    );
    let _ = write!(
        s,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\" fill=\"#333333\">{}</text>\n",
        px((y0 + y1) / 2.0),
        px((y0 + y1) / 2.0),
        xml_escape(y_title)
    );
}

/// One labeled tick per category along the x axis.
fn draw_category_ticks(s: &mut String, frame: &Frame, positions: &[f64], names: &[String]) {
    let y0 = frame.height - frame.bottom;
    let step = (positions.len() / 12).max(1);
    for (i, (&pos, name)) in positions.iter().zip(names).enumerate() {
        let xpx = frame.x(pos);
        let _ = write!(
            s,
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
            px(y0),
            px(y0 + 4.0),
            x = px(xpx),
        );
        if i % step == 0 {
            let _ = write!(
                s,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#333333\">{}</text>\n",
                px(xpx),
                px(y0 + 18.0),
                xml_escape(name)
            );
        }
    }
}

/// Color swatch + name per series, laid out along the top of the chart.
fn draw_legend(s: &mut String, frame: &Frame, names: &[String]) {
    let y = frame.top - 14.0;
    let mut x = frame.left;
    for (i, name) in names.iter().enumerate() {
        let _ = write!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" fill=\"#333333\">{}</text>\n",
            px(x),
            px(y - 10.0),
            color(i),
            px(x + 16.0),
            px(y),
            xml_escape(name)
        );
        x += 16.0 + 9.0 * (name.len() as f64) + 24.0;
    }
}

/// Vertical error whisker with end caps, centered at data `(x, mean)`.
fn draw_whisker(s: &mut String, frame: &Frame, x: f64, mean: f64, std: f64, stroke: &str) {
    let xpx = frame.x(x);
    let lo = frame.y(mean - std);
    let hi = frame.y(mean + std);
    let _ = write!(
        s,
        "<line x1=\"{x}\" y1=\"{lo}\" x2=\"{x}\" y2=\"{hi}\" stroke=\"{stroke}\" stroke-width=\"1.5\"/>\n\
         <line x1=\"{xl}\" y1=\"{lo}\" x2=\"{xr}\" y2=\"{lo}\" stroke=\"{stroke}\" stroke-width=\"1.5\"/>\n\
         <line x1=\"{xl}\" y1=\"{hi}\" x2=\"{xr}\" y2=\"{hi}\" stroke=\"{stroke}\" stroke-width=\"1.5\"/>\n",
        x = px(xpx),
        xl = px(xpx - 4.0),
        xr = px(xpx + 4.0),
        lo = px(lo),
        hi = px(hi),
    );
}

/// Line chart of post-change return Γ_c per preference segment: one series
/// per algorithm, shaded ±1 std band across runs.
pub fn render_gamma_plot(summary: &Summary) -> Result<String> {
    let segments = summary.preference_firsts.len();
    if segments == 0 || summary.algorithms.is_empty() {
        return Err(MorlError::Config(
            "summary has no segments or no algorithms to plot".into(),
        ));
    }
    for algo in &summary.algorithms {
        if algo.gamma_c_mean.len() != segments || algo.gamma_c_std.len() != segments {
            return Err(MorlError::Config(format!(
                "algorithm {} has {} segment means for {} segments",
                algo.algorithm,
                algo.gamma_c_mean.len(),
                segments
            )));
        }
    }

    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for algo in &summary.algorithms {
        for (m, sd) in algo.gamma_c_mean.iter().zip(&algo.gamma_c_std) {
            y_lo = y_lo.min(m - sd);
            y_hi = y_hi.max(m + sd);
        }
    }
    let frame = Frame::new(
        pad_range(0.0, (segments - 1) as f64),
        pad_range(y_lo, y_hi),
    );

    let title = format!(
        "Post-change return per preference segment ({}, {})",
        summary.env, summary.mode
    );
    let mut s = open_svg(&frame, &title);
    draw_axes(&mut s, &frame, "preference segment (first weight)", "mean return, final window");

    let positions: Vec<f64> = (0..segments).map(|k| k as f64).collect();
    let names: Vec<String> = summary
        .preference_firsts
        .iter()
        .map(|w| label(*w))
        .collect();
    draw_category_ticks(&mut s, &frame, &positions, &names);

    for (i, algo) in summary.algorithms.iter().enumerate() {
        // Band: upper edge left-to-right, then lower edge back.
        let mut pts = String::new();
        for (k, (m, sd)) in algo.gamma_c_mean.iter().zip(&algo.gamma_c_std).enumerate() {
            let _ = write!(pts, "{},{} ", px(frame.x(k as f64)), px(frame.y(m + sd)));
        }
        for (k, (m, sd)) in algo
            .gamma_c_mean
            .iter()
            .zip(&algo.gamma_c_std)
            .enumerate()
            .rev()
        {
            let _ = write!(pts, "{},{} ", px(frame.x(k as f64)), px(frame.y(m - sd)));
        }
        let _ = write!(
            s,
            "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
            pts.trim_end(),
            color(i)
        );

        let mut line = String::new();
        for (k, m) in algo.gamma_c_mean.iter().enumerate() {
            let _ = write!(line, "{},{} ", px(frame.x(k as f64)), px(frame.y(*m)));
        }
        let _ = write!(
            s,
            "<polyline class=\"series\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            line.trim_end(),
            color(i)
        );
        for (k, m) in algo.gamma_c_mean.iter().enumerate() {
            let _ = write!(
                s,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n",
                px(frame.x(k as f64)),
                px(frame.y(*m)),
                color(i)
            );
        }
    }

    let legend: Vec<String> = summary
        .algorithms
        .iter()
        .map(|a| a.algorithm.clone())
        .collect();
    draw_legend(&mut s, &frame, &legend);
    s.push_str("</svg>\n");
    Ok(s)
}

/// Grouped bar chart of adaptation loss per preference boundary, error bars
/// spanning ±1 std across runs. Returns `None` when no algorithm reports any
/// boundary losses (single-segment schedules).
pub fn render_loss_plot(summary: &Summary) -> Result<Option<String>> {
    let boundaries = summary
        .algorithms
        .iter()
        .map(|a| a.loss_mean.len())
        .max()
        .unwrap_or(0);
    if boundaries == 0 {
        return Ok(None);
    }
    for algo in &summary.algorithms {
        if algo.loss_mean.len() != boundaries || algo.loss_std.len() != boundaries {
            return Err(MorlError::Config(format!(
                "algorithm {} has {} boundary losses, expected {boundaries}",
                algo.algorithm,
                algo.loss_mean.len()
            )));
        }
    }

    let mut y_lo: f64 = 0.0;
    let mut y_hi: f64 = 0.0;
    for algo in &summary.algorithms {
        for (m, sd) in algo.loss_mean.iter().zip(&algo.loss_std) {
            y_lo = y_lo.min(m - sd);
            y_hi = y_hi.max(m + sd);
        }
    }
    let frame = Frame::new((-0.5, boundaries as f64 - 0.5), pad_range(y_lo, y_hi));

    let title = format!(
        "Adaptation loss per preference change ({}, {})",
        summary.env, summary.mode
    );
    let mut s = open_svg(&frame, &title);
    draw_axes(&mut s, &frame, "preference change", "loss (drop in mean return)");

    let positions: Vec<f64> = (0..boundaries).map(|k| k as f64).collect();
    let names: Vec<String> = (0..boundaries).map(|k| format!("{}", k + 1)).collect();
    draw_category_ticks(&mut s, &frame, &positions, &names);

    let n_algos = summary.algorithms.len();
    let slot = 1.0; // one data unit per boundary
    let group_width = slot * 0.8;
    let bar_width = group_width / n_algos as f64;
    let zero_px = frame.y(0.0);

    for (i, algo) in summary.algorithms.iter().enumerate() {
        for (k, (m, sd)) in algo.loss_mean.iter().zip(&algo.loss_std).enumerate() {
            let center = k as f64 - group_width / 2.0 + bar_width * (i as f64 + 0.5);
            let x_left = frame.x(center - bar_width * 0.45);
            let x_right = frame.x(center + bar_width * 0.45);
            let y_val = frame.y(*m);
            let (top, bot) = if *m >= 0.0 {
                (y_val, zero_px)
            } else {
                (zero_px, y_val)
            };
            let _ = write!(
                s,
                "<rect class=\"bar\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                px(x_left),
                px(top),
                px(x_right - x_left),
                px(bot - top),
                color(i)
            );
            draw_whisker(&mut s, &frame, center, *m, *sd, "#333333");
        }
    }

    let legend: Vec<String> = summary
        .algorithms
        .iter()
        .map(|a| a.algorithm.clone())
        .collect();
    draw_legend(&mut s, &frame, &legend);
    s.push_str("</svg>\n");
    Ok(Some(s))
}

/// Box-and-whisker chart of per-run loss distributions across the φ grid.
pub fn render_phi_boxplot(sweep: &PhiSweepSummary, env: &str) -> Result<String> {
    let n = sweep.phi.len();
    if n == 0 {
        return Err(MorlError::Config("phi sweep has no entries to plot".into()));
    }
    if sweep.boxplots.len() != n {
        return Err(MorlError::Config(format!(
            "phi sweep has {} boxplots for {n} phi values",
            sweep.boxplots.len()
        )));
    }
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for b in &sweep.boxplots {
        y_lo = y_lo.min(b.min);
        y_hi = y_hi.max(b.max);
    }
    let frame = Frame::new((-0.7, n as f64 - 0.3), pad_range(y_lo, y_hi));

    let mut s = open_svg(&frame, &format!("Adaptation loss vs steppingstone radius ({env})"));
    draw_axes(&mut s, &frame, "phi", "loss per preference change");

    let positions: Vec<f64> = (0..n).map(|k| k as f64).collect();
    let names: Vec<String> = sweep.phi.iter().map(|p| label(*p)).collect();
    draw_category_ticks(&mut s, &frame, &positions, &names);

    for (k, b) in sweep.boxplots.iter().enumerate() {
        let xc = k as f64;
        let x_left = frame.x(xc - 0.3);
        let x_right = frame.x(xc + 0.3);
        let xc_px = frame.x(xc);
        // Whisker stems and caps.
        let _ = write!(
            s,
            "<line x1=\"{xc}\" y1=\"{}\" x2=\"{xc}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"1\"/>\n\
             <line x1=\"{xc}\" y1=\"{}\" x2=\"{xc}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"1\"/>\n\
             <line x1=\"{cl}\" y1=\"{mn}\" x2=\"{cr}\" y2=\"{mn}\" stroke=\"#333333\" stroke-width=\"1\"/>\n\
             <line x1=\"{cl}\" y1=\"{mx}\" x2=\"{cr}\" y2=\"{mx}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
            px(frame.y(b.min)),
            px(frame.y(b.q1)),
            px(frame.y(b.q3)),
            px(frame.y(b.max)),
            xc = px(xc_px),
            cl = px(xc_px - 8.0),
            cr = px(xc_px + 8.0),
            mn = px(frame.y(b.min)),
            mx = px(frame.y(b.max)),
        );
        // Interquartile box and median line.
        let _ = write!(
            s,
            "<rect class=\"box\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" \
             fill=\"#1f77b4\" fill-opacity=\"0.35\" stroke=\"#1f77b4\"/>\n\
             <line x1=\"{}\" y1=\"{md}\" x2=\"{}\" y2=\"{md}\" stroke=\"#d62728\" stroke-width=\"2\"/>\n",
            px(x_left),
            px(frame.y(b.q3)),
            px(x_right - x_left),
            px(frame.y(b.q1) - frame.y(b.q3)),
            px(x_left),
            px(x_right),
            md = px(frame.y(b.median)),
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Bar chart comparing configuration variants (robustness metrics or
/// distance functions), error bars spanning ±1 std across runs.
pub fn render_variant_bars(comparison: &VariantComparisonSummary) -> Result<String> {
    if comparison.variants.is_empty() {
        return Err(MorlError::Config("variant comparison has no entries".into()));
    }
    let mut y_lo: f64 = 0.0;
    let mut y_hi: f64 = 0.0;
    for v in &comparison.variants {
        y_lo = y_lo.min(v.mean - v.std);
        y_hi = y_hi.max(v.mean + v.std);
    }
    let n = comparison.variants.len();
    let frame = Frame::new((-0.7, n as f64 - 0.3), pad_range(y_lo, y_hi));

    let mut s = open_svg(
        &frame,
        &format!("Sum of segment medians by {}", comparison.axis),
    );
    draw_axes(&mut s, &frame, &comparison.axis, "sum of segment medians");

    let positions: Vec<f64> = (0..n).map(|k| k as f64).collect();
    let names: Vec<String> = comparison.variants.iter().map(|v| v.name.clone()).collect();
    draw_category_ticks(&mut s, &frame, &positions, &names);

    let zero_px = frame.y(0.0);
    for (k, v) in comparison.variants.iter().enumerate() {
        let x_left = frame.x(k as f64 - 0.3);
        let x_right = frame.x(k as f64 + 0.3);
        let y_val = frame.y(v.mean);
        let (top, bot) = if v.mean >= 0.0 {
            (y_val, zero_px)
        } else {
            (zero_px, y_val)
        };
        let _ = write!(
            s,
            "<rect class=\"bar\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
            px(x_left),
            px(top),
            px(x_right - x_left),
            px(bot - top),
            color(k)
        );
        draw_whisker(&mut s, &frame, k as f64, v.mean, v.std, "#333333");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Rendered chart files plus any sections that had to be skipped.
pub struct PlotBundle {
    /// `(file name, svg text)` pairs, in emission order.
    pub files: Vec<(String, String)>,
    /// Human-readable notes about omitted charts.
    pub warnings: Vec<String>,
}

/// Renders every chart the summary has data for.
pub fn render_plots(summary: &Summary) -> Result<PlotBundle> {
    let mut files = Vec::new();
    let mut warnings = Vec::new();

    if summary.algorithms.is_empty() || summary.preference_firsts.is_empty() {
        warnings.push(
            "summary has no per-algorithm section; return and loss charts omitted".to_string(),
        );
    } else {
        files.push(("gamma_c.svg".to_string(), render_gamma_plot(summary)?));
        match render_loss_plot(summary)? {
            Some(svg) => files.push(("loss.svg".to_string(), svg)),
            None => warnings.push(
                "loss section is empty (single-segment schedule); loss plot omitted".to_string(),
            ),
        }
    }

    if let Some(sweep) = &summary.phi_sweep {
        files.push((
            "phi_sweep.svg".to_string(),
            render_phi_boxplot(sweep, &summary.env)?,
        ));
    }
    if let Some(comparison) = &summary.variant_comparison {
        files.push((
            "variants.svg".to_string(),
            render_variant_bars(comparison)?,
        ));
    }
    Ok(PlotBundle { files, warnings })
}

/// Renders and writes all charts into `dir` (created if missing), returning
/// the written paths and any warnings for the caller to surface.
pub fn write_plots(summary: &Summary, dir: &Path) -> Result<(Vec<PathBuf>, Vec<String>)> {
    let bundle = render_plots(summary)?;
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (name, svg) in &bundle.files {
        let path = dir.join(name);
        fs::write(&path, svg)?;
        paths.push(path);
    }
    Ok((paths, bundle.warnings))
}
