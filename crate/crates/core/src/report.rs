//! Deterministic SVG charts and CSV tables.
//!
//! Output depends only on the input data: coordinates are printed with fixed
//! precision and nothing time- or environment-dependent is embedded.

use std::fmt::Write;

use crate::error::{Error, Result};

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;

const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

/// H-Scores of one backend at several layer counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BackendSeries {
    pub backend_name: String,
    /// `(n_layers, h_score)` pairs.
    pub points: Vec<(usize, f64)>,
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn plot_w() -> f64 {
    WIDTH - MARGIN_L - MARGIN_R
}

fn plot_h() -> f64 {
    HEIGHT - MARGIN_T - MARGIN_B
}

/// Y axis with `ticks + 1` labelled gridlines from `lo` to `hi`.
fn y_axis(out: &mut String, lo: f64, hi: f64, ticks: usize, label: &str) {
    for t in 0..=ticks {
        let v = lo + (hi - lo) * t as f64 / ticks as f64;
        let y = MARGIN_T + plot_h() * (1.0 - t as f64 / ticks as f64);
        let _ = writeln!(
            out,
            r##"<line x1="{MARGIN_L:.1}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="#dddddd"/>"##,
            MARGIN_L + plot_w()
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
            MARGIN_L - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        MARGIN_T + plot_h() / 2.0,
        MARGIN_T + plot_h() / 2.0,
        escape(label)
    );
}

fn x_label(out: &mut String, label: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w() / 2.0,
        HEIGHT - 14.0,
        escape(label)
    );
}

fn legend(out: &mut String, names: &[String]) {
    let x = WIDTH - MARGIN_R + 16.0;
    for (i, name) in names.iter().enumerate() {
        let y = MARGIN_T + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.1}" y="{y:.1}" width="12" height="12" fill="{}"/>"#,
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            x + 18.0,
            y + 10.0,
            escape(name)
        );
    }
}

/// Backends sorted by their one-layer H-Score (descending, ties by name);
/// backends without a one-layer score go last.
pub fn sort_by_first_layer(series: &mut [BackendSeries]) {
    let key = |s: &BackendSeries| s.points.iter().find(|(l, _)| *l == 1).map(|p| p.1);
    series.sort_by(|a, b| match (key(a), key(b)) {
        (Some(x), Some(y)) => y.total_cmp(&x).then_with(|| a.backend_name.cmp(&b.backend_name)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.backend_name.cmp(&b.backend_name),
    });
}

/// Grouped bars: one group per backend, one bar per layer count.
pub fn grouped_bar_chart(series: &[BackendSeries]) -> Result<String> {
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::NothingToReport("no H-Scores to chart".into()));
    }
    let mut series = series.to_vec();
    sort_by_first_layer(&mut series);
    let mut layers: Vec<usize> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    layers.sort_unstable();
    layers.dedup();

    let mut out = String::new();
    header(&mut out, "H-Score by backend and number of layers");
    y_axis(&mut out, 0.0, 2.0, 4, "H-Score");
    x_label(&mut out, "backend (sorted by 1-layer H-Score)");
    let group_w = plot_w() / series.len() as f64;
    let bar_w = group_w * 0.8 / layers.len() as f64;
    for (g, s) in series.iter().enumerate() {
        let gx = MARGIN_L + group_w * g as f64 + group_w * 0.1;
        for &(l, h) in &s.points {
            let li = layers.binary_search(&l).expect("layer collected above");
            let bh = plot_h() * (h.clamp(0.0, 2.0) / 2.0);
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>{} p={} H={:.4}</title></rect>"#,
                gx + bar_w * li as f64,
                MARGIN_T + plot_h() - bh,
                bar_w,
                bh,
                PALETTE[li % PALETTE.len()],
                escape(&s.backend_name),
                l,
                h
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            gx + group_w * 0.4,
            MARGIN_T + plot_h() + 16.0,
            escape(&s.backend_name)
        );
    }
    let baseline = MARGIN_T + plot_h() / 2.0;
    let _ = writeln!(
        out,
        r##"<line x1="{MARGIN_L:.1}" y1="{baseline:.2}" x2="{:.1}" y2="{baseline:.2}" stroke="#333333" stroke-dasharray="4 3"/>"##,
        MARGIN_L + plot_w()
    );
    let names: Vec<String> = layers.iter().map(|l| format!("p = {l}")).collect();
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Row-normalized histogram of accuracies per layer count: `rows[r][b]` is the
/// fraction of layer-`r` accuracies in bin `b` of `bins` equal bins on `[0, 1]`.
pub fn accuracy_heatmap_matrix(rows: &[(usize, Vec<f64>)], bins: usize) -> Result<Vec<Vec<f64>>> {
    if bins == 0 {
        return Err(Error::invalid("heatmap needs at least one bin"));
    }
    rows.iter()
        .map(|(l, values)| {
            if values.is_empty() {
                return Err(Error::NothingToReport(format!("no accuracies for {l} layers")));
            }
            let mut counts = vec![0.0; bins];
            for &x in values {
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::invalid(format!("accuracy {x} is outside [0, 1]")));
                }
                counts[((x * bins as f64) as usize).min(bins - 1)] += 1.0;
            }
            let total = values.len() as f64;
            Ok(counts.into_iter().map(|c| c / total).collect())
        })
        .collect()
}

/// Layers × accuracy-bin heatmap of accuracy distributions.
pub fn accuracy_heatmap(rows: &[(usize, Vec<f64>)], bins: usize) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::NothingToReport("no accuracy samples to chart".into()));
    }
    let matrix = accuracy_heatmap_matrix(rows, bins)?;
    let peak = matrix
        .iter()
        .flatten()
        .cloned()
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut out = String::new();
    header(&mut out, "Accuracy distribution per number of layers");
    x_label(&mut out, "accuracy");
    let cell_w = plot_w() / bins as f64;
    let cell_h = plot_h() / rows.len() as f64;
    for (r, ((l, _), row)) in rows.iter().zip(&matrix).enumerate() {
        let y = MARGIN_T + cell_h * r as f64;
        for (b, &v) in row.iter().enumerate() {
            // white to dark blue
            let t = v / peak;
            let shade = |c0: f64, c1: f64| (c0 + (c1 - c0) * t).round() as u8;
            let _ = writeln!(
                out,
                r##"<rect x="{:.2}" y="{y:.2}" width="{:.2}" height="{cell_h:.2}" fill="#{:02x}{:02x}{:02x}"/>"##,
                MARGIN_L + cell_w * b as f64,
                cell_w + 0.05,
                shade(255.0, 8.0),
                shade(255.0, 48.0),
                shade(255.0, 107.0)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">p = {l}</text>"#,
            MARGIN_L - 6.0,
            y + cell_h / 2.0 + 4.0
        );
    }
    for t in 0..=5 {
        let x = MARGIN_L + plot_w() * t as f64 / 5.0;
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.1}" text-anchor="middle">{:.1}</text>"#,
            MARGIN_T + plot_h() + 16.0,
            t as f64 / 5.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}">peak {peak:.3}</text>"#,
        WIDTH - MARGIN_R + 16.0,
        MARGIN_T + 10.0
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Histogram of H-Scores with the fitted normal density overlaid.
pub fn score_histogram(scores: &[f64], mean: f64, std: f64, bins: usize) -> Result<String> {
    if scores.is_empty() {
        return Err(Error::NothingToReport("no repeated H-Scores to chart".into()));
    }
    if bins == 0 {
        return Err(Error::invalid("histogram needs at least one bin"));
    }
    let (mut lo, mut hi) = scores
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));
    lo = lo.min(mean - 3.0 * std);
    hi = hi.max(mean + 3.0 * std);
    if hi - lo < 1e-9 {
        lo -= 0.01;
        hi += 0.01;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in scores {
        counts[(((s - lo) / width) as usize).min(bins - 1)] += 1;
    }
    let density = |c: usize| c as f64 / (scores.len() as f64 * width);
    let gauss = |x: f64| {
        if std > 0.0 {
            (-(x - mean).powi(2) / (2.0 * std * std)).exp() / (std * (2.0 * std::f64::consts::PI).sqrt())
        } else {
            0.0
        }
    };
    let top = counts
        .iter()
        .map(|&c| density(c))
        .chain(std::iter::once(gauss(mean)))
        .fold(0.0, f64::max)
        * 1.1;

    let mut out = String::new();
    header(&mut out, "H-Score distribution over repeats");
    y_axis(&mut out, 0.0, top, 4, "density");
    x_label(&mut out, "H-Score");
    let sx = |x: f64| MARGIN_L + plot_w() * (x - lo) / (hi - lo);
    let sy = |y: f64| MARGIN_T + plot_h() * (1.0 - y / top);
    for (b, &c) in counts.iter().enumerate() {
        let x0 = lo + width * b as f64;
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4e79a7" stroke="#ffffff" stroke-width="0.5"/>"##,
            sx(x0),
            sy(density(c)),
            sx(x0 + width) - sx(x0),
            MARGIN_T + plot_h() - sy(density(c))
        );
    }
    if std > 0.0 {
        let mut path = String::new();
        for i in 0..=200 {
            let x = lo + (hi - lo) * i as f64 / 200.0;
            let _ = write!(
                path,
                "{}{:.2},{:.2} ",
                if i == 0 { "M" } else { "L" },
                sx(x),
                sy(gauss(x))
            );
        }
        let _ = writeln!(
            out,
            r##"<path d="{}" fill="none" stroke="#f28e2b" stroke-width="2"/>"##,
            path.trim_end()
        );
    }
    for t in 0..=4 {
        let x = lo + (hi - lo) * t as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.1}" text-anchor="middle">{x:.3}</text>"#,
            sx(x),
            MARGIN_T + plot_h() + 16.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}">mean {mean:.4}</text>"#,
        WIDTH - MARGIN_R + 16.0,
        MARGIN_T + 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}">std {std:.4}</text>"#,
        WIDTH - MARGIN_R + 16.0,
        MARGIN_T + 28.0
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes rows as CSV with a header line. Fields containing commas or quotes are quoted.
pub fn csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let field = |s: String| {
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s
        }
    };
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.into_iter().map(field).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}
