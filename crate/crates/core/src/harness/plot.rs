//! Standalone SVG line charts of median normalized scores.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::aggregate::SummaryRow;
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Renders every series of `kind` in `rows` to an SVG string.
///
/// One polyline and legend entry per metric (per metric and region in fgbg
/// runs). The y axis is fixed to [0, 1].
pub fn render_plot(rows: &[SummaryRow], kind: &str) -> Result<String> {
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    let mut axis_name = "";
    for row in rows.iter().filter(|r| r.kind == kind) {
        let Some(m) = row.median_normalized else { continue };
        let name = match row.region {
            Some(region) => format!("{} ({region})", row.metric),
            None => row.metric.clone(),
        };
        series.entry(name).or_default().push((row.axis_value, m));
        axis_name = row.axis_name;
    }
    if series.is_empty() {
        return Err(Error::NoData(kind.to_owned()));
    }
    for points in series.values_mut() {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let xs = series.values().flatten().map(|p| p.0);
    let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (1.0 - y.clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(kind)
    );

    for i in 0..=5 {
        let v = f64::from(i) / 5.0;
        let y = sy(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            tick(v)
        );
    }
    let mut xticks: Vec<f64> = series.values().flatten().map(|p| p.0).collect();
    xticks.sort_by(f64::total_cmp);
    xticks.dedup();
    let stride = xticks.len().div_ceil(11).max(1);
    for x in xticks.iter().step_by(stride) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(*x),
            TOP + plot_h + 16.0,
            tick(*x)
        );
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#333333"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        escape(axis_name)
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">median normalized score</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (i, (name, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes the chart for `kind` to `path`; [`Error::NoData`] when no row matches.
pub fn emit_plot(rows: &[SummaryRow], kind: &str, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_plot(rows, kind)?;
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(metrics: &[&str], severities: std::ops::RangeInclusive<u8>) -> Vec<SummaryRow> {
        metrics
            .iter()
            .flat_map(|m| {
                severities.clone().map(move |s| SummaryRow {
                    kind: "blur".into(),
                    axis_name: "severity",
                    axis_value: f64::from(s),
                    region: None,
                    metric: (*m).into(),
                    median_normalized: Some(1.0 - f64::from(s) / 40.0),
                    n: 3,
                    errors: 0,
                })
            })
            .collect()
    }

    #[test]
    fn one_polyline_per_metric() {
        let svg = render_plot(&rows(&["ssim"], 0..=20), "blur").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split(' ').count(), 21);

        let svg = render_plot(&rows(&["ssim", "psnr", "mse", "lpips"], 0..=20), "blur").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert_eq!(svg.matches("class=\"legend\"").count(), 4);
    }

    #[test]
    fn unknown_kind() {
        assert!(matches!(
            render_plot(&rows(&["ssim"], 0..=3), "fog"),
            Err(Error::NoData(_))
        ));
    }

    #[test]
    fn deterministic() {
        let r = rows(&["ssim", "psnr"], 0..=20);
        assert_eq!(render_plot(&r, "blur").unwrap(), render_plot(&r, "blur").unwrap());
    }
}
