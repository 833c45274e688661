//! Plot data as CSV plus minimal SVG line and bar charts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixer::{beta_pdf, BetaParams, ABLATION_BETAS};
use crate::trainer::{read_curve_csv, read_sweep_csv, write_curve_csv, EpochRecord, SweepRow};

/// Number of evenly spaced points in `[0, 1]` for density curves.
pub const DENSITY_POINTS: usize = 1001;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn frame(out: &mut String, title: &str, x_label: &str, y_label: &str, (y0, y1): (f64, f64)) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(out, r#"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#);
    let _ = writeln!(out, r#"<line x1="{l}" y1="{t}" x2="{l}" y2="{b}" stroke="black"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{b}" text-anchor="end" font-size="10">{y0:.3}</text>"#,
        l - 4.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{y1:.3}</text>"#,
        l - 4.0,
        t + 4.0
    );
}

/// One `<path>` per series.
pub fn line_chart_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x0, x1) = extent(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = extent(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut out = String::new();
    frame(&mut out, title, x_label, y_label, (y0, y1));
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for &(x, y) in &s.points {
            if !(x.is_finite() && y.is_finite()) {
                pen_down = false;
                continue;
            }
            let _ = write!(d, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, sx(x), sy(y));
            pen_down = true;
        }
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"><title>{}</title></path>"#,
            d.trim_end(),
            escape(&s.name)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 150.0,
            MARGIN + 14.0 * k as f64,
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// One `<rect>` per bar, with a `<line>` error bar of ±std.
pub fn bar_chart_svg(title: &str, y_label: &str, bars: &[(String, f64, f64)]) -> String {
    let top = bars.iter().map(|b| b.1 + b.2.max(0.0)).fold(0.0, f64::max);
    let (y0, y1) = (0.0, if top > 0.0 { top } else { 1.0 });
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut out = String::new();
    frame(&mut out, title, "", y_label, (y0, y1));
    let slot = (WIDTH - 2.0 * MARGIN) / bars.len().max(1) as f64;
    for (k, (label, mean, std)) in bars.iter().enumerate() {
        let x = MARGIN + slot * k as f64 + slot * 0.1;
        let w = slot * 0.8;
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="{w:.2}" height="{:.2}" fill="{color}"><title>{}</title></rect>"#,
            sy(*mean),
            (sy(0.0) - sy(*mean)).max(0.0),
            escape(label)
        );
        let cx = x + w / 2.0;
        let _ = writeln!(
            out,
            r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
            sy(mean - std),
            sy(mean + std)
        );
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="end" font-size="9" transform="rotate(-45 {cx:.2} {:.2})">{}</text>"#,
            HEIGHT - MARGIN + 12.0,
            HEIGHT - MARGIN + 12.0,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

/// `x` followed by one density column per distribution.
pub fn beta_density_table(betas: &[BetaParams]) -> Result<Vec<Vec<f64>>> {
    (0..DENSITY_POINTS)
        .map(|i| {
            let x = i as f64 / (DENSITY_POINTS - 1) as f64;
            let mut row = vec![x];
            for &b in betas {
                row.push(beta_pdf(b, x)?);
            }
            Ok(row)
        })
        .collect()
}

pub fn write_beta_density_csv(path: &Path, betas: &[BetaParams]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let mut header = vec!["x".to_string()];
    header.extend(betas.iter().map(|b| b.to_string()));
    w.write_record(&header)?;
    for row in beta_density_table(betas)? {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn beta_density_svg(betas: &[BetaParams]) -> Result<String> {
    let table = beta_density_table(betas)?;
    let series: Vec<Series> = betas
        .iter()
        .enumerate()
        .map(|(k, b)| Series {
            name: b.to_string(),
            points: table.iter().map(|r| (r[0], r[k + 1])).collect(),
        })
        .collect();
    Ok(line_chart_svg("Beta densities", "lambda", "density", &series))
}

/// Training-loss and validation-accuracy series of each method.
pub fn loss_curve_svg(curves: &[(String, Vec<EpochRecord>)]) -> String {
    let mut series = Vec::new();
    for (name, c) in curves {
        series.push(Series {
            name: format!("{name} train loss"),
            points: c.iter().map(|r| (r.epoch as f64, r.train_loss)).collect(),
        });
        series.push(Series {
            name: format!("{name} val acc"),
            points: c.iter().map(|r| (r.epoch as f64, r.val_acc)).collect(),
        });
    }
    line_chart_svg("Training loss and validation accuracy", "epoch", "value", &series)
}

pub fn sweep_svg(rows: &[SweepRow]) -> String {
    let bars: Vec<(String, f64, f64)> = rows
        .iter()
        .map(|r| (format!("{} {} {}", r.dataset, r.method, r.setting), r.mean, r.std))
        .collect();
    bar_chart_svg("Cross-validated accuracy", "accuracy", &bars)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    BetaDensity,
    LossCurve,
    SweepBars,
}

/// Files written by [`emit_plot_data`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlotFiles {
    pub csv: PathBuf,
    pub svg: PathBuf,
}

/// Writes `out` with `.csv` and `.svg` extensions. `input` is the metrics or
/// sweep CSV for the curve and bar charts and is ignored for densities.
pub fn emit_plot_data(kind: PlotKind, input: Option<&Path>, out: &Path) -> Result<PlotFiles> {
    let files = PlotFiles {
        csv: out.with_extension("csv"),
        svg: out.with_extension("svg"),
    };
    if let Some(parent) = files.csv.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let need_input = || input.ok_or_else(|| Error::Config("this plot needs an input CSV".into()));
    match kind {
        PlotKind::BetaDensity => {
            write_beta_density_csv(&files.csv, &ABLATION_BETAS)?;
            write_svg(&files.svg, &beta_density_svg(&ABLATION_BETAS)?)?;
        }
        PlotKind::LossCurve => {
            let path = need_input()?;
            let curve = read_curve_csv(path)?;
            if curve.is_empty() {
                return Err(Error::Data(format!("{}: no epochs", path.display())));
            }
            let name = path
                .file_stem()
                .map_or("run".into(), |s| s.to_string_lossy().into_owned());
            if path != files.csv {
                write_curve_csv(&curve, &files.csv)?;
            }
            write_svg(&files.svg, &loss_curve_svg(&[(name, curve)]))?;
        }
        PlotKind::SweepBars => {
            let path = need_input()?;
            let rows = read_sweep_csv(path)?;
            if path != files.csv {
                crate::trainer::write_sweep_csv(&rows, &files.csv)?;
            }
            write_svg(&files.svg, &sweep_svg(&rows))?;
        }
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_table_shape_and_values() {
        let t = beta_density_table(&[BetaParams::new(2.0, 2.0).unwrap()]).unwrap();
        assert_eq!(t.len(), 1001);
        assert_eq!(t[500][0], 0.5);
        assert!((t[500][1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn svg_has_one_element_per_series() {
        let svg = beta_density_svg(&ABLATION_BETAS).unwrap();
        assert_eq!(svg.matches("<path ").count(), 5);
        let bars = bar_chart_svg("t", "y", &[("a<b".into(), 0.5, 0.1), ("c".into(), 0.7, 0.0)]);
        assert_eq!(bars.matches("<rect ").count(), 2);
        assert!(bars.contains("a&lt;b"));
    }

    #[test]
    fn emit_loss_curve_from_csv() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("metrics.csv");
        let curve: Vec<EpochRecord> = (0..350)
            .map(|e| EpochRecord {
                epoch: e,
                train_loss: 1.0 / (1.0 + e as f64),
                val_acc: 0.5,
            })
            .collect();
        write_curve_csv(&curve, &input).unwrap();
        let files = emit_plot_data(PlotKind::LossCurve, Some(&input), &dir.path().join("out/curve")).unwrap();
        let text = std::fs::read_to_string(&files.csv).unwrap();
        assert_eq!(text.lines().count(), 351);
        assert!(std::fs::read_to_string(&files.svg).unwrap().contains("<path "));
        assert!(emit_plot_data(PlotKind::LossCurve, None, &dir.path().join("x")).is_err());
        std::fs::write(&input, "nonsense\n1,2\n").unwrap();
        assert!(emit_plot_data(PlotKind::LossCurve, Some(&input), &dir.path().join("y")).is_err());
    }
}
