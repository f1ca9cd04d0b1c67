//! CSV, text summary and SVG plots for a sweep.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{CellRecord, ExperimentReport, Route};
use crate::error::{Error, Result};
use crate::solver::fmt_float;

pub const CELLS_HEADER: [&str; 14] = [
    "problem",
    "dt",
    "delta",
    "route",
    "u_bar",
    "u_oracle",
    "err_signed",
    "lower_bound",
    "upper_bound",
    "lower_ok",
    "upper_ok",
    "dual_slack",
    "sweeps",
    "residual",
];

/// Write `cells.csv`, `summary.txt`, `error_vs_dt.svg` and
/// `error_vs_delta.svg` into `dir`, creating it if needed.
pub fn emit_reports(report: &ExperimentReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_cells_csv(&report.cells, &dir.join("cells.csv"))?;
    let summary = dir.join("summary.txt");
    fs::write(&summary, summary_text(report)).map_err(|e| Error::io(&summary, e))?;
    let svg = dir.join("error_vs_dt.svg");
    fs::write(&svg, dt_plot(report)).map_err(|e| Error::io(&svg, e))?;
    let svg = dir.join("error_vs_delta.svg");
    fs::write(&svg, delta_plot(report)).map_err(|e| Error::io(&svg, e))?;
    Ok(())
}

fn write_cells_csv(cells: &[CellRecord], path: &Path) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CELLS_HEADER).map_err(csv_err)?;
    for c in cells {
        w.write_record([
            c.problem.clone(),
            fmt_float(c.dt),
            fmt_float(c.delta),
            c.route.to_string(),
            fmt_float(c.u_bar),
            fmt_float(c.u_oracle),
            fmt_float(c.err_signed),
            fmt_float(c.lower_bound),
            fmt_float(c.upper_bound),
            c.lower_ok.to_string(),
            c.upper_ok.to_string(),
            fmt_float(c.dual_slack),
            c.sweeps.to_string(),
            fmt_float(c.residual),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read a `cells.csv` written by [`emit_reports`].
pub fn read_cells_csv(path: &Path) -> Result<Vec<CellRecord>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CELLS_HEADER) {
        return Err(Error::Parse(format!("unexpected cells header in {}", path.display())));
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = |i: usize| rec.get(i).unwrap_or_default();
        let float = |i: usize| {
            field(i)
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}, `{}`: {e}", line + 1, CELLS_HEADER[i])))
        };
        let flag = |i: usize| {
            field(i)
                .parse::<bool>()
                .map_err(|e| Error::Parse(format!("row {}, `{}`: {e}", line + 1, CELLS_HEADER[i])))
        };
        out.push(CellRecord {
            problem: field(0).to_string(),
            dt: float(1)?,
            delta: float(2)?,
            route: field(3).parse()?,
            u_bar: float(4)?,
            u_oracle: float(5)?,
            err_signed: float(6)?,
            lower_bound: float(7)?,
            upper_bound: float(8)?,
            lower_ok: flag(9)?,
            upper_ok: flag(10)?,
            dual_slack: float(11)?,
            sweeps: field(12)
                .parse()
                .map_err(|e| Error::Parse(format!("row {}, `sweeps`: {e}", line + 1)))?,
            residual: float(13)?,
        });
    }
    Ok(out)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |o| format!("{o:.4}"))
}

impl ExperimentReport {
    /// The text written to `summary.txt`.
    pub fn summary(&self) -> String {
        summary_text(self)
    }
}

fn summary_text(r: &ExperimentReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "problem: {}", r.problem_id);
    let _ = writeln!(s, "start point: {:?}", r.x_s);
    if let Some(o) = &r.oracle {
        let _ = writeln!(s, "oracle: {} value {:.12e} accuracy {:.3e}", o.choice, o.used.value, o.used.accuracy);
        if let Some(g) = &o.grid {
            let _ = writeln!(s, "grid oracle: {:.12e} accuracy {:.3e}", g.value, g.accuracy);
        }
        if let Some(d) = o.disagreement() {
            let _ = writeln!(s, "exact vs grid: {d:.3e}");
        }
    }
    let _ = writeln!(s, "cells: {}", r.cells.len());
    if r.cells.is_empty() {
        let _ = writeln!(s, "no cells were run");
    }
    let lower = r.cells.iter().filter(|c| !c.failed() && !c.lower_ok).count();
    let upper = r.cells.iter().filter(|c| !c.failed() && !c.upper_ok).count();
    let _ = writeln!(s, "lower bound violations: {lower}");
    let _ = writeln!(s, "upper bound violations: {upper}");
    let _ = writeln!(s, "failed cells: {}", r.failures.len());
    for (k, msg) in &r.failures {
        let c = &r.cells[*k];
        let _ = writeln!(s, "  dt={} delta={} route={}: {msg}", c.dt, c.delta, c.route);
    }
    for (route, order) in &r.dt_order {
        let _ = writeln!(s, "order in dt ({route}): {}", fmt_opt(*order));
    }
    for d in &r.delta_sensitivity {
        let _ = writeln!(
            s,
            "delta sensitivity ({}, dt={}): slope {} max increase {:.3e} {}",
            d.route,
            d.dt,
            fmt_opt(d.slope),
            d.max_increase,
            if d.no_blowup { "no blow-up" } else { "BLOW-UP" }
        );
    }
    let _ = writeln!(s, "exit code: {}", r.exit_code());
    s
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

/// Log-log line plot; non-positive values are left out.
fn svg_loglog(title: &str, xlabel: &str, series: &[Series]) -> String {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{title}</text>"#, W / 2.0);
    let (x0, y0, x1, y1) = (MARGIN, H - MARGIN, W - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{xlabel}</text>"#, W / 2.0, H - 15.0);
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 15 {})">|error|</text>"#,
        H / 2.0,
        H / 2.0
    );
    if pts.is_empty() {
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">no data</text>"#, W / 2.0, H / 2.0);
        out.push_str("</svg>\n");
        return out;
    }
    let range = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min).floor();
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max).ceil();
        if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) }
    };
    let (lx, hx) = range(|p| p.0);
    let (ly, hy) = range(|p| p.1);
    let px = |v: f64| x0 + (v - lx) / (hx - lx) * (x1 - x0);
    let py = |v: f64| y0 - (v - ly) / (hy - ly) * (y0 - y1);
    for d in (lx as i32)..=(hx as i32) {
        let x = px(d as f64);
        let _ = writeln!(out, r#"<line x1="{x:.1}" y1="{y0}" x2="{x:.1}" y2="{}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.1}" y="{}" text-anchor="middle" font-size="11">1e{d}</text>"#, y0 + 18.0);
    }
    for d in (ly as i32)..=(hy as i32) {
        let y = py(d as f64);
        let _ = writeln!(out, r#"<line x1="{}" y1="{y:.1}" x2="{x0}" y2="{y:.1}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end" font-size="11">1e{d}</text>"#, x0 - 8.0, y + 4.0);
    }
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.1},{:.1}", px(x.log10()), py(y.log10())))
            .collect();
        if path.is_empty() {
            continue;
        }
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" "));
        for p in &path {
            let (cx, cy) = p.split_once(',').expect("formatted pair");
            let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
        }
        let ly = y1 + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ly}" font-size="11" fill="{color}">{}</text>"#,
            x0 + 8.0,
            s.label
        );
    }
    out.push_str("</svg>\n");
    out
}

fn routes(r: &ExperimentReport) -> Vec<Route> {
    let mut v: Vec<Route> = r.cells.iter().map(|c| c.route).collect();
    v.sort();
    v.dedup();
    v
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    v
}

fn dt_plot(r: &ExperimentReport) -> String {
    let mut series = Vec::new();
    for route in routes(r) {
        for delta in distinct(r.cells.iter().map(|c| c.delta)) {
            series.push(Series {
                label: format!("{route}, delta={delta:e}"),
                points: r
                    .cells
                    .iter()
                    .filter(|c| c.route == route && c.delta == delta)
                    .map(|c| (c.dt, c.err_signed.abs()))
                    .collect(),
            });
        }
    }
    svg_loglog(&format!("{}: error against dt", r.problem_id), "dt", &series)
}

fn delta_plot(r: &ExperimentReport) -> String {
    let mut series = Vec::new();
    for route in routes(r) {
        for dt in distinct(r.cells.iter().map(|c| c.dt)) {
            series.push(Series {
                label: format!("{route}, dt={dt:e}"),
                points: r
                    .cells
                    .iter()
                    .filter(|c| c.route == route && c.dt == dt)
                    .map(|c| (c.delta, c.err_signed.abs()))
                    .collect(),
            });
        }
    }
    svg_loglog(&format!("{}: error against delta", r.problem_id), "delta", &series)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(dt: f64, err: f64) -> CellRecord {
        CellRecord {
            problem: "eikonal-1d".into(),
            dt,
            delta: 1e-3,
            route: Route::Variational,
            u_bar: 1.0 / 3.0,
            u_oracle: 1.0 / 3.0 + err,
            err_signed: err,
            lower_bound: -0.1,
            upper_bound: 0.1,
            lower_ok: true,
            upper_ok: err <= 0.1,
            dual_slack: 0.25,
            sweeps: 17,
            residual: 1e-13,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let r = ExperimentReport::empty("eikonal-1d", vec![2.0]);
        emit_reports(&r, dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("cells.csv")).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(text.trim_end(), CELLS_HEADER.join(","));
        let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
        assert!(summary.contains("cells: 0"));
        assert!(summary.contains("exit code: 0"));
        assert!(read_cells_csv(&dir.path().join("cells.csv")).unwrap().is_empty());
        let svg = fs::read_to_string(dir.path().join("error_vs_dt.svg")).unwrap();
        assert!(svg.contains("no data"));
    }

    #[test]
    fn roundtrip_is_exact_including_nan() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = ExperimentReport::empty("eikonal-1d", vec![2.0]);
        r.cells = vec![cell(0.1, 0.0123456789012345678), cell(0.05, 3e-300)];
        let mut failed = cell(0.025, f64::NAN);
        failed.u_bar = f64::NAN;
        failed.lower_ok = false;
        failed.upper_ok = false;
        r.cells.push(failed);
        r.failures.push((2, "solver gave up".into()));
        emit_reports(&r, dir.path()).unwrap();
        let back = read_cells_csv(&dir.path().join("cells.csv")).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in r.cells.iter().zip(&back) {
            assert!(a.same_as(b), "{a:?} vs {b:?}");
        }
        let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
        assert!(summary.contains("solver gave up"));
        assert!(summary.contains("exit code: 2"));
        let svg = fs::read_to_string(dir.path().join("error_vs_dt.svg")).unwrap();
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn rejects_foreign_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_cells_csv(&p), Err(Error::Parse(_))));
    }
}
