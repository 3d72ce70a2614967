//! CSV and JSON artifacts of scenario runs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::approx::{CorrectorBreakdown, GrowthSeries};
use crate::error::{Error, Result};
use crate::experiment::{ComparisonReport, ConvergenceReport, GrowthReport};
use crate::grid::Field;
use crate::scenario::{ResolvedScenario, ScenarioConfig};

pub const SCHEME_VERSION: &str = concat!(
    "longwave ",
    env!("CARGO_PKG_VERSION"),
    "; crank-nicolson relaxation, centered periodic differences"
);

pub const SNAPSHOT_HEADER: [&str; 6] =
    ["x", "eta_boussinesq", "eta_kdv", "eta_kdv_topo", "v_boussinesq", "bottom_rescaled"];

pub const ERRORS_HEADER: [&str; 8] =
    ["t", "err_kdv", "err_kdv_topo", "refl_b", "refl_kdv", "refl_topo", "l2_drift", "h1eps_drift"];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

/// File name for the snapshot at time `t`, e.g. `snapshot_t2.5.csv`.
pub fn snapshot_file_name(t: f64) -> String {
    let rounded = (t * 1e6).round() / 1e6;
    format!("snapshot_t{rounded}.csv")
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path)?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| format_value(v))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn output_dir(s: &ResolvedScenario, out: Option<&Path>) -> Result<PathBuf> {
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| s.output_dir.clone())
        .ok_or_else(|| Error::config("no output directory given"))?;
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn meta(s: &ResolvedScenario, config: &ScenarioConfig, extra: serde_json::Value) -> Result<serde_json::Value> {
    let mut m = json!({
        "scheme_version": SCHEME_VERSION,
        "config": config,
        "resolved": s,
        "coefficients": s.model_coefficients(),
    });
    if let (Some(obj), serde_json::Value::Object(add)) = (m.as_object_mut(), extra) {
        obj.extend(add);
    }
    Ok(m)
}

/// Writes snapshots, `errors.csv` and `meta.json`; returns the files written.
pub fn write_outputs(report: &ComparisonReport, config: &ScenarioConfig, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let s = &report.scenario;
    let dir = output_dir(s, out)?;
    let grid = report.grid;
    let bottom = s.bathymetry.sample(&grid)?;
    let mut written = Vec::new();

    for snap in &report.snapshots {
        let path = dir.join(snapshot_file_name(snap.t));
        let rows = (0..grid.num_points()).map(|i| {
            vec![
                grid.x(i),
                snap.eta_boussinesq[i],
                snap.eta_kdv[i],
                snap.eta_kdv_topo[i],
                snap.v_boussinesq[i],
                -1.0 + bottom[i],
            ]
        });
        write_rows(&path, &SNAPSHOT_HEADER, rows)?;
        written.push(path);
    }

    let path = dir.join("errors.csv");
    let rows = report.records.iter().map(|r| {
        vec![r.t, r.err_kdv, r.err_kdv_topo, r.refl_b, r.refl_kdv, r.refl_topo, r.l2_drift, r.h1eps_drift]
    });
    write_rows(&path, &ERRORS_HEADER, rows)?;
    written.push(path);

    let reference = if report.boussinesq.is_some() { "boussinesq" } else { "analytic_soliton" };
    let m = meta(s, config, json!({ "timings": report.timings, "reference": reference }))?;
    let path = dir.join("meta.json");
    write_json(&path, &m)?;
    written.push(path);
    Ok(written)
}

/// Writes `growth.csv`, `fit.json` and `meta.json`.
pub fn write_growth_outputs(report: &GrowthReport, config: &ScenarioConfig, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let dir = output_dir(&report.scenario, out)?;
    let series: &GrowthSeries = &report.series;
    let mut header = vec!["t", "norm"];
    header.extend(CorrectorBreakdown::TERM_NAMES);
    let rows = series.times.iter().zip(&series.norms).zip(&series.term_norms).map(|((&t, &n), terms)| {
        let mut row = vec![t, n];
        row.extend_from_slice(terms);
        row
    });
    let csv_path = dir.join("growth.csv");
    write_rows(&csv_path, &header, rows)?;

    let fit_path = dir.join("fit.json");
    write_json(&fit_path, &json!({ "order": series.order, "fit": series.fit }))?;

    let meta_path = dir.join("meta.json");
    write_json(&meta_path, &meta(&report.scenario, config, json!({}))?)?;
    Ok(vec![csv_path, fit_path, meta_path])
}

/// Writes `convergence.json`.
pub fn write_convergence_outputs(report: &ConvergenceReport, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("convergence.json");
    write_json(&path, &json!({ "scheme_version": SCHEME_VERSION, "report": report }))?;
    Ok(path)
}

/// Reads one numeric column of a CSV written by this module.
pub fn read_column(path: &Path, name: &str) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let idx = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::config(format!("column {name} not found in {}", path.display())))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let v: f64 = rec[idx]
            .parse()
            .map_err(|_| Error::config(format!("bad number {:?} in {}", &rec[idx], path.display())))?;
        out.push(v);
    }
    Ok(out)
}

/// Reads a snapshot column back as a field on `like`'s grid.
pub fn read_field(path: &Path, name: &str, like: &Field) -> Result<Field> {
    Field::new(*like.grid(), read_column(path, name)?)
}
