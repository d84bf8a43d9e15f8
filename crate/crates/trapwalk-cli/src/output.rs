//! Distributions CSV and metrics JSON.

use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::run::{Report, Series};

pub const CSV_HEADER: &str = "step,index_k,index_l,probability";

/// Build identifier written into every metrics file.
pub fn build_id() -> String {
    format!("trapwalk {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputFile {
    pub path: PathBuf,
    pub contents: String,
}

pub fn render_csv(series: &Series) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for (step, rows) in &series.recorded {
        for &(k, l, p) in rows {
            match l {
                Some(l) => writeln!(s, "{step},{k},{l},{p}"),
                None => writeln!(s, "{step},{k},,{p}"),
            }
            .expect("writing to a String");
        }
    }
    s
}

fn csv_path(prefix: &str, report: &Report, i: usize) -> PathBuf {
    if report.control.is_some() {
        PathBuf::from(format!("{prefix}_{i}.csv"))
    } else {
        PathBuf::from(format!("{prefix}.csv"))
    }
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn series_json(series: &Series, csv: &Path) -> Value {
    let m = &series.metrics;
    json!({
        "control": series.control,
        "distributions": file_name(csv),
        "step": m.iter().map(|x| x.step).collect::<Vec<_>>(),
        "variance": m.iter().map(|x| x.variance).collect::<Vec<_>>(),
        "nu": m.iter().map(|x| x.nu).collect::<Vec<_>>(),
        "ground_population": m.iter().map(|x| x.ground_population).collect::<Vec<_>>(),
        "scaling_exponent": series.exponent,
        "max_leakage": series.max_leakage,
    })
}

/// Metrics document. `wall_clock` is included only when given.
pub fn render_json(config: &RunConfig, report: &Report, prefix: &str, wall_clock: Option<f64>) -> String {
    let points: Vec<Value> = report
        .series
        .iter()
        .enumerate()
        .map(|(i, s)| series_json(s, &csv_path(prefix, report, i)))
        .collect();
    let mut doc = Map::new();
    doc.insert("build".into(), json!(build_id()));
    doc.insert("kind".into(), json!(config.kind.name()));
    doc.insert("seed".into(), json!(config.seed));
    doc.insert("control".into(), json!(report.control));
    doc.insert("points".into(), Value::Array(points));
    doc.insert("results".into(), Value::Object(report.extra.clone()));
    doc.insert(
        "config".into(),
        serde_json::to_value(config.resolved()).expect("config serializes"),
    );
    if let Some(w) = wall_clock {
        doc.insert("wall_clock_s".into(), json!(w));
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json serializes");
    s.push('\n');
    s
}

/// Every file of one run: one CSV per series, then `<prefix>.json`.
pub fn render(config: &RunConfig, report: &Report, prefix: &str, wall_clock: Option<f64>) -> Vec<OutputFile> {
    let mut files: Vec<OutputFile> = report
        .series
        .iter()
        .enumerate()
        .map(|(i, s)| OutputFile {
            path: csv_path(prefix, report, i),
            contents: render_csv(s),
        })
        .collect();
    files.push(OutputFile {
        path: PathBuf::from(format!("{prefix}.json")),
        contents: render_json(config, report, prefix, wall_clock),
    });
    files
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
