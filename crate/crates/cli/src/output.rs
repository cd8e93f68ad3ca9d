use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use kergrad::Dyadic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A command result: a flat table for CSV and a structured payload for JSON.
pub struct Report {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub data: Value,
    /// false when some check in the report failed
    pub passed: bool,
}

impl Report {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Report { command, columns, rows: Vec::new(), data: Value::Null, passed: true }
    }
}

/// Always `num/den`, including for integers.
pub fn ratio(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn dyadic(d: &Dyadic) -> String {
    ratio(&d.to_rational())
}

pub fn float(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Renders the report. `config` is echoed first; the generation time is left out under
/// `no_meta` so reruns are byte-identical.
pub fn render(report: &Report, format: Format, config: &Value, no_meta: bool) -> io::Result<String> {
    match format {
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&format!("# config: {config}\n"));
            if !no_meta {
                out.push_str(&format!("# generated: {}\n", timestamp()));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.columns)?;
            for r in &report.rows {
                w.write_record(r)?;
            }
            let bytes = w.into_inner().map_err(|e| io::Error::new(io::ErrorKind::Other, e.to_string()))?;
            out.push_str(&String::from_utf8_lossy(&bytes));
            Ok(out)
        }
        Format::Json => {
            let mut v = json!({
                "command": report.command,
                "config": config,
                "passed": report.passed,
                "data": report.data,
            });
            if !no_meta {
                v["generated"] = json!(timestamp());
            }
            Ok(serde_json::to_string_pretty(&v)? + "\n")
        }
    }
}

pub fn emit(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}
