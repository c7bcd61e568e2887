//! Result rows and their JSON / CSV serialization.
//!
//! Every number is rounded to 12 significant digits before it is written,
//! so identical runs give byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use hdi_core::numeric::round_significant;
use hdi_core::GroupedSummary;
use serde::{Serialize, Serializer};

use crate::error::{CliError, CliResult};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

fn sig<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_significant(*x, SIGNIFICANT_DIGITS))
}

fn sig_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => sig(x, s),
        None => s.serialize_none(),
    }
}

/// One output record; optional fields are omitted from JSON and left blank in CSV.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResultRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub family: String,
    pub scheme: String,
    #[serde(serialize_with = "sig")]
    pub alpha: f64,
    pub reference: String,
    #[serde(serialize_with = "sig")]
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "sig_opt")]
    pub se: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "sig_opt")]
    pub abs_change: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "sig_opt")]
    pub rel_change: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "sig_opt")]
    pub null_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "sig_opt")]
    pub null_sd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "sig_opt")]
    pub overlap: Option<f64>,
}

const CSV_COLUMNS: [&str; 14] = [
    "scenario",
    "family",
    "scheme",
    "alpha",
    "reference",
    "estimate",
    "se",
    "method",
    "replicates_path",
    "abs_change",
    "rel_change",
    "null_mean",
    "null_sd",
    "overlap",
];

/// Decimal text of `x` at 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    round_significant(x, SIGNIFICANT_DIGITS).to_string()
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

impl ResultRow {
    fn csv_fields(&self) -> [String; 14] {
        [
            self.scenario.clone().unwrap_or_default(),
            self.family.clone(),
            self.scheme.clone(),
            fmt_num(self.alpha),
            self.reference.clone(),
            fmt_num(self.estimate),
            opt_num(self.se),
            self.method.clone().unwrap_or_default(),
            self.replicates_path.clone().unwrap_or_default(),
            opt_num(self.abs_change),
            opt_num(self.rel_change),
            opt_num(self.null_mean),
            opt_num(self.null_sd),
            opt_num(self.overlap),
        ]
    }
}

pub fn render(rows: &[ResultRow], format: OutputFormat) -> CliResult<Vec<u8>> {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(rows).map_err(|e| CliError::Usage(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Usage(e.to_string());
            w.write_record(CSV_COLUMNS).map_err(io)?;
            for r in rows {
                w.write_record(r.csv_fields()).map_err(io)?;
            }
            w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

/// Write rendered rows to `path`, or to stdout when no path is given.
pub fn emit_results(rows: &[ResultRow], format: OutputFormat, path: Option<&Path>) -> CliResult<()> {
    let bytes = render(rows, format)?;
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes).and_then(|_| out.flush()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// Sidecar path for replicate vectors: `<stem>.replicates.csv` next to `out`.
pub fn replicates_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("hdi");
    out.with_file_name(format!("{stem}.replicates.csv"))
}

/// Long-format replicate table for box plots.
#[derive(Debug, Default)]
pub struct ReplicateTable {
    rows: Vec<[String; 6]>,
}

impl ReplicateTable {
    pub fn push(&mut self, family: &str, scheme: &str, alpha: f64, method: &str, values: &[f64]) {
        for (r, v) in values.iter().enumerate() {
            self.rows.push([
                family.to_string(),
                scheme.to_string(),
                fmt_num(alpha),
                method.to_string(),
                r.to_string(),
                fmt_num(*v),
            ]);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Usage(e.to_string());
        w.write_record(["family", "scheme", "alpha", "method", "replicate", "value"]).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        fs::write(path, bytes).map_err(|e| CliError::io(path, e))
    }
}

/// Grouped summary as `group,size,mean` with shortest round-trip decimals,
/// so re-ingesting it reproduces the same index values.
pub fn write_grouped_summary(g: &GroupedSummary, path: &Path) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Usage(e.to_string());
    w.write_record(["group", "size", "mean"]).map_err(io)?;
    for j in 0..g.len() {
        w.write_record([g.labels()[j].clone(), g.sizes()[j].to_string(), g.means()[j].to_string()])
            .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}
