//! Readers for microdata, grouped summaries and scenario files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use hdi_core::scenario::Scenario;
use hdi_core::survey::{SurveyDataset, SurveyRecord};
use hdi_core::{Error, GroupedSummary};

use crate::error::{CliError, CliResult};

/// Input layout, either given explicitly or sniffed from the header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputKind {
    Microdata,
    Grouped,
}

struct Table {
    /// Lower-cased, trimmed header names.
    headers: Vec<String>,
    /// Data rows with their 1-based line numbers.
    rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn column(&self, names: &[&str]) -> CliResult<usize> {
        self.find(names).ok_or_else(|| {
            CliError::Schema(format!("missing column `{}` (found: {})", names[0], self.headers.join(", ")))
        })
    }

    fn find(&self, names: &[&str]) -> Option<usize> {
        self.headers.iter().position(|h| names.contains(&h.as_str()))
    }
}

fn delimiter_for(path: &Path, text: &str) -> u8 {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    if ext == "tsv" || ext == "tab" {
        return b'\t';
    }
    let first = text.lines().next().unwrap_or("");
    if first.contains('\t') && !first.contains(',') {
        b'\t'
    } else {
        b','
    }
}

fn read_table(path: &Path) -> CliResult<Table> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(&text);
    if text.trim().is_empty() {
        return Err(CliError::Schema(format!("{} is empty", path.display())));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter_for(path, text))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Parse { line: 1, message: e.to_string() })?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push((line, rec.iter().map(String::from).collect()));
    }
    if rows.is_empty() {
        return Err(CliError::Schema(format!("{} has no data rows", path.display())));
    }
    Ok(Table { headers, rows })
}

/// Header-based guess: microdata files carry a `stratum` column.
pub fn sniff_kind(path: &Path) -> CliResult<InputKind> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let first = text.lines().next().unwrap_or("").to_ascii_lowercase();
    let names: Vec<&str> = first.split([',', '\t']).map(str::trim).collect();
    Ok(if names.contains(&"stratum") { InputKind::Microdata } else { InputKind::Grouped })
}

fn field<'a>(row: &'a [String], col: usize, name: &str, line: usize) -> CliResult<&'a str> {
    match row.get(col).map(String::as_str) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::Parse { line, message: format!("missing `{name}`") }),
    }
}

fn number(s: &str, name: &str, line: usize) -> CliResult<f64> {
    s.parse::<f64>()
        .map_err(|_| CliError::Parse { line, message: format!("`{name}` value `{s}` is not a number") })
}

/// Parse `"50%"` or `"0.5"` as the proportion 0.5.
pub fn parse_proportion(s: &str, name: &str, line: usize) -> CliResult<f64> {
    match s.strip_suffix('%') {
        Some(p) => Ok(number(p.trim(), name, line)? / 100.0),
        None => number(s, name, line),
    }
}

pub fn ingest_microdata(path: &Path) -> CliResult<SurveyDataset> {
    let t = read_table(path)?;
    let cols = [
        t.column(&["stratum"])?,
        t.column(&["psu"])?,
        t.column(&["weight"])?,
        t.column(&["group"])?,
        t.column(&["outcome"])?,
    ];
    let mut records = Vec::with_capacity(t.rows.len());
    let mut lines = Vec::with_capacity(t.rows.len());
    for (line, row) in &t.rows {
        let line = *line;
        let get = |i: usize, name: &str| field(row, cols[i], name, line);
        let weight = number(get(2, "weight")?, "weight", line)?;
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(CliError::Validation {
                line: Some(line),
                message: format!("weight {weight} must be positive"),
            });
        }
        let outcome = number(get(4, "outcome")?, "outcome", line)?;
        if !(outcome >= 0.0 && outcome.is_finite()) {
            return Err(CliError::Validation {
                line: Some(line),
                message: format!("outcome {outcome} must be finite and nonnegative"),
            });
        }
        records.push(SurveyRecord::new(
            get(0, "stratum")?,
            get(1, "psu")?,
            weight,
            get(3, "group")?,
            outcome,
        ));
        lines.push(line);
    }
    let d = SurveyDataset::new(records).map_err(|e| match e {
        Error::InvalidRecord { index, reason } => {
            CliError::Validation { line: lines.get(index).copied(), message: reason }
        }
        e => CliError::validation(e.to_string()),
    })?;
    let counts: Vec<String> =
        d.groups().iter().zip(d.group_counts()).map(|(g, n)| format!("{g}={n}")).collect();
    log::info!(
        "read {} records, {} strata, {} PSUs; per group: {}",
        d.len(),
        d.n_strata(),
        d.n_psus(),
        counts.join(" ")
    );
    Ok(d)
}

struct GroupRow {
    line: usize,
    group: String,
    size: f64,
    mean: f64,
}

fn grouped_rows(t: &Table, rows: &[&(usize, Vec<String>)]) -> CliResult<Vec<GroupRow>> {
    let (cg, cs, cm) = (t.column(&["group"])?, t.column(&["size"])?, t.column(&["mean", "rate"])?);
    rows.iter()
        .map(|(line, row)| {
            let line = *line;
            Ok(GroupRow {
                line,
                group: field(row, cg, "group", line)?.to_string(),
                size: number(field(row, cs, "size", line)?, "size", line)?,
                mean: parse_proportion(field(row, cm, "mean", line)?, "mean", line)?,
            })
        })
        .collect()
}

fn summary_from_rows(rows: Vec<GroupRow>) -> CliResult<GroupedSummary> {
    let mut seen = BTreeMap::new();
    for r in &rows {
        if let Some(first) = seen.insert(r.group.clone(), r.line) {
            return Err(CliError::Validation {
                line: Some(r.line),
                message: format!("duplicate group `{}` (first on line {first})", r.group),
            });
        }
        if !(r.size > 0.0 && r.size.is_finite()) {
            return Err(CliError::Validation {
                line: Some(r.line),
                message: format!("size {} must be positive", r.size),
            });
        }
        if !(r.mean >= 0.0 && r.mean.is_finite()) {
            return Err(CliError::Validation {
                line: Some(r.line),
                message: format!("mean {} must be finite and nonnegative", r.mean),
            });
        }
    }
    GroupedSummary::new(
        rows.iter().map(|r| r.group.clone()).collect(),
        rows.iter().map(|r| r.size).collect(),
        rows.iter().map(|r| r.mean).collect(),
    )
    .map_err(|e| CliError::validation(e.to_string()))
}

/// Grouped summary with columns `group, size, mean` (`rate` accepted for `mean`).
pub fn ingest_grouped(path: &Path) -> CliResult<GroupedSummary> {
    let t = read_table(path)?;
    let rows: Vec<_> = t.rows.iter().collect();
    let g = summary_from_rows(grouped_rows(&t, &rows)?)?;
    log::info!("read {} groups", g.len());
    Ok(g)
}

/// Scenario file: grouped columns plus `scenario`. The scenario named
/// `baseline` (or else the first one) is the baseline; every scenario must
/// list the baseline's groups in the same order. A file without a
/// `scenario` column is a lone baseline.
pub fn ingest_scenarios(path: &Path) -> CliResult<(Scenario, Vec<Scenario>)> {
    let t = read_table(path)?;
    let mut order: Vec<String> = Vec::new();
    let mut by_name: BTreeMap<String, Vec<&(usize, Vec<String>)>> = BTreeMap::new();
    match t.find(&["scenario"]) {
        Some(cs) => {
            for row in &t.rows {
                let name = field(&row.1, cs, "scenario", row.0)?.to_string();
                if !by_name.contains_key(&name) {
                    order.push(name.clone());
                }
                by_name.entry(name).or_default().push(row);
            }
        }
        None => {
            order.push("baseline".into());
            by_name.insert("baseline".into(), t.rows.iter().collect());
        }
    }
    let mut scenarios = Vec::with_capacity(order.len());
    for name in &order {
        let rows = grouped_rows(&t, &by_name[name])?;
        let first_line = rows[0].line;
        let g = summary_from_rows(rows)?;
        let s = Scenario::new(name.clone(), g.labels().to_vec(), g.sizes().to_vec(), g.means().to_vec())
            .map_err(|e| CliError::Validation {
                line: Some(first_line),
                message: format!("scenario `{name}`: {e}"),
            })?;
        scenarios.push(s);
    }
    let base_idx = scenarios.iter().position(|s| s.name.eq_ignore_ascii_case("baseline")).unwrap_or(0);
    let baseline = scenarios.remove(base_idx);
    if let Some(s) = scenarios.iter().find(|s| s.groups != baseline.groups) {
        return Err(CliError::validation(format!(
            "scenario `{}` groups [{}] differ from baseline groups [{}]",
            s.name,
            s.groups.join(", "),
            baseline.groups.join(", ")
        )));
    }
    log::info!("read baseline `{}` and {} scenarios", baseline.name, scenarios.len());
    Ok((baseline, scenarios))
}
