use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hdi_core::numeric::round_significant;
use hdi_core::scenario::{discrimination_report, run_sweep, DEFAULT_ALPHA_GRID};
use hdi_core::survey::{
    compute_sufficient_stats, distribution_overlap, estimate_variance, null_simulation,
    rescaled_bootstrap_se, ReplicationConfig, SurveyDataset, VarianceMethod,
};
use hdi_core::{GroupedSummary, IndexFamily, IndexRequest, ReferenceSpec, WeightingScheme};
use serde_json::json;

use crate::emit::{
    emit_results, replicates_path, write_grouped_summary, OutputFormat, ReplicateTable, ResultRow,
    SIGNIFICANT_DIGITS,
};
use crate::error::{CliError, CliResult};
use crate::ingest::{ingest_grouped, ingest_microdata, ingest_scenarios, sniff_kind, InputKind};

pub const SEED_ENV: &str = "HDI_SEED";

#[derive(Debug, Parser)]
#[command(name = "hdi", version, about = "Reference-invariant health disparity indices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Log ingestion details to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Point estimates of between-group indices.
    Index(RunArgs),
    /// Design-based standard errors (microdata only).
    Variance(RunArgs),
    /// Scenario sweep over an aversion grid (grouped scenario file).
    Sweep(RunArgs),
    /// Observed bootstrap vs "no disparities" null distribution (binary microdata).
    NullSim(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Pw,
    Ew,
    Both,
}

impl SchemeArg {
    fn schemes(self) -> Vec<WeightingScheme> {
        match self {
            Self::Pw => vec![WeightingScheme::PopulationWeighted],
            Self::Ew => vec![WeightingScheme::EquallyWeighted],
            Self::Both => vec![WeightingScheme::PopulationWeighted, WeightingScheme::EquallyWeighted],
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Input CSV/TSV file.
    #[arg(long)]
    pub input: PathBuf,
    /// Input layout; sniffed from the header when omitted.
    #[arg(long, value_enum)]
    pub kind: Option<InputKind>,
    /// Index families: ri, sri, ge, sge, rsge, beta, sbeta, atkinson, ssri.
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    /// Aversion parameters (default 0.5,1,2,4,8,16,32,64,128).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Vec<f64>,
    #[arg(long, value_enum, default_value = "pw")]
    pub scheme: SchemeArg,
    /// avg, best or target:<t>.
    #[arg(long, default_value = "avg")]
    pub reference: String,
    /// Apply 1 - exp(-k v) to families that are not standardized already.
    #[arg(long)]
    pub standardize: bool,
    /// Variance methods: taylor, brr, boot.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    /// Fay coefficient for BRR.
    #[arg(long, default_value_t = 0.0)]
    pub fay: f64,
    /// Hadamard order for BRR.
    #[arg(long)]
    pub hadamard_order: Option<usize>,
    /// RNG seed; falls back to $HDI_SEED, then to a generated seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Merge single-PSU strata into a neighbouring stratum.
    #[arg(long)]
    pub collapse_singletons: bool,
    /// Sweep only: write the scenario discrimination report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Microdata only: write the weighted group summary here.
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunArgs {
    fn families(&self, default: &[IndexFamily]) -> CliResult<Vec<IndexFamily>> {
        if self.family.is_empty() {
            return Ok(default.to_vec());
        }
        self.family.iter().map(|f| IndexFamily::from_str(f).map_err(|e| usage(e.to_string()))).collect()
    }

    fn grid(&self) -> Vec<f64> {
        if self.alpha.is_empty() {
            DEFAULT_ALPHA_GRID.to_vec()
        } else {
            self.alpha.clone()
        }
    }

    fn reference(&self) -> CliResult<ReferenceSpec> {
        ReferenceSpec::from_str(&self.reference).map_err(|e| usage(e.to_string()))
    }

    fn kind(&self) -> CliResult<InputKind> {
        match self.kind {
            Some(k) => Ok(k),
            None => sniff_kind(&self.input),
        }
    }

    fn microdata(&self) -> CliResult<SurveyDataset> {
        if self.kind()? != InputKind::Microdata {
            return Err(usage("this command needs microdata input"));
        }
        let d = ingest_microdata(&self.input)?;
        let d = if self.collapse_singletons { d.collapse_singleton_strata()? } else { d };
        self.write_summary(&d)?;
        Ok(d)
    }

    fn write_summary(&self, d: &SurveyDataset) -> CliResult<()> {
        if let Some(p) = &self.summary_out {
            write_grouped_summary(&compute_sufficient_stats(d).to_summary(d.groups())?, p)?;
        }
        Ok(())
    }

    fn replication(&self, seed: u64) -> CliResult<ReplicationConfig> {
        let cfg = ReplicationConfig {
            n_reps: self.reps,
            fay_coefficient: self.fay,
            seed,
            hadamard_order: self.hadamard_order,
        };
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        Ok(cfg)
    }

    fn request(&self, family: IndexFamily, alpha: f64, scheme: WeightingScheme) -> CliResult<IndexRequest> {
        Ok(IndexRequest::new(family, alpha, scheme)
            .with_reference(self.reference()?)
            .standardized(self.standardize))
    }

    fn base_row(&self, family: IndexFamily, scheme: WeightingScheme, alpha: f64, estimate: f64) -> ResultRow {
        ResultRow {
            family: family.code().into(),
            scheme: scheme.code().into(),
            alpha,
            reference: self.reference.clone(),
            estimate,
            ..Default::default()
        }
    }

    /// Sidecar for replicate vectors, if results go to a file.
    fn sidecar(&self) -> Option<PathBuf> {
        self.out.as_deref().map(replicates_path)
    }
}

/// Seed from the flag, then `$HDI_SEED`, then freshly generated and reported on stderr.
pub fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(v) = std::env::var(SEED_ENV) {
        return v.trim().parse().map_err(|_| usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer")));
    }
    let seed: u64 = rand::random();
    eprintln!("hdi: no seed given; using generated seed {seed}");
    Ok(seed)
}

pub fn run(cli: Cli) -> CliResult<()> {
    let (rows, args) = match &cli.command {
        Command::Index(a) => (index(a)?, a),
        Command::Variance(a) => (variance(a)?, a),
        Command::Sweep(a) => (sweep(a)?, a),
        Command::NullSim(a) => (null_sim(a)?, a),
    };
    emit_results(&rows, args.format, args.out.as_deref())
}

fn grouped_or_micro_summary(a: &RunArgs) -> CliResult<GroupedSummary> {
    match a.kind()? {
        InputKind::Grouped => ingest_grouped(&a.input),
        InputKind::Microdata => {
            let d = ingest_microdata(&a.input)?;
            a.write_summary(&d)?;
            Ok(compute_sufficient_stats(&d).to_summary(d.groups())?)
        }
    }
}

pub fn index(a: &RunArgs) -> CliResult<Vec<ResultRow>> {
    let g = grouped_or_micro_summary(a)?;
    let families = a.families(&[IndexFamily::StandardizedSRI])?;
    let mut rows = Vec::new();
    for &family in &families {
        for scheme in a.scheme.schemes() {
            for alpha in a.grid() {
                let estimate = a.request(family, alpha, scheme)?.evaluate(&g)?;
                rows.push(a.base_row(family, scheme, alpha, estimate));
            }
        }
    }
    Ok(rows)
}

pub fn variance(a: &RunArgs) -> CliResult<Vec<ResultRow>> {
    let d = a.microdata()?;
    let methods: Vec<VarianceMethod> = if a.methods.is_empty() {
        let mut all = VarianceMethod::ALL.to_vec();
        if !d.is_two_psu_design() {
            log::warn!("design is not two PSUs per stratum; skipping BRR");
            all.retain(|&m| m != VarianceMethod::Brr);
        }
        all
    } else {
        a.methods
            .iter()
            .map(|m| VarianceMethod::from_str(m).map_err(|e| usage(e.to_string())))
            .collect::<CliResult<_>>()?
    };
    let seed = if methods.contains(&VarianceMethod::RescaledBootstrap) {
        resolve_seed(a.seed)?
    } else {
        a.seed.unwrap_or(0)
    };
    let cfg = a.replication(seed)?;
    let sidecar = a.sidecar();
    let mut table = ReplicateTable::default();
    let mut rows = Vec::new();
    for family in a.families(&[IndexFamily::StandardizedSRI])? {
        for scheme in a.scheme.schemes() {
            for alpha in a.grid() {
                let req = a.request(family, alpha, scheme)?;
                for &m in &methods {
                    let est = estimate_variance(&d, m, &cfg, &req)?;
                    let mut row = a.base_row(family, scheme, alpha, est.point);
                    row.se = Some(est.se);
                    row.method = Some(m.code().into());
                    if let (Some(reps), Some(path)) = (&est.replicates, &sidecar) {
                        table.push(family.code(), scheme.code(), alpha, m.code(), reps);
                        row.replicates_path = Some(path.display().to_string());
                    }
                    rows.push(row);
                }
            }
        }
    }
    write_sidecar(&table, sidecar.as_deref())?;
    Ok(rows)
}

fn write_sidecar(table: &ReplicateTable, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) if !table.is_empty() => table.write(p),
        _ => Ok(()),
    }
}

pub fn sweep(a: &RunArgs) -> CliResult<Vec<ResultRow>> {
    if a.kind()? != InputKind::Grouped {
        return Err(usage("sweep needs a grouped scenario file"));
    }
    let (baseline, scenarios) = ingest_scenarios(&a.input)?;
    let families = a.families(&[IndexFamily::SymmetrizedRenyi, IndexFamily::RefInvariantSymGE])?;
    let grid = a.grid();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for scheme in a.scheme.schemes() {
        let result = run_sweep(&baseline, &scenarios, &grid, &families, scheme)?;
        for c in &result.cells {
            rows.push(ResultRow {
                scenario: Some(c.scenario.clone()),
                abs_change: Some(c.abs_change),
                rel_change: c.rel_change,
                reference: "avg".into(),
                ..a.base_row(c.family, c.scheme, c.alpha, c.value)
            });
        }
        reports.push(discrimination_report(&result));
    }
    if let Some(path) = &a.report {
        let r = |x: f64| round_significant(x, SIGNIFICANT_DIGITS);
        let spreads: Vec<_> = reports
            .iter()
            .flat_map(|rep| &rep.spreads)
            .map(|s| json!({"family": s.family.code(), "scheme": s.scheme.code(), "alpha": r(s.alpha), "spread": r(s.spread)}))
            .collect();
        let flags: Vec<_> = reports
            .iter()
            .flat_map(|rep| &rep.flags)
            .map(|f| {
                json!({
                    "alpha": r(f.alpha), "scheme": f.scheme.code(),
                    "sge_family": f.sge_family.code(), "sge_spread": r(f.sge_spread),
                    "sri_family": f.sri_family.code(), "sri_spread": r(f.sri_spread),
                })
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&json!({"spreads": spreads, "flags": flags}))
            .map_err(|e| usage(e.to_string()))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    }
    Ok(rows)
}

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = if x.len() > 1 { x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

pub fn null_sim(a: &RunArgs) -> CliResult<Vec<ResultRow>> {
    let d = a.microdata()?;
    let cfg = a.replication(resolve_seed(a.seed)?)?;
    let sidecar = a.sidecar();
    let mut table = ReplicateTable::default();
    let mut rows = Vec::new();
    for family in a.families(&[IndexFamily::StandardizedSRI])? {
        for scheme in a.scheme.schemes() {
            for alpha in a.grid() {
                let req = a.request(family, alpha, scheme)?;
                let observed = rescaled_bootstrap_se(&d, &cfg, &req)?;
                let obs_reps = observed.replicates.unwrap_or_default();
                let null = null_simulation(&d, &cfg, &req)?;
                let (null_mean, null_sd) = mean_sd(&null);
                let mut row = a.base_row(family, scheme, alpha, observed.point);
                row.se = Some(observed.se);
                row.method = Some(VarianceMethod::RescaledBootstrap.code().into());
                row.null_mean = Some(null_mean);
                row.null_sd = Some(null_sd);
                row.overlap = Some(distribution_overlap(&obs_reps, &null));
                if let Some(path) = &sidecar {
                    table.push(family.code(), scheme.code(), alpha, "boot", &obs_reps);
                    table.push(family.code(), scheme.code(), alpha, "null", &null);
                    row.replicates_path = Some(path.display().to_string());
                }
                rows.push(row);
            }
        }
    }
    write_sidecar(&table, sidecar.as_deref())?;
    Ok(rows)
}
