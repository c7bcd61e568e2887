//! What-if sweeps: evaluate index families over perturbed group rates and
//! a grid of aversion parameters, with changes relative to a baseline.

use serde::{Deserialize, Serialize};

use crate::divergence::{GroupedSummary, IndexFamily, IndexRequest, WeightingScheme};
use crate::error::{Error, Result};

/// Aversion grid used when none is given.
pub const DEFAULT_ALPHA_GRID: [f64; 9] = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0];

/// Spread below which SGE values are considered collapsed.
pub const SGE_COLLAPSE_TOL: f64 = 1e-4;
/// Spread above which SRI values are considered still distinct.
pub const SRI_DISTINCT_TOL: f64 = 1e-3;

/// One configuration of group sizes and rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub groups: Vec<String>,
    pub sizes: Vec<f64>,
    /// Group prevalences in `[0, 1]`.
    pub rates: Vec<f64>,
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        groups: Vec<String>,
        sizes: Vec<f64>,
        rates: Vec<f64>,
    ) -> Result<Self> {
        let m = groups.len();
        if m < 2 {
            return Err(Error::InvalidSummary(format!("need at least 2 groups, got {m}")));
        }
        for len in [sizes.len(), rates.len()] {
            if len != m {
                return Err(Error::DimensionMismatch { expected: m, found: len });
            }
        }
        if let Some(r) = rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::InvalidSummary(format!("rate {r} is outside [0, 1]")));
        }
        let s = Self { name: name.into(), groups, sizes, rates };
        s.summary()?;
        Ok(s)
    }

    /// Scenario with groups labelled `g1, g2, …`.
    pub fn unlabeled(name: impl Into<String>, sizes: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        let groups = (1..=sizes.len()).map(|j| format!("g{j}")).collect();
        Self::new(name, groups, sizes, rates)
    }

    pub fn summary(&self) -> Result<GroupedSummary> {
        GroupedSummary::new(self.groups.clone(), self.sizes.clone(), self.rates.clone())
    }

    fn check_positive_rates(&self) -> Result<()> {
        match self.rates.iter().position(|&r| r == 0.0) {
            Some(j) => Err(Error::ZeroMeanGroup { group: self.groups[j].clone() }),
            None => Ok(()),
        }
    }
}

/// The four-group example: equal sizes, baseline rates 50/40/30/10% and
/// three single-group perturbations.
pub fn four_group_example() -> (Scenario, Vec<Scenario>) {
    let groups: Vec<String> = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
    let make = |name: &str, rates: [f64; 4]| {
        Scenario::new(name, groups.clone(), vec![1.0; 4], rates.to_vec()).expect("valid example")
    };
    (
        make("baseline", [0.5, 0.4, 0.3, 0.1]),
        vec![
            make("scenario1", [0.5, 0.3, 0.3, 0.1]),
            make("scenario2", [0.4, 0.4, 0.3, 0.1]),
            make("scenario3", [0.5, 0.4, 0.4, 0.1]),
        ],
    )
}

/// One (scenario, family, scheme, α) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub scenario: String,
    pub family: IndexFamily,
    pub scheme: WeightingScheme,
    pub alpha: f64,
    pub value: f64,
    pub abs_change: f64,
    /// `None` where the baseline value is zero.
    pub rel_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub alpha_grid: Vec<f64>,
    pub baseline: String,
    /// Baseline rows first, then each scenario in input order; within a
    /// scenario, family-major then α.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(
        &self,
        scenario: &str,
        family: IndexFamily,
        scheme: WeightingScheme,
        alpha: f64,
    ) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.scenario == scenario && c.family == family && c.scheme == scheme && c.alpha == alpha)
    }

    /// Relative change of a cell, failing where the baseline is zero.
    pub fn relative_change(
        &self,
        scenario: &str,
        family: IndexFamily,
        scheme: WeightingScheme,
        alpha: f64,
    ) -> Result<f64> {
        let c = self.cell(scenario, family, scheme, alpha).ok_or_else(|| {
            Error::InvalidParameter(format!("no sweep cell for `{scenario}` {family} {scheme} alpha {alpha}"))
        })?;
        c.rel_change.ok_or(Error::ZeroBaseline)
    }

    pub fn scenario_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !names.contains(&c.scenario.as_str()) {
                names.push(&c.scenario);
            }
        }
        names
    }
}

/// Request evaluated in each sweep cell: standardized wherever the family allows it.
pub fn sweep_request(family: IndexFamily, alpha: f64, scheme: WeightingScheme) -> IndexRequest {
    let standardize = !matches!(family, IndexFamily::Beta | IndexFamily::SymmetrizedBeta);
    IndexRequest::new(family, alpha, scheme).standardized(standardize)
}

pub fn run_sweep(
    baseline: &Scenario,
    scenarios: &[Scenario],
    grid: &[f64],
    families: &[IndexFamily],
    scheme: WeightingScheme,
) -> Result<SweepResult> {
    let m = baseline.groups.len();
    baseline.check_positive_rates()?;
    for s in scenarios {
        if s.groups.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: s.groups.len() });
        }
        s.check_positive_rates()?;
    }
    let base_summary = baseline.summary()?;
    let mut base_values = Vec::with_capacity(families.len() * grid.len());
    for &family in families {
        for &alpha in grid {
            base_values.push(sweep_request(family, alpha, scheme).evaluate(&base_summary)?);
        }
    }
    let mut cells = Vec::new();
    for s in std::iter::once(baseline).chain(scenarios) {
        let summary = s.summary()?;
        let mut i = 0;
        for &family in families {
            for &alpha in grid {
                let value = sweep_request(family, alpha, scheme).evaluate(&summary)?;
                let base = base_values[i];
                i += 1;
                let abs_change = value - base;
                cells.push(SweepCell {
                    scenario: s.name.clone(),
                    family,
                    scheme,
                    alpha,
                    value,
                    abs_change,
                    rel_change: (base != 0.0).then(|| abs_change / base),
                });
            }
        }
    }
    Ok(SweepResult { alpha_grid: grid.to_vec(), baseline: baseline.name.clone(), cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadRow {
    pub alpha: f64,
    pub family: IndexFamily,
    pub scheme: WeightingScheme,
    /// `max - min` of the values across all scenarios, baseline included.
    pub spread: f64,
}

/// An α where the symmetrized GE can no longer tell the scenarios apart but the SRI can.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationFlag {
    pub alpha: f64,
    pub scheme: WeightingScheme,
    pub sge_family: IndexFamily,
    pub sge_spread: f64,
    pub sri_family: IndexFamily,
    pub sri_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationReport {
    pub spreads: Vec<SpreadRow>,
    pub flags: Vec<DiscriminationFlag>,
}

impl DiscriminationReport {
    pub fn spread(&self, family: IndexFamily, scheme: WeightingScheme, alpha: f64) -> Option<f64> {
        self.spreads
            .iter()
            .find(|r| r.family == family && r.scheme == scheme && r.alpha == alpha)
            .map(|r| r.spread)
    }
}

pub fn discrimination_report(result: &SweepResult) -> DiscriminationReport {
    let mut spreads: Vec<SpreadRow> = Vec::new();
    for c in &result.cells {
        let same = |d: &SweepCell| d.family == c.family && d.scheme == c.scheme && d.alpha == c.alpha;
        if spreads.iter().any(|r| r.family == c.family && r.scheme == c.scheme && r.alpha == c.alpha) {
            continue;
        }
        let (lo, hi) = result
            .cells
            .iter()
            .filter(|d| same(d))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d.value), hi.max(d.value)));
        spreads.push(SpreadRow { alpha: c.alpha, family: c.family, scheme: c.scheme, spread: hi - lo });
    }
    let is_sge = |f: IndexFamily| matches!(f, IndexFamily::SymmetrizedGE | IndexFamily::RefInvariantSymGE);
    let is_sri = |f: IndexFamily| matches!(f, IndexFamily::SymmetrizedRenyi | IndexFamily::StandardizedSRI);
    let mut flags = Vec::new();
    for sge in spreads.iter().filter(|r| is_sge(r.family) && r.spread < SGE_COLLAPSE_TOL) {
        for sri in spreads.iter().filter(|r| {
            is_sri(r.family) && r.scheme == sge.scheme && r.alpha == sge.alpha && r.spread > SRI_DISTINCT_TOL
        }) {
            flags.push(DiscriminationFlag {
                alpha: sge.alpha,
                scheme: sge.scheme,
                sge_family: sge.family,
                sge_spread: sge.spread,
                sri_family: sri.family,
                sri_spread: sri.spread,
            });
        }
    }
    DiscriminationReport { spreads, flags }
}
