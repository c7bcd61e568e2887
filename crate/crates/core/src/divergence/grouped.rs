//! Between-group indices computed from group sizes and group means.
//!
//! The Rényi and symmetrized Rényi indices have closed forms in `n_j` and
//! `ȳ_j` that never build the mass functions; every other family goes
//! through the generic divergences with `p` chosen by the weighting scheme
//! and `q_j = p_j ȳ_j / reference`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::families::{
    alpha_divergence, beta_divergence, exp_standardize, ref_invariant_sym_ge, renyi_divergence,
    symmetric_aversion, symmetrized_beta, symmetrized_ge, symmetrized_renyi,
};
use super::mass::MassFunction;
use crate::error::{Error, Result};
use crate::numeric::{ln0, log_sum_exp, regime, Regime};

/// Group sizes (counts or weighted counts) and mean outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedSummary {
    labels: Vec<String>,
    sizes: Vec<f64>,
    means: Vec<f64>,
}

impl GroupedSummary {
    pub fn new(labels: Vec<String>, sizes: Vec<f64>, means: Vec<f64>) -> Result<Self> {
        let m = labels.len();
        if m < 2 {
            return Err(Error::InvalidSummary(format!("need at least 2 groups, got {m}")));
        }
        for len in [sizes.len(), means.len()] {
            if len != m {
                return Err(Error::DimensionMismatch { expected: m, found: len });
            }
        }
        for (j, (&n, &y)) in sizes.iter().zip(&means).enumerate() {
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::InvalidSummary(format!(
                    "group `{}` has size {n}; sizes must be positive",
                    labels[j]
                )));
            }
            if !(y >= 0.0 && y.is_finite()) {
                return Err(Error::InvalidSummary(format!(
                    "group `{}` has mean {y}; means must be finite and nonnegative",
                    labels[j]
                )));
            }
        }
        Ok(Self { labels, sizes, means })
    }

    /// Summary with labels `g1, g2, …`.
    pub fn unlabeled(sizes: Vec<f64>, means: Vec<f64>) -> Result<Self> {
        let labels = (1..=sizes.len()).map(|j| format!("g{j}")).collect();
        Self::new(labels, sizes, means)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn total_size(&self) -> f64 {
        self.sizes.iter().sum()
    }

    /// Population average `ȳ.. = Σ n_j ȳ_j / n`.
    pub fn overall_mean(&self) -> f64 {
        let total: f64 = self.sizes.iter().zip(&self.means).map(|(n, y)| n * y).sum();
        total / self.total_size()
    }

    /// Group with the least adverse (smallest) mean; ties go to the lowest index.
    pub fn least_adverse(&self) -> (usize, &str) {
        let mut best = 0;
        for j in 1..self.len() {
            if self.means[j] < self.means[best] {
                best = j;
            }
        }
        (best, &self.labels[best])
    }

    /// Weighting distribution `p` for a scheme (not normalized for equal weights: `1/m`).
    pub fn weights(&self, scheme: WeightingScheme) -> Vec<f64> {
        match scheme {
            WeightingScheme::PopulationWeighted => {
                let n = self.total_size();
                self.sizes.iter().map(|s| s / n).collect()
            }
            WeightingScheme::EquallyWeighted => vec![1.0 / self.len() as f64; self.len()],
        }
    }

    /// Value of the disparity reference in outcome units.
    pub fn reference_value(&self, reference: ReferenceSpec) -> Result<f64> {
        let v = match reference {
            ReferenceSpec::PopulationAverage => self.overall_mean(),
            ReferenceSpec::LeastAdverse => self.means[self.least_adverse().0],
            ReferenceSpec::FixedTarget(t) => t,
        };
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else if let ReferenceSpec::FixedTarget(t) = reference {
            Err(Error::InvalidParameter(format!("target {t} must be positive")))
        } else {
            let group = match reference {
                ReferenceSpec::LeastAdverse => self.least_adverse().1.to_string(),
                _ => "<all>".to_string(),
            };
            Err(Error::ZeroMeanGroup { group })
        }
    }

    /// Population and burden mass functions `(p, q)` with `q_j = p_j ȳ_j / reference`.
    pub fn masses(
        &self,
        scheme: WeightingScheme,
        reference: ReferenceSpec,
    ) -> Result<(MassFunction, MassFunction)> {
        let p = self.weights(scheme);
        let reference = self.reference_value(reference)?;
        let q = p.iter().zip(&self.means).map(|(p, y)| p * y / reference).collect();
        Ok((MassFunction::new(p)?, MassFunction::new(q)?))
    }

    fn zero_mean_error(&self, j: usize) -> Error {
        Error::ZeroMeanGroup { group: self.labels[j].clone() }
    }

    fn first_zero_mean(&self) -> Option<usize> {
        self.means.iter().position(|&y| y == 0.0)
    }

    /// Per-group log weights `ln w_j` used by the closed forms: `ln n_j` or 0.
    fn log_group_weights(&self, scheme: WeightingScheme) -> Vec<f64> {
        match scheme {
            WeightingScheme::PopulationWeighted => self.sizes.iter().map(|n| n.ln()).collect(),
            WeightingScheme::EquallyWeighted => vec![0.0; self.len()],
        }
    }

    /// `ln Σ_j w_j ȳ_j^{e}`, failing on a zero mean raised to a negative power.
    fn log_weighted_power_sum(&self, log_w: &[f64], exponent: f64) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.len());
        for (j, (&lw, &y)) in log_w.iter().zip(&self.means).enumerate() {
            if y == 0.0 {
                if exponent > 0.0 {
                    continue;
                }
                if exponent < 0.0 {
                    return Err(self.zero_mean_error(j));
                }
                terms.push(lw);
            } else {
                terms.push(lw + exponent * y.ln());
            }
        }
        Ok(log_sum_exp(terms))
    }
}

/// How groups are weighted in `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightingScheme {
    /// `p_j = n_j / n`: every individual counts equally.
    PopulationWeighted,
    /// `p_j = 1 / m`: every group counts equally.
    EquallyWeighted,
}

impl WeightingScheme {
    pub fn code(self) -> &'static str {
        match self {
            WeightingScheme::PopulationWeighted => "pw",
            WeightingScheme::EquallyWeighted => "ew",
        }
    }
}

impl fmt::Display for WeightingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for WeightingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pw" | "population" | "population-weighted" => Ok(Self::PopulationWeighted),
            "ew" | "equal" | "equally-weighted" => Ok(Self::EquallyWeighted),
            other => Err(Error::InvalidParameter(format!("unknown weighting scheme `{other}`"))),
        }
    }
}

/// Denominator of the relative disparities `r_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ReferenceSpec {
    PopulationAverage,
    LeastAdverse,
    /// A fixed positive target in outcome units.
    FixedTarget(f64),
}

impl fmt::Display for ReferenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceSpec::PopulationAverage => f.write_str("avg"),
            ReferenceSpec::LeastAdverse => f.write_str("best"),
            ReferenceSpec::FixedTarget(t) => write!(f, "target:{t}"),
        }
    }
}

impl FromStr for ReferenceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "avg" | "average" | "population-average" => Ok(Self::PopulationAverage),
            "best" | "least-adverse" => Ok(Self::LeastAdverse),
            _ => {
                let t = s
                    .strip_prefix("target:")
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown reference `{s}`")))?;
                if t > 0.0 && t.is_finite() {
                    Ok(Self::FixedTarget(t))
                } else {
                    Err(Error::InvalidParameter(format!("target {t} must be positive")))
                }
            }
        }
    }
}

/// Which index to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexFamily {
    /// Rényi index `R_α`.
    Renyi,
    /// Symmetrized Rényi index `SR_α`.
    SymmetrizedRenyi,
    /// Alpha divergence (GE class) on the raw masses.
    GeneralizedEntropy,
    /// Symmetrized alpha divergence on the raw masses.
    SymmetrizedGE,
    /// Symmetrized alpha divergence on the normalized masses.
    RefInvariantSymGE,
    Beta,
    SymmetrizedBeta,
    /// `1 - exp(-α R_α)`.
    Atkinson,
    /// Symmetric exponential standardization of `SR_α`.
    StandardizedSRI,
}

impl IndexFamily {
    pub const ALL: [IndexFamily; 9] = [
        IndexFamily::Renyi,
        IndexFamily::SymmetrizedRenyi,
        IndexFamily::GeneralizedEntropy,
        IndexFamily::SymmetrizedGE,
        IndexFamily::RefInvariantSymGE,
        IndexFamily::Beta,
        IndexFamily::SymmetrizedBeta,
        IndexFamily::Atkinson,
        IndexFamily::StandardizedSRI,
    ];

    pub fn code(self) -> &'static str {
        match self {
            IndexFamily::Renyi => "ri",
            IndexFamily::SymmetrizedRenyi => "sri",
            IndexFamily::GeneralizedEntropy => "ge",
            IndexFamily::SymmetrizedGE => "sge",
            IndexFamily::RefInvariantSymGE => "rsge",
            IndexFamily::Beta => "beta",
            IndexFamily::SymmetrizedBeta => "sbeta",
            IndexFamily::Atkinson => "atkinson",
            IndexFamily::StandardizedSRI => "ssri",
        }
    }

    /// True when the value does not depend on the reference.
    pub fn is_reference_invariant(self) -> bool {
        !matches!(self, IndexFamily::GeneralizedEntropy | IndexFamily::SymmetrizedGE | IndexFamily::Beta)
    }
}

impl fmt::Display for IndexFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for IndexFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        IndexFamily::ALL
            .into_iter()
            .find(|f| f.code() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown index family `{s}`")))
    }
}

/// Full description of one between-group index evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexRequest {
    pub family: IndexFamily,
    pub alpha: f64,
    pub scheme: WeightingScheme,
    pub reference: ReferenceSpec,
    /// Apply the exponential standardization to the family's raw value.
    pub standardize: bool,
}

/// Base quantity an [`IndexRequest`] reduces to, before standardization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BaseIndex {
    Renyi,
    SymmetrizedRenyi,
    Generic(IndexFamily),
}

impl IndexRequest {
    pub fn new(family: IndexFamily, alpha: f64, scheme: WeightingScheme) -> Self {
        Self { family, alpha, scheme, reference: ReferenceSpec::PopulationAverage, standardize: false }
    }

    pub fn with_reference(mut self, reference: ReferenceSpec) -> Self {
        self.reference = reference;
        self
    }

    pub fn standardized(mut self, yes: bool) -> Self {
        self.standardize = yes;
        self
    }

    /// Split into the raw quantity and the multiplier `k` of `1 - exp(-k v)`, if any.
    pub(crate) fn decompose(&self) -> Result<(BaseIndex, Option<f64>)> {
        let alpha = self.alpha;
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("aversion parameter {alpha} is not finite")));
        }
        let positive = |what: &str| {
            if alpha > 0.0 {
                Ok(alpha)
            } else {
                Err(Error::InvalidParameter(format!("{what} needs alpha > 0, got {alpha}")))
            }
        };
        Ok(match self.family {
            IndexFamily::Atkinson => (BaseIndex::Renyi, Some(positive("Atkinson index")?)),
            IndexFamily::StandardizedSRI => (BaseIndex::SymmetrizedRenyi, Some(symmetric_aversion(alpha))),
            IndexFamily::Renyi => (
                BaseIndex::Renyi,
                self.standardize.then(|| positive("standardized Renyi index")).transpose()?,
            ),
            IndexFamily::SymmetrizedRenyi => {
                (BaseIndex::SymmetrizedRenyi, self.standardize.then(|| symmetric_aversion(alpha)))
            }
            IndexFamily::GeneralizedEntropy => (
                BaseIndex::Generic(IndexFamily::GeneralizedEntropy),
                self.standardize.then(|| positive("standardized GE index")).transpose()?,
            ),
            f @ (IndexFamily::SymmetrizedGE | IndexFamily::RefInvariantSymGE) => {
                (BaseIndex::Generic(f), self.standardize.then(|| symmetric_aversion(alpha)))
            }
            f @ (IndexFamily::Beta | IndexFamily::SymmetrizedBeta) => {
                if self.standardize {
                    return Err(Error::InvalidParameter(
                        "standardization is not defined for the beta family".into(),
                    ));
                }
                (BaseIndex::Generic(f), None)
            }
        })
    }

    /// Evaluate the index, using the closed forms for the Rényi family.
    pub fn evaluate(&self, g: &GroupedSummary) -> Result<f64> {
        let (base, k) = self.decompose()?;
        let raw = match base {
            BaseIndex::Renyi => closed_form_renyi(g, self.scheme, self.alpha)?,
            BaseIndex::SymmetrizedRenyi => closed_form_sri(g, self.scheme, self.alpha)?,
            BaseIndex::Generic(f) => self.generic_raw(g, f)?,
        };
        Ok(match k {
            Some(k) => exp_standardize(raw, k),
            None => raw,
        })
    }

    /// Evaluate through the mass functions `(p, q)` for every family, honouring the reference.
    pub fn evaluate_generic(&self, g: &GroupedSummary) -> Result<f64> {
        let (base, k) = self.decompose()?;
        let family = match base {
            BaseIndex::Renyi => IndexFamily::Renyi,
            BaseIndex::SymmetrizedRenyi => IndexFamily::SymmetrizedRenyi,
            BaseIndex::Generic(f) => f,
        };
        let raw = self.generic_raw(g, family)?;
        Ok(match k {
            Some(k) => exp_standardize(raw, k),
            None => raw,
        })
    }

    fn generic_raw(&self, g: &GroupedSummary, family: IndexFamily) -> Result<f64> {
        let (p, q) = g.masses(self.scheme, self.reference)?;
        let alpha = self.alpha;
        let r = match family {
            IndexFamily::Renyi | IndexFamily::Atkinson => renyi_divergence(&p, &q, alpha),
            IndexFamily::SymmetrizedRenyi | IndexFamily::StandardizedSRI => symmetrized_renyi(&p, &q, alpha),
            IndexFamily::GeneralizedEntropy => alpha_divergence(&p, &q, alpha),
            IndexFamily::SymmetrizedGE => symmetrized_ge(&p, &q, alpha),
            IndexFamily::RefInvariantSymGE => ref_invariant_sym_ge(&p, &q, alpha),
            IndexFamily::Beta => beta_divergence(&p, &q, alpha),
            IndexFamily::SymmetrizedBeta => symmetrized_beta(&p, &q, alpha),
        };
        r.map_err(|e| match e {
            Error::ZeroMassGroup { index } => g.zero_mean_error(index),
            e => e,
        })
    }
}

/// Between-group index with the population average as reference and no extra standardization.
pub fn between_group_index(
    g: &GroupedSummary,
    scheme: WeightingScheme,
    family: IndexFamily,
    alpha: f64,
) -> Result<f64> {
    IndexRequest::new(family, alpha, scheme).evaluate(g)
}

/// Between-group Rényi index in closed form:
/// `1/(α(1-α)) ln{ W^α (Σ w_j ȳ_j)^{1-α} / Σ w_j ȳ_j^{1-α} }` with `w_j = n_j`
/// (population weighted) or `w_j = 1` (equally weighted), `W = Σ w_j`.
pub fn closed_form_renyi(g: &GroupedSummary, scheme: WeightingScheme, alpha: f64) -> Result<f64> {
    let v = match regime(alpha) {
        Regime::One => closed_form_mld(g, scheme)?,
        Regime::Zero => closed_form_theil(g, scheme)?,
        Regime::General => {
            let lw = g.log_group_weights(scheme);
            let log_total_weight = log_sum_exp(lw.iter().copied());
            let log_burden = g.log_weighted_power_sum(&lw, 1.0)?;
            if log_burden == f64::NEG_INFINITY {
                return Err(Error::ZeroMeanGroup { group: "<all>".into() });
            }
            let log_power = g.log_weighted_power_sum(&lw, 1.0 - alpha)?;
            (alpha * log_total_weight + (1.0 - alpha) * log_burden - log_power) / (alpha * (1.0 - alpha))
        }
    };
    if v.is_finite() {
        Ok(v.max(0.0))
    } else {
        Err(Error::NonFinite)
    }
}

/// Between-group symmetrized Rényi index in closed form:
/// `1/(2α(1-α)) ln{ W Σ w_j ȳ_j / (Σ w_j ȳ_j^{1-α} · Σ w_j ȳ_j^α) }`.
pub fn closed_form_sri(g: &GroupedSummary, scheme: WeightingScheme, alpha: f64) -> Result<f64> {
    let v = match regime(alpha) {
        Regime::One | Regime::Zero => closed_form_sti(g, scheme)?,
        Regime::General => {
            let lw = g.log_group_weights(scheme);
            let log_total_weight = log_sum_exp(lw.iter().copied());
            let log_burden = g.log_weighted_power_sum(&lw, 1.0)?;
            if log_burden == f64::NEG_INFINITY {
                return Err(Error::ZeroMeanGroup { group: "<all>".into() });
            }
            let a = g.log_weighted_power_sum(&lw, 1.0 - alpha)?;
            let b = g.log_weighted_power_sum(&lw, alpha)?;
            (log_total_weight + log_burden - a - b) / (2.0 * alpha * (1.0 - alpha))
        }
    };
    if v.is_finite() {
        Ok(v.max(0.0))
    } else {
        Err(Error::NonFinite)
    }
}

/// Weights `w_j` and their total: `(n_j, n)` or `(1, m)`.
fn closed_weights(g: &GroupedSummary, scheme: WeightingScheme) -> (Vec<f64>, f64) {
    match scheme {
        WeightingScheme::PopulationWeighted => (g.sizes.clone(), g.total_size()),
        WeightingScheme::EquallyWeighted => (vec![1.0; g.len()], g.len() as f64),
    }
}

/// Mean log deviation: `-(1/W) Σ w_j ln ȳ_j + ln(Σ w_j ȳ_j / W)`.
fn closed_form_mld(g: &GroupedSummary, scheme: WeightingScheme) -> Result<f64> {
    if let Some(j) = g.first_zero_mean() {
        return Err(g.zero_mean_error(j));
    }
    let (w, total) = closed_weights(g, scheme);
    let mean = w.iter().zip(&g.means).map(|(w, y)| w * y).sum::<f64>() / total;
    let avg_log = w.iter().zip(&g.means).map(|(w, y)| w * y.ln()).sum::<f64>() / total;
    Ok(mean.ln() - avg_log)
}

/// Theil index: `Σ w_j ȳ_j ln ȳ_j / Σ w_j ȳ_j - ln(Σ w_j ȳ_j / W)`.
fn closed_form_theil(g: &GroupedSummary, scheme: WeightingScheme) -> Result<f64> {
    let (w, total) = closed_weights(g, scheme);
    let burden: f64 = w.iter().zip(&g.means).map(|(w, y)| w * y).sum();
    if burden == 0.0 {
        return Err(Error::ZeroMeanGroup { group: "<all>".into() });
    }
    let ylny: f64 = w.iter().zip(&g.means).map(|(w, &y)| if y == 0.0 { 0.0 } else { w * y * ln0(y) }).sum();
    Ok(ylny / burden - (burden / total).ln())
}

/// Symmetrized Theil index: `(1/(2 Σ w_j ȳ_j)) Σ w_j (ȳ_j - ȳ_w) ln ȳ_j`, `ȳ_w = Σ w_j ȳ_j / W`.
fn closed_form_sti(g: &GroupedSummary, scheme: WeightingScheme) -> Result<f64> {
    if let Some(j) = g.first_zero_mean() {
        return Err(g.zero_mean_error(j));
    }
    let (w, total) = closed_weights(g, scheme);
    let burden: f64 = w.iter().zip(&g.means).map(|(w, y)| w * y).sum();
    let mean = burden / total;
    let s: f64 = w.iter().zip(&g.means).map(|(w, y)| w * (y - mean) * y.ln()).sum();
    Ok(s / (2.0 * burden))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_group() -> GroupedSummary {
        GroupedSummary::new(
            ["A", "B", "C", "D"].map(String::from).to_vec(),
            vec![1.0; 4],
            vec![0.5, 0.4, 0.3, 0.1],
        )
        .unwrap()
    }

    const STI: f64 = 0.137_753_232_516_637_16;

    #[test]
    fn equal_means_give_zero_everywhere() {
        let g = GroupedSummary::unlabeled(vec![3.0, 1.0, 2.0], vec![0.2; 3]).unwrap();
        for family in IndexFamily::ALL {
            for scheme in [WeightingScheme::PopulationWeighted, WeightingScheme::EquallyWeighted] {
                for &a in &[0.5, 1.0, 2.0, 0.0, 0.3] {
                    let req = IndexRequest::new(family, a, scheme);
                    match req.evaluate(&g) {
                        Ok(v) => assert!(v.abs() < 1e-13, "{family} {scheme} {a}: {v}"),
                        Err(e) => {
                            assert!(matches!(e, Error::InvalidParameter(_)), "{family} {scheme} {a}: {e}")
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn four_group_sti_under_both_schemes() {
        let g = four_group();
        for scheme in [WeightingScheme::PopulationWeighted, WeightingScheme::EquallyWeighted] {
            let v = between_group_index(&g, scheme, IndexFamily::SymmetrizedRenyi, 1.0).unwrap();
            assert!((v - STI).abs() < 1e-14);
        }
    }

    #[test]
    fn references_agree_for_invariant_families() {
        let g = four_group();
        for family in [IndexFamily::Renyi, IndexFamily::SymmetrizedRenyi, IndexFamily::RefInvariantSymGE] {
            let vals: Vec<f64> = [
                ReferenceSpec::LeastAdverse,
                ReferenceSpec::PopulationAverage,
                ReferenceSpec::FixedTarget(0.42),
            ]
            .into_iter()
            .map(|r| {
                IndexRequest::new(family, 2.0, WeightingScheme::PopulationWeighted)
                    .with_reference(r)
                    .evaluate_generic(&g)
                    .unwrap()
            })
            .collect();
            assert!((vals[0] - vals[1]).abs() <= 1e-12 * vals[0]);
            assert!((vals[0] - vals[2]).abs() <= 1e-12 * vals[0]);
        }
    }

    #[test]
    fn near_equal_means_stay_reference_invariant() {
        // Tiny index values: the normalization rounding must not leak through.
        let g = GroupedSummary::unlabeled(vec![311.7, 42.9, 870.2], vec![0.4131, 0.4127, 0.4142]).unwrap();
        for family in [IndexFamily::Renyi, IndexFamily::SymmetrizedRenyi, IndexFamily::RefInvariantSymGE] {
            for alpha in [-2.0, 0.0, 0.5, 1.0, 2.0, 8.0] {
                let req = IndexRequest::new(family, alpha, WeightingScheme::PopulationWeighted);
                let base = req.evaluate_generic(&g).unwrap();
                assert!(base > 0.0 && base < 1e-5);
                for r in [ReferenceSpec::LeastAdverse, ReferenceSpec::FixedTarget(1.7)] {
                    let v = req.with_reference(r).evaluate_generic(&g).unwrap();
                    assert!((v - base).abs() <= 1e-12 * base, "{family:?} {alpha}: {v} vs {base}");
                }
            }
        }
    }

    #[test]
    fn ge_depends_on_reference() {
        let g = four_group();
        let avg =
            IndexRequest::new(IndexFamily::GeneralizedEntropy, 2.0, WeightingScheme::PopulationWeighted);
        let best = avg.with_reference(ReferenceSpec::LeastAdverse);
        assert!((avg.evaluate(&g).unwrap() - best.evaluate(&g).unwrap()).abs() > 1e-3);
    }

    #[test]
    fn least_adverse_ties_pick_lowest_index() {
        let g = GroupedSummary::unlabeled(vec![1.0; 4], vec![0.3, 0.1, 0.5, 0.1]).unwrap();
        assert_eq!(g.least_adverse(), (1, "g2"));
    }

    #[test]
    fn closed_forms_match_limit_values() {
        // Unequal sizes so the two schemes differ.
        let g = GroupedSummary::unlabeled(vec![10.0, 30.0, 60.0], vec![0.3, 0.2, 0.1]).unwrap();
        let n = g.total_size();
        let ybar = g.overall_mean();
        let mld = -g.sizes().iter().zip(g.means()).map(|(n_j, y)| n_j * y.ln()).sum::<f64>() / n + ybar.ln();
        let ti = g.sizes().iter().zip(g.means()).map(|(n_j, y)| n_j * y * y.ln()).sum::<f64>() / (n * ybar)
            - ybar.ln();
        let pw = WeightingScheme::PopulationWeighted;
        assert!((closed_form_renyi(&g, pw, 1.0).unwrap() - mld).abs() < 1e-15);
        assert!((closed_form_renyi(&g, pw, 0.0).unwrap() - ti).abs() < 1e-15);
        assert!((closed_form_sri(&g, pw, 1.0).unwrap() - 0.5 * (mld + ti)).abs() < 1e-15);

        let m = 3.0;
        let sum_y: f64 = g.means().iter().sum();
        let mld_ew = -g.means().iter().map(|y| y.ln()).sum::<f64>() / m + (sum_y / m).ln();
        let ti_ew = g.means().iter().map(|y| y * y.ln()).sum::<f64>() / sum_y - (sum_y / m).ln();
        let ew = WeightingScheme::EquallyWeighted;
        assert!((closed_form_renyi(&g, ew, 1.0).unwrap() - mld_ew).abs() < 1e-15);
        assert!((closed_form_renyi(&g, ew, 0.0).unwrap() - ti_ew).abs() < 1e-15);
    }

    #[test]
    fn zero_means() {
        let g = GroupedSummary::unlabeled(vec![1.0, 2.0, 1.0], vec![0.2, 0.0, 0.4]).unwrap();
        let pw = WeightingScheme::PopulationWeighted;
        assert!(closed_form_renyi(&g, pw, 0.5).is_ok());
        assert!(closed_form_renyi(&g, pw, 0.0).is_ok());
        assert!(closed_form_sri(&g, pw, 0.3).is_ok());
        let zero = Error::ZeroMeanGroup { group: "g2".into() };
        assert_eq!(closed_form_renyi(&g, pw, 1.0), Err(zero.clone()));
        assert_eq!(closed_form_renyi(&g, pw, 2.0), Err(zero.clone()));
        assert_eq!(closed_form_sri(&g, pw, 1.0), Err(zero.clone()));
        assert_eq!(closed_form_sri(&g, pw, 2.0), Err(zero.clone()));
        let req = IndexRequest::new(IndexFamily::Renyi, 2.0, pw);
        assert_eq!(req.evaluate_generic(&g), Err(zero));
        let all_zero = GroupedSummary::unlabeled(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(closed_form_renyi(&all_zero, pw, 0.5), Err(Error::ZeroMeanGroup { .. })));
    }

    #[test]
    fn summary_validation() {
        assert!(GroupedSummary::unlabeled(vec![1.0], vec![0.1]).is_err());
        assert!(GroupedSummary::unlabeled(vec![1.0, 0.0], vec![0.1, 0.2]).is_err());
        assert!(GroupedSummary::unlabeled(vec![1.0, 1.0], vec![0.1, -0.2]).is_err());
        assert!(matches!(
            GroupedSummary::unlabeled(vec![1.0, 1.0], vec![0.1]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn parsing_round_trips() {
        for f in IndexFamily::ALL {
            assert_eq!(f.code().parse::<IndexFamily>().unwrap(), f);
        }
        assert_eq!("target:0.42".parse::<ReferenceSpec>().unwrap(), ReferenceSpec::FixedTarget(0.42));
        assert!("target:-1".parse::<ReferenceSpec>().is_err());
        assert_eq!("EW".parse::<WeightingScheme>().unwrap(), WeightingScheme::EquallyWeighted);
    }

    #[test]
    fn standardization_rules() {
        let g = four_group();
        let pw = WeightingScheme::PopulationWeighted;
        let ssri = IndexRequest::new(IndexFamily::StandardizedSRI, 1.0, pw).evaluate(&g).unwrap();
        let sri_std = IndexRequest::new(IndexFamily::SymmetrizedRenyi, 1.0, pw)
            .standardized(true)
            .evaluate(&g)
            .unwrap();
        assert_eq!(ssri, sri_std);
        assert!(IndexRequest::new(IndexFamily::Beta, 0.5, pw).standardized(true).evaluate(&g).is_err());
        assert!(IndexRequest::new(IndexFamily::Atkinson, -1.0, pw).evaluate(&g).is_err());
    }
}
