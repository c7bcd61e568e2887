use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::SurveyDataset;
use super::hadamard::{default_order, hadamard};
use super::linearization::{group_partials, scores_from_partials};
use super::stats::{compute_sufficient_stats, PsuCells};
use crate::divergence::IndexRequest;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarianceMethod {
    TaylorLinearization,
    Brr,
    RescaledBootstrap,
}

impl VarianceMethod {
    pub const ALL: [VarianceMethod; 3] = [Self::TaylorLinearization, Self::Brr, Self::RescaledBootstrap];

    pub fn code(self) -> &'static str {
        match self {
            Self::TaylorLinearization => "taylor",
            Self::Brr => "brr",
            Self::RescaledBootstrap => "boot",
        }
    }

    pub fn is_replication(self) -> bool {
        self != Self::TaylorLinearization
    }
}

impl fmt::Display for VarianceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for VarianceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "taylor" | "linearization" => Ok(Self::TaylorLinearization),
            "brr" => Ok(Self::Brr),
            "boot" | "bootstrap" => Ok(Self::RescaledBootstrap),
            other => Err(Error::InvalidParameter(format!("unknown variance method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub point: f64,
    pub se: f64,
    pub method: VarianceMethod,
    /// Replicate index values, for replication methods only.
    pub replicates: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationConfig {
    pub n_reps: usize,
    /// Fay perturbation `f`: half-sample factors become `2 - f` and `f`.
    pub fay_coefficient: f64,
    pub seed: u64,
    /// Explicit Hadamard order for BRR; defaults to the smallest multiple of 4 covering the strata.
    pub hadamard_order: Option<usize>,
}

impl Default for ReplicationConfig {
    fn default() -> Self {
        Self { n_reps: 500, fay_coefficient: 0.0, seed: 0, hadamard_order: None }
    }
}

impl ReplicationConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_reps == 0 {
            return Err(Error::InvalidParameter("n_reps must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.fay_coefficient) {
            return Err(Error::InvalidParameter(format!(
                "Fay coefficient {} must lie in [0, 1)",
                self.fay_coefficient
            )));
        }
        Ok(())
    }
}

/// RNG stream domains; each replicate of each domain gets its own stream.
pub(crate) const DOMAIN_BOOTSTRAP: u64 = 1;
pub(crate) const DOMAIN_NULL_OUTCOME: u64 = 2;
pub(crate) const DOMAIN_NULL_RESAMPLE: u64 = 3;

pub(crate) fn replicate_rng(seed: u64, domain: u64, replicate: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((domain << 48) | replicate as u64);
    rng
}

/// Taylor-linearization standard error under the stratified, with-replacement
/// first-stage approximation.
pub fn taylor_se(d: &SurveyDataset, req: &IndexRequest) -> Result<VarianceEstimate> {
    d.require_multi_psu_strata()?;
    let stats = compute_sufficient_stats(d);
    let partials = group_partials(&stats, d.groups(), req)?;
    let scores = scores_from_partials(d, &partials);
    let mut z = vec![0.0; d.n_psus()];
    for (s, &c) in scores.iter().zip(d.record_psu()) {
        z[c] += s;
    }
    let mut var = 0.0;
    for stratum in d.strata() {
        let zs = &z[stratum.psu_range()];
        let c = zs.len() as f64;
        let mean = zs.iter().sum::<f64>() / c;
        var += c / (c - 1.0) * zs.iter().map(|z| (z - mean).powi(2)).sum::<f64>();
    }
    Ok(VarianceEstimate {
        point: partials.point,
        se: var.sqrt(),
        method: VarianceMethod::TaylorLinearization,
        replicates: None,
    })
}

/// Evaluate every replicate (in parallel, order preserved) from its PSU factors.
fn run_replicates<F>(d: &SurveyDataset, req: &IndexRequest, n: usize, factors: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Vec<f64> + Sync,
{
    let cells = PsuCells::new(d);
    (0..n)
        .into_par_iter()
        .map(|r| {
            let stats = cells.reweighted(&factors(r));
            stats
                .to_summary(d.groups())
                .and_then(|g| req.evaluate(&g))
                .map_err(|e| Error::Replicate { replicate: r, source: Box::new(e) })
        })
        .collect()
}

fn point_estimate(d: &SurveyDataset, req: &IndexRequest) -> Result<f64> {
    req.evaluate(&compute_sufficient_stats(d).to_summary(d.groups())?)
}

/// Balanced repeated replication (optionally Fay-perturbed) for two-PSU designs.
pub fn brr_se(d: &SurveyDataset, cfg: &ReplicationConfig, req: &IndexRequest) -> Result<VarianceEstimate> {
    cfg.validate()?;
    if let Some(s) = d.strata().iter().find(|s| s.psus.len() != 2) {
        return Err(Error::NotTwoPsuDesign { stratum: s.label.clone(), psus: s.psus.len() });
    }
    let n_strata = d.n_strata();
    let order = cfg.hadamard_order.unwrap_or_else(|| default_order(n_strata));
    if order < n_strata {
        return Err(Error::HadamardUnavailable(order));
    }
    let h = hadamard(order).ok_or(Error::HadamardUnavailable(order))?;
    // Skip the constant first column whenever there is room.
    let first_col = usize::from(order > n_strata);
    let f = cfg.fay_coefficient;
    let point = point_estimate(d, req)?;
    let reps = run_replicates(d, req, order, |r| {
        let mut factors = vec![0.0; d.n_psus()];
        for (s, stratum) in d.strata().iter().enumerate() {
            let (a, b) = if h[r][first_col + s] > 0 { (2.0 - f, f) } else { (f, 2.0 - f) };
            factors[stratum.first_psu] = a;
            factors[stratum.first_psu + 1] = b;
        }
        factors
    })?;
    let ss: f64 = reps.iter().map(|t| (t - point).powi(2)).sum();
    let var = ss / (order as f64 * (1.0 - f).powi(2));
    Ok(VarianceEstimate { point, se: var.sqrt(), method: VarianceMethod::Brr, replicates: Some(reps) })
}

/// Rao–Wu rescaled bootstrap PSU factors for one replicate.
pub(crate) fn rao_wu_factors(d: &SurveyDataset, seed: u64, domain: u64, replicate: usize) -> Vec<f64> {
    let mut rng = replicate_rng(seed, domain, replicate);
    let mut factors = vec![0.0; d.n_psus()];
    for (s, stratum) in d.strata().iter().enumerate() {
        rng.set_word_pos((s as u128) << 32);
        let c = stratum.psus.len();
        let scale = c as f64 / (c - 1) as f64;
        for _ in 0..c - 1 {
            let k = rng.random_range(0..c as u32) as usize;
            factors[stratum.first_psu + k] += scale;
        }
    }
    factors
}

/// Rao–Wu rescaled bootstrap: `C_s - 1` PSUs drawn with replacement per stratum.
pub fn rescaled_bootstrap_se(
    d: &SurveyDataset,
    cfg: &ReplicationConfig,
    req: &IndexRequest,
) -> Result<VarianceEstimate> {
    cfg.validate()?;
    d.require_multi_psu_strata()?;
    let point = point_estimate(d, req)?;
    let reps = run_replicates(d, req, cfg.n_reps, |r| rao_wu_factors(d, cfg.seed, DOMAIN_BOOTSTRAP, r))?;
    let var = reps.iter().map(|t| (t - point).powi(2)).sum::<f64>() / cfg.n_reps as f64;
    Ok(VarianceEstimate {
        point,
        se: var.sqrt(),
        method: VarianceMethod::RescaledBootstrap,
        replicates: Some(reps),
    })
}

/// Dispatch on `method`.
pub fn estimate_variance(
    d: &SurveyDataset,
    method: VarianceMethod,
    cfg: &ReplicationConfig,
    req: &IndexRequest,
) -> Result<VarianceEstimate> {
    match method {
        VarianceMethod::TaylorLinearization => taylor_se(d, req),
        VarianceMethod::Brr => brr_se(d, cfg, req),
        VarianceMethod::RescaledBootstrap => rescaled_bootstrap_se(d, cfg, req),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{IndexFamily, WeightingScheme};
    use crate::survey::SurveyRecord;

    fn toy() -> SurveyDataset {
        // 2 strata × 2 PSUs, two groups.
        let rows = [
            ("1", "1", 1.0, "A", 1.0),
            ("1", "1", 1.0, "B", 2.0),
            ("1", "2", 1.0, "A", 2.0),
            ("1", "2", 1.0, "B", 2.0),
            ("2", "1", 1.0, "A", 1.0),
            ("2", "1", 1.0, "B", 3.0),
            ("2", "2", 1.0, "A", 1.0),
            ("2", "2", 1.0, "B", 4.0),
        ];
        SurveyDataset::new(rows.iter().map(|&(s, p, w, g, y)| SurveyRecord::new(s, p, w, g, y)).collect())
            .unwrap()
    }

    #[test]
    fn taylor_matches_hand_computation() {
        // MLD, population weighted. U0 = (4, 4), U1 = (5, 11), ȳ = (1.25, 2.75), ȳ.. = 2.
        // ∂U0_k = (1/64)·4·ln(ȳ_j/ȳ_k) summed, ∂U1_k = (1/16)(1 - 2/ȳ_k).
        let d = toy();
        let req = IndexRequest::new(IndexFamily::Renyi, 1.0, WeightingScheme::PopulationWeighted);
        let (ya, yb): (f64, f64) = (1.25, 2.75);
        let l = (yb / ya).ln();
        let d0 = [4.0 * l / 64.0, -4.0 * l / 64.0];
        let d1 = [(1.0 - 2.0 / ya) / 16.0, (1.0 - 2.0 / yb) / 16.0];
        let score = |g: usize, y: f64| d0[g] + y * d1[g];
        let z11 = score(0, 1.0) + score(1, 2.0);
        let z12 = score(0, 2.0) + score(1, 2.0);
        let z21 = score(0, 1.0) + score(1, 3.0);
        let z22 = score(0, 1.0) + score(1, 4.0);
        let v = 2.0 * ((z11 - z12) / 2.0).powi(2) * 2.0 + 2.0 * ((z21 - z22) / 2.0).powi(2) * 2.0;
        let est = taylor_se(&d, &req).unwrap();
        assert!((est.se - v.sqrt()).abs() < 1e-14, "{} vs {}", est.se, v.sqrt());
        assert!(est.replicates.is_none());
    }

    #[test]
    fn constant_outcomes_give_zero_se() {
        let recs = toy().records().iter().map(|r| SurveyRecord { outcome: 1.0, ..r.clone() }).collect();
        let d = SurveyDataset::new(recs).unwrap();
        let req = IndexRequest::new(IndexFamily::StandardizedSRI, 2.0, WeightingScheme::PopulationWeighted);
        let cfg = ReplicationConfig { n_reps: 50, ..ReplicationConfig::with_seed(9) };
        for m in VarianceMethod::ALL {
            let est = estimate_variance(&d, m, &cfg, &req).unwrap();
            assert!(est.se.abs() < 1e-12, "{m}: {}", est.se);
            assert_eq!(est.replicates.is_some(), m.is_replication());
        }
    }

    #[test]
    fn bootstrap_is_deterministic_and_rescaled() {
        let d = toy();
        let req = IndexRequest::new(IndexFamily::SymmetrizedRenyi, 0.5, WeightingScheme::EquallyWeighted);
        let cfg = ReplicationConfig { n_reps: 64, ..ReplicationConfig::with_seed(42) };
        let a = rescaled_bootstrap_se(&d, &cfg, &req).unwrap();
        let b = rescaled_bootstrap_se(&d, &cfg, &req).unwrap();
        assert_eq!(a, b);
        let f = rao_wu_factors(&d, 42, DOMAIN_BOOTSTRAP, 3);
        // Two PSUs per stratum, one draw: factors are (2, 0) or (0, 2).
        for pair in f.chunks(2) {
            assert_eq!(pair.iter().sum::<f64>(), 2.0);
        }
    }

    #[test]
    fn brr_design_checks() {
        let d = toy();
        let req = IndexRequest::new(IndexFamily::Renyi, 0.5, WeightingScheme::PopulationWeighted);
        let est = brr_se(&d, &ReplicationConfig::default(), &req).unwrap();
        assert_eq!(est.replicates.as_ref().unwrap().len(), 4);
        let bad = ReplicationConfig { hadamard_order: Some(6), ..Default::default() };
        assert_eq!(brr_se(&d, &bad, &req), Err(Error::HadamardUnavailable(6)));
        let mut recs = d.records().to_vec();
        recs.push(SurveyRecord::new("2", "3", 1.0, "A", 1.0));
        let three = SurveyDataset::new(recs).unwrap();
        assert_eq!(
            brr_se(&three, &ReplicationConfig::default(), &req),
            Err(Error::NotTwoPsuDesign { stratum: "2".into(), psus: 3 })
        );
    }
}
