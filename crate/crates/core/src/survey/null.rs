use rand::Rng;
use rayon::prelude::*;

use super::dataset::SurveyDataset;
use super::stats::{compute_sufficient_stats, PsuCells};
use super::variance::{
    rao_wu_factors, replicate_rng, ReplicationConfig, DOMAIN_NULL_OUTCOME, DOMAIN_NULL_RESAMPLE,
};
use crate::divergence::IndexRequest;
use crate::error::{Error, Result};

/// Replicate distribution of the index when nobody is at excess risk.
///
/// Each replicate keeps the design and weights, replaces every outcome with
/// an independent Bernoulli draw at the overall weighted prevalence, and
/// then applies Rao–Wu PSU resampling.
pub fn null_simulation(d: &SurveyDataset, cfg: &ReplicationConfig, req: &IndexRequest) -> Result<Vec<f64>> {
    cfg.validate()?;
    if let Some((index, r)) =
        d.records().iter().enumerate().find(|(_, r)| r.outcome != 0.0 && r.outcome != 1.0)
    {
        return Err(Error::NonBinaryOutcome { index, value: r.outcome });
    }
    d.require_multi_psu_strata()?;
    let stats = compute_sufficient_stats(d);
    let prevalence = stats.u1.iter().sum::<f64>() / stats.u0.iter().sum::<f64>();
    (0..cfg.n_reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(cfg.seed, DOMAIN_NULL_OUTCOME, r);
            let outcomes: Vec<f64> =
                (0..d.len()).map(|_| if rng.random_bool(prevalence) { 1.0 } else { 0.0 }).collect();
            let cells = PsuCells::with_outcomes(d, &outcomes);
            let factors = rao_wu_factors(d, cfg.seed, DOMAIN_NULL_RESAMPLE, r);
            cells
                .reweighted(&factors)
                .to_summary(d.groups())
                .and_then(|g| req.evaluate(&g))
                .map_err(|e| Error::Replicate { replicate: r, source: Box::new(e) })
        })
        .collect()
}

/// Share of the pooled points of `a` and `b` that fall inside the overlap of
/// their ranges. Zero when the ranges are disjoint.
pub fn distribution_overlap(a: &[f64], b: &[f64]) -> f64 {
    let range =
        |x: &[f64]| x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (alo, ahi) = range(a);
    let (blo, bhi) = range(b);
    let (lo, hi) = (alo.max(blo), ahi.min(bhi));
    if lo > hi {
        return 0.0;
    }
    let inside = a.iter().chain(b).filter(|&&v| v >= lo && v <= hi).count();
    inside as f64 / (a.len() + b.len()) as f64
}
