use serde::{Deserialize, Serialize};

use super::dataset::SurveyDataset;
use crate::divergence::GroupedSummary;
use crate::error::{Error, Result};

/// Weighted group totals: `u0_j = Σ w_i`, `u1_j = Σ w_i y_i` over group `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficientStats {
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
}

impl SufficientStats {
    pub fn len(&self) -> usize {
        self.u0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u0.is_empty()
    }

    /// Estimated group means `u1_j / u0_j`.
    pub fn means(&self) -> Vec<f64> {
        self.u1.iter().zip(&self.u0).map(|(a, b)| a / b).collect()
    }

    /// Grouped summary with estimated population sizes `u0` and means `u1 / u0`.
    pub fn to_summary(&self, labels: &[String]) -> Result<GroupedSummary> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: labels.len() });
        }
        if let Some(j) = self.u0.iter().position(|&n| n <= 0.0) {
            return Err(Error::EmptyGroup(labels[j].clone()));
        }
        GroupedSummary::new(labels.to_vec(), self.u0.clone(), self.means())
    }
}

pub fn compute_sufficient_stats(d: &SurveyDataset) -> SufficientStats {
    let m = d.n_groups();
    let mut u0 = vec![0.0; m];
    let mut u1 = vec![0.0; m];
    for (r, &g) in d.records().iter().zip(d.record_group()) {
        u0[g] += r.weight;
        u1[g] += r.weight * r.outcome;
    }
    SufficientStats { u0, u1 }
}

/// Per-PSU, per-group weighted totals. Replicate statistics are then a
/// factor-weighted sum over PSUs instead of a pass over the records.
#[derive(Debug, Clone)]
pub(crate) struct PsuCells {
    m: usize,
    u0: Vec<f64>,
    u1: Vec<f64>,
}

impl PsuCells {
    pub fn new(d: &SurveyDataset) -> Self {
        let outcomes: Vec<f64> = d.records().iter().map(|r| r.outcome).collect();
        Self::with_outcomes(d, &outcomes)
    }

    /// Cells for the dataset's design and weights but substitute outcomes.
    pub fn with_outcomes(d: &SurveyDataset, outcomes: &[f64]) -> Self {
        let m = d.n_groups();
        let mut u0 = vec![0.0; m * d.n_psus()];
        let mut u1 = vec![0.0; m * d.n_psus()];
        for (i, r) in d.records().iter().enumerate() {
            let cell = d.record_psu()[i] * m + d.record_group()[i];
            u0[cell] += r.weight;
            u1[cell] += r.weight * outcomes[i];
        }
        Self { m, u0, u1 }
    }

    /// Totals with PSU `c` weighted by `factors[c]`.
    pub fn reweighted(&self, factors: &[f64]) -> SufficientStats {
        let mut u0 = vec![0.0; self.m];
        let mut u1 = vec![0.0; self.m];
        for (c, &f) in factors.iter().enumerate() {
            if f == 0.0 {
                continue;
            }
            let base = c * self.m;
            for j in 0..self.m {
                u0[j] += f * self.u0[base + j];
                u1[j] += f * self.u1[base + j];
            }
        }
        SufficientStats { u0, u1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survey::SurveyRecord;

    #[test]
    fn totals_and_cells_agree() {
        let d = SurveyDataset::new(vec![
            SurveyRecord::new("1", "a", 2.0, "A", 1.0),
            SurveyRecord::new("1", "b", 1.0, "A", 0.0),
            SurveyRecord::new("1", "b", 3.0, "B", 1.0),
            SurveyRecord::new("2", "a", 1.5, "B", 0.0),
        ])
        .unwrap();
        let s = compute_sufficient_stats(&d);
        assert_eq!(s.u0, [3.0, 4.5]);
        assert_eq!(s.u1, [2.0, 3.0]);
        let cells = PsuCells::new(&d);
        assert_eq!(cells.reweighted(&[1.0; 3]), s);
        let g = s.to_summary(d.groups()).unwrap();
        assert_eq!(g.means(), [2.0 / 3.0, 3.0 / 4.5]);
        let dropped = cells.reweighted(&[2.0, 0.0, 0.0]);
        assert_eq!(dropped.to_summary(d.groups()), Err(Error::EmptyGroup("B".into())));
    }
}
