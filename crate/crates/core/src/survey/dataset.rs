use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sampled individual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub stratum: String,
    /// PSU label, nested within the stratum.
    pub psu: String,
    pub weight: f64,
    pub group: String,
    pub outcome: f64,
}

impl SurveyRecord {
    pub fn new(
        stratum: impl Into<String>,
        psu: impl Into<String>,
        weight: f64,
        group: impl Into<String>,
        outcome: f64,
    ) -> Self {
        Self { stratum: stratum.into(), psu: psu.into(), weight, group: group.into(), outcome }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Stratum {
    pub label: String,
    pub psus: Vec<String>,
    /// Global index of this stratum's first PSU; its PSUs are contiguous.
    pub first_psu: usize,
}

impl Stratum {
    pub fn psu_range(&self) -> std::ops::Range<usize> {
        self.first_psu..self.first_psu + self.psus.len()
    }
}

/// Stratified multistage sample: records plus the stratum → PSU design.
///
/// Strata and PSUs are kept in sorted label order; every PSU gets a global
/// index so replicate weights can be expressed per PSU.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyDataset {
    records: Vec<SurveyRecord>,
    groups: Vec<String>,
    strata: Vec<Stratum>,
    record_group: Vec<usize>,
    record_psu: Vec<usize>,
}

impl SurveyDataset {
    /// Build a dataset whose groups are the sorted distinct labels in `records`.
    pub fn new(records: Vec<SurveyRecord>) -> Result<Self> {
        let groups: BTreeSet<&str> = records.iter().map(|r| r.group.as_str()).collect();
        let groups = groups.into_iter().map(String::from).collect();
        Self::with_groups(records, groups)
    }

    /// Build a dataset with an explicit group order. Every declared group
    /// must have a record and every record must carry a declared group.
    pub fn with_groups(records: Vec<SurveyRecord>, groups: Vec<String>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let group_index: BTreeMap<&str, usize> =
            groups.iter().enumerate().map(|(j, g)| (g.as_str(), j)).collect();
        if group_index.len() != groups.len() {
            return Err(Error::InvalidParameter("duplicate group label".into()));
        }
        let mut seen = vec![false; groups.len()];
        let mut record_group = Vec::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if !(r.weight > 0.0 && r.weight.is_finite()) {
                return Err(Error::InvalidRecord {
                    index: i,
                    reason: format!("weight {} must be positive", r.weight),
                });
            }
            if !(r.outcome >= 0.0 && r.outcome.is_finite()) {
                return Err(Error::InvalidRecord {
                    index: i,
                    reason: format!("outcome {} must be finite and nonnegative", r.outcome),
                });
            }
            let j = *group_index.get(r.group.as_str()).ok_or_else(|| Error::InvalidRecord {
                index: i,
                reason: format!("group `{}` is not declared", r.group),
            })?;
            seen[j] = true;
            record_group.push(j);
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyGroup(groups[j].clone()));
        }

        let mut design: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for r in &records {
            design.entry(&r.stratum).or_default().insert(&r.psu);
        }
        let mut strata = Vec::with_capacity(design.len());
        let mut psu_index: BTreeMap<(&str, &str), usize> = BTreeMap::new();
        let mut next = 0;
        for (label, psus) in &design {
            let first_psu = next;
            for psu in psus {
                psu_index.insert((label, psu), next);
                next += 1;
            }
            strata.push(Stratum {
                label: label.to_string(),
                psus: psus.iter().map(|p| p.to_string()).collect(),
                first_psu,
            });
        }
        let record_psu = records.iter().map(|r| psu_index[&(r.stratum.as_str(), r.psu.as_str())]).collect();
        drop(design);
        drop(psu_index);
        Ok(Self { records, groups, strata, record_group, record_psu })
    }

    pub fn records(&self) -> &[SurveyRecord] {
        &self.records
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn n_strata(&self) -> usize {
        self.strata.len()
    }

    pub fn n_psus(&self) -> usize {
        self.strata.last().map_or(0, |s| s.first_psu + s.psus.len())
    }

    /// Stratum label → set of PSU labels.
    pub fn design(&self) -> BTreeMap<String, BTreeSet<String>> {
        self.strata.iter().map(|s| (s.label.clone(), s.psus.iter().cloned().collect())).collect()
    }

    /// Record count per group, in group order.
    pub fn group_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.groups.len()];
        for &g in &self.record_group {
            counts[g] += 1;
        }
        counts
    }

    pub fn is_binary(&self) -> bool {
        self.records.iter().all(|r| r.outcome == 0.0 || r.outcome == 1.0)
    }

    /// True when every stratum has exactly two PSUs.
    pub fn is_two_psu_design(&self) -> bool {
        self.strata.iter().all(|s| s.psus.len() == 2)
    }

    pub(crate) fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub(crate) fn record_group(&self) -> &[usize] {
        &self.record_group
    }

    pub(crate) fn record_psu(&self) -> &[usize] {
        &self.record_psu
    }

    pub(crate) fn require_multi_psu_strata(&self) -> Result<()> {
        match self.strata.iter().find(|s| s.psus.len() < 2) {
            Some(s) => Err(Error::SingletonStratum(s.label.clone())),
            None => Ok(()),
        }
    }

    /// Same design and weights with every outcome multiplied by `c > 0`.
    pub fn with_scaled_outcomes(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {c} must be positive")));
        }
        let mut out = self.clone();
        for r in &mut out.records {
            r.outcome *= c;
        }
        Ok(out)
    }

    /// Merge every single-PSU stratum into its neighbour (the next stratum in
    /// label order, or the previous one for the last stratum). PSU labels in
    /// merged strata are prefixed with their original stratum.
    pub fn collapse_singleton_strata(&self) -> Result<Self> {
        if self.strata.iter().all(|s| s.psus.len() > 1) {
            return Ok(self.clone());
        }
        if self.strata.len() < 2 {
            return Err(Error::SingletonStratum(self.strata[0].label.clone()));
        }
        // Partition stratum indices into merge blocks.
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut pending: Vec<usize> = Vec::new();
        for (i, s) in self.strata.iter().enumerate() {
            pending.push(i);
            if s.psus.len() > 1 || pending.len() > 1 {
                blocks.push(std::mem::take(&mut pending));
            }
        }
        if !pending.is_empty() {
            blocks.last_mut().expect("at least two strata").extend(pending);
        }
        let mut new_label = vec![String::new(); self.strata.len()];
        let mut merged = vec![false; self.strata.len()];
        for block in &blocks {
            let label = block.iter().map(|&i| self.strata[i].label.as_str()).collect::<Vec<_>>().join("+");
            for &i in block {
                new_label[i] = label.clone();
                merged[i] = block.len() > 1;
            }
        }
        let index: BTreeMap<&str, usize> =
            self.strata.iter().enumerate().map(|(i, s)| (s.label.as_str(), i)).collect();
        let records = self
            .records
            .iter()
            .map(|r| {
                let i = index[r.stratum.as_str()];
                let mut r = r.clone();
                if merged[i] {
                    r.psu = format!("{}/{}", r.stratum, r.psu);
                }
                r.stratum = new_label[i].clone();
                r
            })
            .collect();
        Self::with_groups(records, self.groups.clone())
    }
}
