//! Synthetic stratified two-stage samples for the survey tests.

#![allow(dead_code)]

use hdi_core::survey::{SurveyDataset, SurveyRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Design {
    pub strata: usize,
    pub psus_per_stratum: usize,
    pub persons_per_psu: usize,
    /// Group shares of the population.
    pub shares: Vec<f64>,
    /// Group prevalences.
    pub prevalences: Vec<f64>,
    /// Half-width of the multiplicative PSU effect on prevalence.
    pub cluster_effect: f64,
    pub seed: u64,
}

impl Design {
    pub fn generate(&self) -> SurveyDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut records = Vec::new();
        for s in 0..self.strata {
            let stratum_weight = rng.random_range(0.5..2.0);
            for c in 0..self.psus_per_stratum {
                let effect = 1.0 + rng.random_range(-self.cluster_effect..=self.cluster_effect);
                for _ in 0..self.persons_per_psu {
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    let mut g = self.shares.len() - 1;
                    for (j, share) in self.shares.iter().enumerate() {
                        acc += share;
                        if u < acc {
                            g = j;
                            break;
                        }
                    }
                    let p = (self.prevalences[g] * effect).clamp(0.0, 1.0);
                    let y = if rng.random_bool(p) { 1.0 } else { 0.0 };
                    let w = stratum_weight * rng.random_range(0.6..1.6);
                    records.push(SurveyRecord::new(
                        format!("s{s:02}"),
                        format!("p{c}"),
                        w,
                        format!("g{g}"),
                        y,
                    ));
                }
            }
        }
        SurveyDataset::new(records).expect("synthetic design is valid")
    }
}

/// Four groups with the race/ethnicity prevalences of the periodontitis example.
pub fn race_ethnicity_design(strata: usize, psus: usize, seed: u64) -> Design {
    Design {
        strata,
        psus_per_stratum: psus,
        persons_per_psu: 120,
        shares: vec![0.55, 0.2, 0.12, 0.13],
        prevalences: vec![0.105, 0.221, 0.181, 0.203],
        cluster_effect: 0.3,
        seed,
    }
}

/// Microdata as CSV text in the ingest layout.
pub fn to_csv(d: &SurveyDataset) -> String {
    let mut out = String::from("stratum,psu,weight,group,outcome\n");
    for r in d.records() {
        out.push_str(&format!("{},{},{},{},{}\n", r.stratum, r.psu, r.weight, r.group, r.outcome));
    }
    out
}
