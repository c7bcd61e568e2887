mod common;

use common::{race_ethnicity_design, Design};
use hdi_core::survey::{
    brr_se, compute_sufficient_stats, distribution_overlap, linearization_scores, null_simulation,
    rescaled_bootstrap_se, taylor_se, ReplicationConfig, SurveyDataset, SurveyRecord,
};
use hdi_core::{IndexFamily, IndexRequest, WeightingScheme};

const SCHEMES: [WeightingScheme; 2] = [WeightingScheme::PopulationWeighted, WeightingScheme::EquallyWeighted];

fn index_of(d: &SurveyDataset, req: &IndexRequest) -> f64 {
    req.evaluate(&compute_sufficient_stats(d).to_summary(d.groups()).unwrap()).unwrap()
}

fn with_weight(d: &SurveyDataset, i: usize, w: f64) -> SurveyDataset {
    let mut recs = d.records().to_vec();
    recs[i].weight = w;
    SurveyDataset::new(recs).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn scores_match_weight_perturbations() {
    let d = Design { persons_per_psu: 15, ..race_ethnicity_design(3, 2, 11) }.generate();
    let families = [
        IndexFamily::Renyi,
        IndexFamily::SymmetrizedRenyi,
        IndexFamily::StandardizedSRI,
        IndexFamily::Atkinson,
        IndexFamily::RefInvariantSymGE,
        IndexFamily::GeneralizedEntropy,
    ];
    let h = 1e-6;
    for family in families {
        for scheme in SCHEMES {
            for alpha in [1e-8, 0.5, 1.0 - 1e-8, 1.0, 2.0] {
                let req = IndexRequest::new(family, alpha, scheme)
                    .standardized(family == IndexFamily::GeneralizedEntropy);
                let scores = linearization_scores(&d, &req).unwrap();
                // Total score vanishes: the index is invariant to scaling all weights.
                let total: f64 = scores.iter().sum();
                let scale: f64 = scores.iter().map(|s| s.abs()).sum();
                assert!(total.abs() < 1e-6 * scale, "{family} {scheme} {alpha}: {total}");
                for i in (0..d.len()).step_by(7) {
                    let w = d.records()[i].weight;
                    let up = index_of(&with_weight(&d, i, w + h), &req);
                    let dn = index_of(&with_weight(&d, i, w - h), &req);
                    let fd = (up - dn) / (2.0 * h);
                    let analytic = scores[i] / w;
                    assert!(
                        rel(analytic, fd) < 1e-4,
                        "{family} {scheme} alpha {alpha} record {i}: {analytic} vs {fd}"
                    );
                }
            }
        }
    }
}

#[test]
fn taylor_hand_computation_two_by_two() {
    // Unit weights, one person per (PSU, group); EW Theil-type index at α = 0.
    let rows = [
        ("a", "1", "x", 0.2),
        ("a", "1", "y", 0.6),
        ("a", "2", "x", 0.4),
        ("a", "2", "y", 0.5),
        ("b", "1", "x", 0.1),
        ("b", "1", "y", 0.9),
        ("b", "2", "x", 0.3),
        ("b", "2", "y", 0.7),
    ];
    let d = SurveyDataset::new(rows.iter().map(|&(s, c, g, y)| SurveyRecord::new(s, c, 1.0, g, y)).collect())
        .unwrap();
    let req = IndexRequest::new(IndexFamily::Renyi, 0.0, WeightingScheme::EquallyWeighted);
    // ȳ = (0.25, 0.675); T = 0.925; c_k = (ln ȳ_k - Σȳ ln ȳ / T) / T.
    let y = [0.25f64, 0.675];
    let t = y[0] + y[1];
    let s = (y[0] * y[0].ln() + y[1] * y[1].ln()) / t;
    let c: Vec<f64> = y.iter().map(|yk| (yk.ln() - s) / t).collect();
    let score = |g: usize, v: f64| (-y[g] * c[g] + v * c[g]) / 4.0;
    let z = [
        score(0, 0.2) + score(1, 0.6),
        score(0, 0.4) + score(1, 0.5),
        score(0, 0.1) + score(1, 0.9),
        score(0, 0.3) + score(1, 0.7),
    ];
    let v = 2.0 * (2.0 * ((z[0] - z[1]) / 2.0).powi(2)) + 2.0 * (2.0 * ((z[2] - z[3]) / 2.0).powi(2));
    let est = taylor_se(&d, &req).unwrap();
    assert!(rel(est.se, v.sqrt()) < 1e-12, "{} vs {}", est.se, v.sqrt());
}

#[test]
fn bootstrap_tracks_taylor_on_srs_like_design() {
    let d = Design {
        strata: 10,
        psus_per_stratum: 8,
        persons_per_psu: 25,
        shares: vec![0.4, 0.3, 0.3],
        prevalences: vec![0.1, 0.2, 0.3],
        cluster_effect: 0.0,
        seed: 3,
    }
    .generate();
    let cfg = ReplicationConfig { n_reps: 2000, ..ReplicationConfig::with_seed(17) };
    for alpha in [0.5, 1.0, 2.0] {
        let req = IndexRequest::new(IndexFamily::StandardizedSRI, alpha, WeightingScheme::PopulationWeighted);
        let t = taylor_se(&d, &req).unwrap().se;
        let b = rescaled_bootstrap_se(&d, &cfg, &req).unwrap().se;
        assert!(rel(t, b) < 0.15, "alpha {alpha}: taylor {t} vs boot {b}");
    }
}

#[test]
fn race_ethnicity_methods_agree() {
    let d = race_ethnicity_design(15, 2, 2004).generate();
    let cfg = ReplicationConfig { n_reps: 2000, ..ReplicationConfig::with_seed(7) };
    for alpha in [0.5, 1.0, 2.0] {
        let req = IndexRequest::new(IndexFamily::StandardizedSRI, alpha, WeightingScheme::PopulationWeighted);
        let t = taylor_se(&d, &req).unwrap().se;
        let b = rescaled_bootstrap_se(&d, &cfg, &req).unwrap().se;
        assert!(rel(t, b) < 0.15, "alpha {alpha}: taylor {t} vs boot {b}");
    }
}

#[test]
fn brr_and_fay_variants() {
    let d = race_ethnicity_design(4, 2, 8).generate();
    let req = IndexRequest::new(IndexFamily::StandardizedSRI, 1.0, WeightingScheme::PopulationWeighted);
    let t = taylor_se(&d, &req).unwrap().se;
    let brr = brr_se(&d, &ReplicationConfig::default(), &req).unwrap();
    assert!(rel(t, brr.se) < 0.2, "taylor {t} vs brr {}", brr.se);
    let fay = brr_se(&d, &ReplicationConfig { fay_coefficient: 0.5, ..Default::default() }, &req).unwrap();
    let boot = rescaled_bootstrap_se(
        &d,
        &ReplicationConfig { n_reps: 5000, ..ReplicationConfig::with_seed(1) },
        &req,
    )
    .unwrap()
    .se;
    for se in [brr.se, fay.se] {
        assert!(se > boot / 3.0 && se < boot * 3.0, "{se} vs bootstrap {boot}");
    }
}

#[test]
fn outcome_scaling_leaves_estimates_unchanged() {
    let d = race_ethnicity_design(6, 2, 5).generate();
    let scaled = d.with_scaled_outcomes(37.5).unwrap();
    let cfg = ReplicationConfig { n_reps: 100, ..ReplicationConfig::with_seed(2) };
    for family in [
        IndexFamily::Renyi,
        IndexFamily::SymmetrizedRenyi,
        IndexFamily::StandardizedSRI,
        IndexFamily::RefInvariantSymGE,
    ] {
        for scheme in SCHEMES {
            let req = IndexRequest::new(family, 2.0, scheme);
            let estimates = |d: &SurveyDataset| {
                [
                    taylor_se(d, &req).unwrap(),
                    brr_se(d, &cfg, &req).unwrap(),
                    rescaled_bootstrap_se(d, &cfg, &req).unwrap(),
                ]
            };
            for (a, b) in estimates(&d).iter().zip(&estimates(&scaled)) {
                assert!((a.point - b.point).abs() <= 1e-10, "{family}");
                assert!((a.se - b.se).abs() <= 1e-10, "{family} {:?}: {} vs {}", a.method, a.se, b.se);
            }
        }
    }
}

#[test]
fn equal_totals_give_equal_estimates() {
    // Two datasets, same per-group totals, different record layouts.
    let a = SurveyDataset::new(vec![
        SurveyRecord::new("1", "1", 2.0, "A", 1.0),
        SurveyRecord::new("1", "1", 2.0, "B", 0.5),
        SurveyRecord::new("1", "2", 1.0, "B", 1.0),
    ])
    .unwrap();
    let b = SurveyDataset::new(vec![
        SurveyRecord::new("9", "x", 1.0, "A", 2.0),
        SurveyRecord::new("9", "x", 1.0, "A", 0.0),
        SurveyRecord::new("9", "y", 3.0, "B", 2.0 / 3.0),
    ])
    .unwrap();
    assert_eq!(compute_sufficient_stats(&a), compute_sufficient_stats(&b));
    for family in IndexFamily::ALL {
        let req = IndexRequest::new(family, 0.7, WeightingScheme::PopulationWeighted);
        assert_eq!(index_of(&a, &req), index_of(&b, &req));
    }
}

#[test]
fn replication_is_deterministic() {
    let d = race_ethnicity_design(5, 3, 1).generate();
    let req = IndexRequest::new(IndexFamily::StandardizedSRI, 2.0, WeightingScheme::EquallyWeighted);
    let cfg = ReplicationConfig { n_reps: 200, ..ReplicationConfig::with_seed(99) };
    assert_eq!(
        rescaled_bootstrap_se(&d, &cfg, &req).unwrap(),
        rescaled_bootstrap_se(&d, &cfg, &req).unwrap()
    );
    assert_eq!(null_simulation(&d, &cfg, &req).unwrap(), null_simulation(&d, &cfg, &req).unwrap());
    let other = ReplicationConfig { seed: 100, ..cfg };
    assert_ne!(null_simulation(&d, &cfg, &req).unwrap(), null_simulation(&d, &other, &req).unwrap());
}

#[test]
fn null_distribution_separates_from_high_disparity() {
    let d = Design {
        strata: 10,
        psus_per_stratum: 2,
        persons_per_psu: 150,
        shares: vec![0.4, 0.3, 0.2, 0.1],
        prevalences: vec![0.05, 0.15, 0.25, 0.4],
        cluster_effect: 0.2,
        seed: 21,
    }
    .generate();
    let cfg = ReplicationConfig { n_reps: 500, ..ReplicationConfig::with_seed(4) };
    let req = IndexRequest::new(IndexFamily::StandardizedSRI, 1.0, WeightingScheme::PopulationWeighted);
    let observed = rescaled_bootstrap_se(&d, &cfg, &req).unwrap().replicates.unwrap();
    let null = null_simulation(&d, &cfg, &req).unwrap();
    assert!(distribution_overlap(&observed, &null) < 0.05);
    let null_mean = null.iter().sum::<f64>() / null.len() as f64;
    assert!(null_mean > 0.0 && null_mean < 0.02, "{null_mean}");
}

#[test]
fn singleton_strata_need_opt_in() {
    let mut recs = race_ethnicity_design(3, 2, 6).generate().records().to_vec();
    recs.retain(|r| !(r.stratum == "s01" && r.psu == "p1"));
    let d = SurveyDataset::new(recs).unwrap();
    let req = IndexRequest::new(IndexFamily::SymmetrizedRenyi, 1.0, WeightingScheme::PopulationWeighted);
    assert!(taylor_se(&d, &req).is_err());
    let collapsed = d.collapse_singleton_strata().unwrap();
    assert_eq!(collapsed.n_strata(), 2);
    let est = taylor_se(&collapsed, &req).unwrap();
    assert!(est.se > 0.0);
}
