//! Complex-survey microdata and design-based standard errors.
//!
//! Indices depend on the sample only through the weighted group totals
//! `(U0_j, U1_j)`, so replicates are evaluated from per-PSU cell totals.

mod dataset;
mod hadamard;
mod linearization;
mod null;
mod stats;
mod variance;

pub use dataset::{SurveyDataset, SurveyRecord};
pub use hadamard::{default_order as default_hadamard_order, hadamard, Hadamard};
pub use linearization::{group_partials, linearization_scores, GroupPartials};
pub use null::{distribution_overlap, null_simulation};
pub use stats::{compute_sufficient_stats, SufficientStats};
pub use variance::{
    brr_se, estimate_variance, rescaled_bootstrap_se, taylor_se, ReplicationConfig, VarianceEstimate,
    VarianceMethod,
};
