//! Reference-invariant health disparity indices.
//!
//! * [`divergence`]: the generalized Rényi (alpha–gamma) divergence and its
//!   competitors (alpha/GE, beta), their symmetrized and standardized forms,
//!   and the between-group closed forms in group sizes and means.
//! * [`survey`]: complex-survey microdata, sufficient statistics, Taylor
//!   linearization, balanced repeated replication, the Rao–Wu rescaled
//!   bootstrap and a "no disparities" null simulation.
//! * [`scenario`]: what-if sweeps over group rates and the aversion parameter.

pub mod divergence;
mod error;
pub mod numeric;
pub mod scenario;
pub mod survey;

pub use divergence::{
    between_group_index, GroupedSummary, IndexFamily, IndexRequest, MassFunction, ReferenceSpec,
    WeightingScheme,
};
pub use error::{Error, Result};
