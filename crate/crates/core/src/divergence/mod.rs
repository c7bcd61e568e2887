//! Divergences between mass functions and the between-group indices built on them.

mod families;
mod grouped;
mod mass;

pub use families::{
    alpha_divergence, atkinson_index, beta_divergence, exp_standardize, kl_divergences, ref_invariant_sym_ge,
    renyi_divergence, standardized_sri, symmetric_aversion, symmetrized_beta, symmetrized_ge,
    symmetrized_renyi,
};
pub(crate) use grouped::BaseIndex;
pub use grouped::{
    between_group_index, closed_form_renyi, closed_form_sri, GroupedSummary, IndexFamily, IndexRequest,
    ReferenceSpec, WeightingScheme,
};
pub use mass::MassFunction;
