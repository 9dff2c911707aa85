//! Monomial feature maps, polynomial kernels, and lifted-rank estimation.
//!
//! Rows of every lift follow the graded-lexicographic order of
//! [`MonomialBasis`]. Materializing a lift is limited to [`LIFT_BUDGET`]
//! entries; larger problems go through [`kernel_matrix`] only.

mod feature;
mod kernel;
mod monomial;
mod rank;

pub use feature::{
    feature_weights, lift, lift_with_budget, weighted_lift, weighted_lift_with_budget, LIFT_BUDGET,
};
pub use kernel::kernel_matrix;
pub use monomial::{binomial, feature_dimension, monomial_basis, MonomialBasis, MultiIndex};
pub use rank::{count_above, lifted_rank, lifted_rank_default, RankReportOf, DEFAULT_REL_TOL};

pub(crate) use feature::weighted_lift_into;
pub(crate) use kernel::{entrywise_pow, gram_plus_one};
