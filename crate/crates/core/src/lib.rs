//! Completion of partially observed matrices whose columns lie on an algebraic
//! variety.
//!
//! Columns are lifted to the vector of all monomials of degree at most `d`;
//! data on a variety becomes low-rank after lifting even when the raw matrix is
//! full rank. The solver minimizes a Schatten-p surrogate of the lifted rank
//! with a kernelized iteratively reweighted least squares scheme, so the lift
//! is never needed explicitly.
//!
//! Modules:
//! - [`lifting`]: monomial bases, feature maps, polynomial kernels, numerical rank.
//! - [`sampling`]: rank bounds for unions of subspaces and minimal sampling rates.
//! - [`synth`]: seeded generators for variety data and observation masks.
//! - [`solver`]: kernelized IRLS and completion metrics.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root pin the `f64` instantiation used by the CLI and harness.

pub mod data;
pub mod error;
pub mod lifting;
mod linalg;
pub mod sampling;
pub mod scalar;
pub mod solver;
pub mod synth;

pub use data::{DataMatrixOf, ObservationMask, ObservedMatrixOf};
pub use error::{Error, Result};
pub use lifting::{MonomialBasis, MultiIndex, RankReportOf};
pub use sampling::SamplingBound;
pub use scalar::Scalar;
pub use solver::{IrlsConfigOf, SolveResultOf};

/// Double-precision data matrix (n rows, one column per data point).
pub type DataMatrix = DataMatrixOf<f64>;
/// Single-precision data matrix.
pub type DataMatrix32 = DataMatrixOf<f32>;
/// Partially observed double-precision matrix.
pub type ObservedMatrix = ObservedMatrixOf<f64>;
/// Partially observed single-precision matrix.
pub type ObservedMatrix32 = ObservedMatrixOf<f32>;
pub type RankReport = RankReportOf<f64>;
pub type IrlsConfig = IrlsConfigOf<f64>;
pub type IrlsConfig32 = IrlsConfigOf<f32>;
pub type SolveResult = SolveResultOf<f64>;
pub type SolveResult32 = SolveResultOf<f32>;
