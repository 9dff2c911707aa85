//! Kernelized IRLS completion and completion-quality metrics.

mod config;
mod irls;
mod metrics;
mod weights;

pub use config::{Gamma0, Init, IrlsConfigOf, WeightRoute};
pub use irls::{
    initialize, irls_step, lrmc_complete, lrmc_complete_with, step_direction, vmc_complete,
    SolveResultOf, TraceRecord,
};
pub use metrics::{column_errors, column_success_rate, completion_error, COLUMN_SUCCESS_THRESHOLD};
pub use weights::weight_matrix;
