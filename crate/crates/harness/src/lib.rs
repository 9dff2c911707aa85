//! Experiment drivers, CSV/JSON plumbing and the `vmc` command line for
//! variety-based matrix completion.
//!
//! Phase-transition grids ([`run_phase_uos`], [`run_phase_parametric`]) carry
//! a [`Manifest`] from which [`rerun_from_manifest`] regenerates every number
//! bitwise at the recorded thread count.

pub mod bench;
pub mod config;
pub mod error;
pub mod io;
pub mod phase;

pub use bench::{run_bench, BenchReport, BenchRow};
pub use config::{ExperimentConfig, ExperimentKind, Method};
pub use error::{HarnessError, Result};
pub use io::{load_mask_csv, load_matrix_csv, save_mask_csv, save_matrix_csv, save_observed_csv};
pub use phase::{rerun_from_manifest, run_phase_parametric, run_phase_uos, Manifest, PhaseCell, PhaseGrid};
