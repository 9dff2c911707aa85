use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),

    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error(
        "lift too large: {rows}x{cols} = {entries} entries exceeds the budget of {budget}, use the kernel path"
    )]
    LiftTooLarge {
        rows: usize,
        cols: usize,
        entries: u128,
        budget: usize,
    },

    #[error("eigendecomposition of a {size}x{size} matrix failed: {detail}")]
    Eigen { size: usize, detail: String },

    #[error("solver diverged at iteration {iteration}: non-finite entries")]
    Divergence { iteration: usize },
}

impl Error {
    /// True for failures of the numerical routines themselves, as opposed to
    /// bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Eigen { .. } | Error::Divergence { .. } | Error::Overflow(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
