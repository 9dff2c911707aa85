//! Numerical rank of the lifted matrix via the kernel eigenvalues.

use super::kernel::raw_kernel;
use super::monomial::feature_dimension;
use crate::data::DataMatrixOf;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::scalar::{lit, Scalar};

/// Relative eigenvalue cutoff used when none is given.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// Spectrum of `k_d(X, X)` and the numerical rank of `φ_d(X)` read off it.
#[derive(Clone, Debug, PartialEq)]
pub struct RankReportOf<T: Scalar> {
    /// Kernel eigenvalues, clamped at zero, non-increasing.
    pub eigenvalues: Vec<T>,
    /// Number of eigenvalues above `rel_tol · λ_max`.
    pub numerical_rank: usize,
    pub rel_tol: T,
    /// Smallest eigenvalue before clamping.
    pub min_raw_eigenvalue: T,
    /// Feature dimension `N = C(n+d, d)`.
    pub feature_dim: usize,
    /// Number of columns `s`.
    pub s: usize,
}

impl<T: Scalar> RankReportOf<T> {
    pub fn lambda_max(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }
}

/// Counts eigenvalues strictly above `rel_tol · max`; zero when the maximum
/// is not positive.
pub fn count_above<T: Scalar>(sorted_desc: &[T], rel_tol: T) -> usize {
    let Some(&top) = sorted_desc.first() else {
        return 0;
    };
    if top <= T::zero() {
        return 0;
    }
    let cut = rel_tol * top;
    sorted_desc.iter().take_while(|&&v| v > cut).count()
}

/// Numerical rank of `φ_d(X)` computed from the eigenvalues of the `s x s`
/// kernel matrix; the `N x s` lift is never formed.
pub fn lifted_rank<T: Scalar>(x: &DataMatrixOf<T>, d: usize, rel_tol: T) -> Result<RankReportOf<T>> {
    if !(rel_tol > T::zero() && rel_tol < T::one()) {
        return Err(Error::Domain(format!(
            "rel_tol must lie in (0, 1), got {rel_tol:e}"
        )));
    }
    let feature_dim = feature_dimension(x.nrows(), d)?;
    let k = raw_kernel(x.as_matrix(), x.as_matrix(), d);
    let eig = symmetric_eigen(k)?;
    let s = x.ncols();
    let min_raw_eigenvalue = eig.values[s - 1];
    let eigenvalues: Vec<T> = eig.values.iter().map(|&v| v.max(T::zero())).collect();
    let numerical_rank = count_above(&eigenvalues, rel_tol).min(feature_dim.min(s));
    Ok(RankReportOf {
        eigenvalues,
        numerical_rank,
        rel_tol,
        min_raw_eigenvalue,
        feature_dim,
        s,
    })
}

/// [`lifted_rank`] at the default tolerance.
pub fn lifted_rank_default<T: Scalar>(x: &DataMatrixOf<T>, d: usize) -> Result<RankReportOf<T>> {
    lifted_rank(x, d, lit(DEFAULT_REL_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn count_above_edges() {
        assert_eq!(count_above::<f64>(&[], 0.1), 0);
        assert_eq!(count_above(&[0.0, 0.0], 0.1), 0);
        assert_eq!(count_above(&[10.0, 2.0, 1.0, 0.5], 0.1), 2);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let x = DataMatrixOf::new(DMatrix::from_element(2, 2, 1.0)).unwrap();
        assert!(lifted_rank(&x, 2, 0.0).is_err());
        assert!(lifted_rank(&x, 2, 1.0).is_err());
    }

    #[test]
    fn repeated_column_has_rank_one() {
        let x = DataMatrixOf::new(DMatrix::from_fn(3, 5, |i, _| i as f64 + 0.5)).unwrap();
        let r = lifted_rank_default(&x, 3).unwrap();
        assert_eq!(r.numerical_rank, 1);
        assert_eq!(r.feature_dim, 20);
        assert!(r.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert!(r.eigenvalues.iter().all(|&v| v >= 0.0));
    }
}
