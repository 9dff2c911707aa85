//! Dense symmetric eigendecomposition shared by the rank estimator and solver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigenpairs of a symmetric matrix, eigenvalues sorted non-increasing.
pub(crate) struct SortedEigen<T: Scalar> {
    pub values: DVector<T>,
    pub vectors: DMatrix<T>,
}

fn check_finite<T: Scalar>(m: &DMatrix<T>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].finite() {
                return Err(Error::Eigen {
                    size: m.nrows(),
                    detail: format!("non-finite entry at ({i}, {j})"),
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn symmetric_eigen<T: Scalar>(m: DMatrix<T>) -> Result<SortedEigen<T>> {
    let size = m.nrows();
    if size != m.ncols() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    check_finite(&m)?;
    let max_sweeps = 100 * size + 100;
    let eig = SymmetricEigen::try_new(m, T::default_epsilon(), max_sweeps).ok_or_else(|| {
        Error::Eigen {
            size,
            detail: format!("QR iteration did not converge within {max_sweeps} sweeps"),
        }
    })?;

    let mut order: Vec<usize> = (0..size).collect();
    // total order; finiteness checked above
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = DVector::from_iterator(size, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(size, size);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SortedEigen { values, vectors })
}

/// Symmetrizes in place: `m <- (m + m^T) / 2`.
pub(crate) fn symmetrize<T: Scalar>(m: &mut DMatrix<T>) {
    let n = m.nrows();
    let half = crate::scalar::lit::<T>(0.5);
    for j in 0..n {
        for i in (j + 1)..n {
            let v = (m[(i, j)] + m[(j, i)]) * half;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}
