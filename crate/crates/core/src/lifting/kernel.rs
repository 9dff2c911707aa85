//! Inhomogeneous polynomial kernel `k_d(x, y) = (x^T y + 1)^d`.

use nalgebra::DMatrix;

use crate::data::DataMatrixOf;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `X^T Y + 1` for raw matrices with matching row counts.
pub(crate) fn gram_plus_one<T: Scalar>(x: &DMatrix<T>, y: &DMatrix<T>) -> DMatrix<T> {
    let mut g = x.tr_mul(y);
    g.add_scalar_mut(T::one());
    g
}

pub(crate) fn entrywise_pow<T: Scalar>(g: &DMatrix<T>, d: usize) -> DMatrix<T> {
    match d {
        0 => DMatrix::from_element(g.nrows(), g.ncols(), T::one()),
        1 => g.clone(),
        _ => g.map(|v| v.powi(d as i32)),
    }
}

/// `k_d(X, Y) = (X^T Y + 1)^{⊙d}`, an `s x t` matrix.
pub fn kernel_matrix<T: Scalar>(x: &DataMatrixOf<T>, y: &DataMatrixOf<T>, d: usize) -> Result<DMatrix<T>> {
    if x.nrows() != y.nrows() {
        return Err(Error::Dimension(format!(
            "kernel arguments have ambient dimensions {} and {}",
            x.nrows(),
            y.nrows()
        )));
    }
    Ok(raw_kernel(x.as_matrix(), y.as_matrix(), d))
}

pub(crate) fn raw_kernel<T: Scalar>(x: &DMatrix<T>, y: &DMatrix<T>, d: usize) -> DMatrix<T> {
    entrywise_pow(&gram_plus_one(x, y), d)
}
