use crate::data::DataMatrixOf;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Default per-column success threshold on relative error.
pub const COLUMN_SUCCESS_THRESHOLD: f64 = 1e-5;

/// `‖X̂ - X0‖_F / ‖X0‖_F`.
pub fn completion_error<T: Scalar>(x_hat: &DataMatrixOf<T>, x0: &DataMatrixOf<T>) -> Result<T> {
    if x_hat.as_matrix().shape() != x0.as_matrix().shape() {
        return Err(Error::Dimension(format!(
            "estimate is {}x{}, ground truth is {}x{}",
            x_hat.nrows(),
            x_hat.ncols(),
            x0.nrows(),
            x0.ncols()
        )));
    }
    let den = x0.as_matrix().norm();
    if den == T::zero() {
        return Err(Error::Domain("ground truth has zero norm".into()));
    }
    Ok((x_hat.as_matrix() - x0.as_matrix()).norm() / den)
}

/// Relative error `‖x̂_j - x0_j‖ / ‖x0_j‖` of each column; `‖x̂_j‖` where the
/// ground-truth column is zero.
///
/// # Panics
/// If the shapes differ.
pub fn column_errors<T: Scalar>(x_hat: &DataMatrixOf<T>, x0: &DataMatrixOf<T>) -> Vec<T> {
    assert_eq!(
        x_hat.as_matrix().shape(),
        x0.as_matrix().shape(),
        "column_errors needs matching shapes"
    );
    x_hat
        .as_matrix()
        .column_iter()
        .zip(x0.as_matrix().column_iter())
        .map(|(a, b)| {
            let den = b.norm();
            if den == T::zero() {
                a.norm()
            } else {
                (a - b).norm() / den
            }
        })
        .collect()
}

/// Fraction of columns whose relative error is below `threshold`.
///
/// # Panics
/// If the shapes differ.
pub fn column_success_rate<T: Scalar>(x_hat: &DataMatrixOf<T>, x0: &DataMatrixOf<T>, threshold: T) -> T {
    let errs = column_errors(x_hat, x0);
    let ok = errs.iter().filter(|&&e| e < threshold).count();
    lit::<T>(ok as f64) / lit::<T>(errs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn truth() -> DataMatrixOf<f64> {
        DataMatrixOf::new(DMatrix::from_fn(4, 6, |i, j| 1.0 + i as f64 - 0.5 * j as f64)).unwrap()
    }

    #[test]
    fn completion_error_examples() {
        let x0 = truth();
        assert_eq!(completion_error(&x0, &x0).unwrap(), 0.0);
        let doubled = DataMatrixOf::new(x0.as_matrix() * 2.0).unwrap();
        assert!((completion_error(&doubled, &x0).unwrap() - 1.0).abs() < 1e-15);

        // E = 0.1 ‖X0‖_F · U with ‖U‖_F = 1
        let u = DMatrix::from_fn(4, 6, |i, j| ((i * 6 + j) as f64).cos());
        let e = &u / u.norm() * (0.1 * x0.as_matrix().norm());
        let perturbed = DataMatrixOf::new(x0.as_matrix() + e).unwrap();
        assert!((completion_error(&perturbed, &x0).unwrap() - 0.1).abs() < 1e-14);

        let zero = DataMatrixOf::new(DMatrix::zeros(4, 6)).unwrap();
        assert!(completion_error(&x0, &zero).is_err());
    }

    #[test]
    fn column_success_examples() {
        let x0 = truth();
        assert_eq!(column_success_rate(&x0, &x0, 1e-5), 1.0);

        let mut m = x0.as_matrix().clone();
        for j in 0..3 {
            let mut col = m.column_mut(j);
            col *= 1.01;
        }
        let half = DataMatrixOf::new(m).unwrap();
        assert_eq!(column_success_rate(&half, &x0, 1e-5), 0.5);
        assert_eq!(column_success_rate(&half, &x0, f64::INFINITY), 1.0);
    }

    #[test]
    fn zero_truth_column() {
        let x0 = DataMatrixOf::new(DMatrix::from_column_slice(2, 2, &[0.0, 0.0, 1.0, 1.0])).unwrap();
        let near = DataMatrixOf::new(DMatrix::from_column_slice(2, 2, &[1e-7, 0.0, 1.0, 1.0])).unwrap();
        let far = DataMatrixOf::new(DMatrix::from_column_slice(2, 2, &[1e-3, 0.0, 1.0, 1.0])).unwrap();
        assert_eq!(column_success_rate(&near, &x0, 1e-5), 1.0);
        assert_eq!(column_success_rate(&far, &x0, 1e-5), 0.5);
    }
}
