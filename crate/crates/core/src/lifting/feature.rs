//! Explicit monomial lifts `φ_d(X)` and `φ̃_d(X)`.

use nalgebra::DMatrix;

use super::monomial::{feature_dimension, MonomialBasis};
use crate::data::DataMatrixOf;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Largest lift, in entries `N·s`, that may be materialized.
pub const LIFT_BUDGET: usize = 10_000_000;

fn check_budget(n_features: usize, s: usize, budget: usize) -> Result<()> {
    let entries = n_features as u128 * s as u128;
    if entries > budget as u128 {
        return Err(Error::LiftTooLarge {
            rows: n_features,
            cols: s,
            entries,
            budget,
        });
    }
    Ok(())
}

/// Fills row `i` of the lift from its parent row. Rows follow `basis` order.
pub(crate) fn lift_into<T: Scalar>(basis: &MonomialBasis, x: &DMatrix<T>, out: &mut DMatrix<T>) {
    let s = x.ncols();
    out.row_mut(0).fill(T::one());
    for (i, parent) in basis.parents().iter().enumerate().skip(1) {
        let (p, var) = parent.expect("non-constant monomial has a parent");
        for j in 0..s {
            out[(i, j)] = out[(p, j)] * x[(var, j)];
        }
    }
}

/// `φ_d(X)`: the `N x s` matrix with entry `x_j^α` at row `α`, column `j`.
pub fn lift<T: Scalar>(x: &DataMatrixOf<T>, d: usize) -> Result<DMatrix<T>> {
    lift_with_budget(x, d, LIFT_BUDGET)
}

pub fn lift_with_budget<T: Scalar>(x: &DataMatrixOf<T>, d: usize, budget: usize) -> Result<DMatrix<T>> {
    let n_features = feature_dimension(x.nrows(), d)?;
    check_budget(n_features, x.ncols(), budget)?;
    let basis = MonomialBasis::new(x.nrows(), d)?;
    let mut out = DMatrix::zeros(n_features, x.ncols());
    lift_into(&basis, x.as_matrix(), &mut out);
    Ok(out)
}

/// `sqrt(c_α)` for every basis entry; see [`MonomialBasis::multinomial_weight`].
pub fn feature_weights<T: Scalar>(basis: &MonomialBasis) -> Result<Vec<T>> {
    basis
        .iter()
        .map(|a| Ok(lit::<T>(basis.multinomial_weight(a)? as f64).sqrt()))
        .collect()
}

/// `φ̃_d(X)`: the lift with row `α` scaled by `sqrt(c_α)`, so that
/// `φ̃_d(X)^T φ̃_d(Y) = (X^T Y + 1)^{⊙d}`.
pub fn weighted_lift<T: Scalar>(x: &DataMatrixOf<T>, d: usize) -> Result<DMatrix<T>> {
    weighted_lift_with_budget(x, d, LIFT_BUDGET)
}

pub fn weighted_lift_with_budget<T: Scalar>(
    x: &DataMatrixOf<T>,
    d: usize,
    budget: usize,
) -> Result<DMatrix<T>> {
    let n_features = feature_dimension(x.nrows(), d)?;
    check_budget(n_features, x.ncols(), budget)?;
    let basis = MonomialBasis::new(x.nrows(), d)?;
    let weights = feature_weights::<T>(&basis)?;
    let mut out = DMatrix::zeros(n_features, x.ncols());
    weighted_lift_into(&basis, &weights, x.as_matrix(), &mut out);
    Ok(out)
}

pub(crate) fn weighted_lift_into<T: Scalar>(
    basis: &MonomialBasis,
    weights: &[T],
    x: &DMatrix<T>,
    out: &mut DMatrix<T>,
) {
    lift_into(basis, x, out);
    for (i, &w) in weights.iter().enumerate() {
        out.row_mut(i).scale_mut(w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(n: usize, s: usize, v: &[f64]) -> DataMatrixOf<f64> {
        DataMatrixOf::new(DMatrix::from_column_slice(n, s, v)).unwrap()
    }

    #[test]
    fn lift_examples() {
        let x = data(2, 1, &[3.0, 5.0]);
        let l = lift(&x, 2).unwrap();
        assert_eq!(l.as_slice(), &[1.0, 3.0, 5.0, 9.0, 15.0, 25.0]);

        let z = data(3, 1, &[0.0; 3]);
        let l = lift(&z, 3).unwrap();
        assert_eq!(l[0], 1.0);
        assert!(l.iter().skip(1).all(|&v| v == 0.0));

        let x = data(1, 1, &[2.0]);
        assert_eq!(lift(&x, 3).unwrap().as_slice(), &[1.0, 2.0, 4.0, 8.0]);
    }

    #[test]
    fn lift_degree_one_prepends_ones() {
        let x = data(3, 2, &[1.0, -2.0, 0.5, 4.0, 0.0, 7.0]);
        let l = lift(&x, 1).unwrap();
        assert_eq!(l.nrows(), 4);
        assert!(l.row(0).iter().all(|&v| v == 1.0));
        assert_eq!(l.rows(1, 3), *x.as_matrix());
    }

    #[test]
    fn lift_matches_direct_monomial_evaluation() {
        let x = data(3, 2, &[0.3, -1.2, 2.0, 1.5, 0.7, -0.4]);
        let basis = MonomialBasis::new(3, 3).unwrap();
        let l = lift(&x, 3).unwrap();
        for (i, a) in basis.iter().enumerate() {
            for j in 0..2 {
                let col: Vec<f64> = x.as_matrix().column(j).iter().copied().collect();
                let want = a.eval(&col);
                assert!((l[(i, j)] - want).abs() <= 1e-14 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn weighted_lift_examples() {
        let a = 1.7;
        let x = data(1, 1, &[a]);
        let w = weighted_lift(&x, 2).unwrap();
        let want = [1.0, 2f64.sqrt() * a, a * a];
        for (g, e) in w.iter().zip(want) {
            assert!((g - e).abs() < 1e-14);
        }
        let self_ip = w.dot(&w);
        assert!((self_ip - (a * a + 1.0).powi(2)).abs() < 1e-12);

        let z = data(2, 1, &[0.0, 0.0]);
        let w = weighted_lift(&z, 2).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        // x1 x2 sits at position 4 of the (2, 2) basis with weight sqrt(2)
        let x = data(2, 1, &[1.0, 1.0]);
        let w = weighted_lift(&x, 2).unwrap();
        assert!((w[4] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn budget_enforced() {
        let x = data(2, 3, &[1.0; 6]);
        let err = lift_with_budget(&x, 2, 17).unwrap_err();
        assert!(matches!(err, Error::LiftTooLarge { entries: 18, .. }));
        assert!(lift_with_budget(&x, 2, 18).is_ok());
        assert!(weighted_lift_with_budget(&x, 2, 10).is_err());
    }
}
