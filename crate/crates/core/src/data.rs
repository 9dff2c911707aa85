//! Data matrices, observation masks, and partially observed matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An `n x s` real matrix with one data point per column.
///
/// Construction guarantees `n >= 1`, `s >= 1` and finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrixOf<T: Scalar> {
    inner: DMatrix<T>,
}

impl<T: Scalar> DataMatrixOf<T> {
    pub fn new(inner: DMatrix<T>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::Dimension(format!(
                "data matrix must be at least 1x1, got {}x{}",
                inner.nrows(),
                inner.ncols()
            )));
        }
        for j in 0..inner.ncols() {
            for i in 0..inner.nrows() {
                if !inner[(i, j)].finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { inner })
    }

    /// Builds from column-major data.
    pub fn from_column_slice(nrows: usize, ncols: usize, data: &[T]) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::Dimension(format!(
                "{} values cannot fill a {nrows}x{ncols} matrix",
                data.len()
            )));
        }
        Self::new(DMatrix::from_column_slice(nrows, ncols, data))
    }

    pub fn nrows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.inner
    }

    pub fn into_inner(self) -> DMatrix<T> {
        self.inner
    }

    /// Converts every entry to another scalar type.
    pub fn cast<U: Scalar>(&self) -> DataMatrixOf<U> {
        DataMatrixOf {
            inner: self
                .inner
                .map(|v| nalgebra::convert::<f64, U>(crate::scalar::to_f64(v))),
        }
    }
}

/// The set of revealed `(row, column)` positions of an `n x s` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationMask {
    nrows: usize,
    ncols: usize,
    // column-major membership flags
    revealed: Vec<bool>,
    count: usize,
}

impl ObservationMask {
    pub fn empty(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            revealed: vec![false; nrows * ncols],
            count: 0,
        }
    }

    pub fn full(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            revealed: vec![true; nrows * ncols],
            count: nrows * ncols,
        }
    }

    /// Builds a mask from 0-indexed `(row, col)` pairs. Out-of-range or
    /// repeated pairs are rejected.
    pub fn from_pairs<I>(nrows: usize, ncols: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut mask = Self::empty(nrows, ncols);
        for (i, j) in pairs {
            if i >= nrows || j >= ncols {
                return Err(Error::Domain(format!(
                    "observation ({i}, {j}) outside a {nrows}x{ncols} matrix"
                )));
            }
            let slot = &mut mask.revealed[j * nrows + i];
            if *slot {
                return Err(Error::Domain(format!("duplicate observation ({i}, {j})")));
            }
            *slot = true;
            mask.count += 1;
        }
        Ok(mask)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    /// Number of revealed entries, `|Ω|`.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Number of hidden entries, `|Ω^c|`.
    pub fn hidden_len(&self) -> usize {
        self.nrows * self.ncols - self.count
    }

    #[inline]
    pub fn contains(&self, row: usize, col: usize) -> bool {
        row < self.nrows && col < self.ncols && self.revealed[col * self.nrows + row]
    }

    /// Revealed pairs in column-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.nrows;
        self.revealed
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(move |(idx, _)| (idx % n, idx / n))
    }

    pub fn column_count(&self, col: usize) -> usize {
        self.revealed[col * self.nrows..(col + 1) * self.nrows]
            .iter()
            .filter(|&&r| r)
            .count()
    }

    /// The per-column count `m` when every column reveals the same number of
    /// rows.
    pub fn per_column_count(&self) -> Option<usize> {
        let first = self.column_count(0);
        (1..self.ncols)
            .all(|j| self.column_count(j) == first)
            .then_some(first)
    }

    pub(crate) fn flags(&self) -> &[bool] {
        &self.revealed
    }
}

/// A matrix with some entries revealed and the rest explicitly missing.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservedMatrixOf<T: Scalar> {
    nrows: usize,
    ncols: usize,
    // column-major; None marks a missing entry
    values: Vec<Option<T>>,
    mask: ObservationMask,
}

impl<T: Scalar> ObservedMatrixOf<T> {
    /// Builds from column-major optional entries. Revealed entries must be
    /// finite.
    pub fn from_entries(nrows: usize, ncols: usize, values: Vec<Option<T>>) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(Error::Dimension(format!(
                "observed matrix must be at least 1x1, got {nrows}x{ncols}"
            )));
        }
        if values.len() != nrows * ncols {
            return Err(Error::Dimension(format!(
                "{} entries cannot fill a {nrows}x{ncols} matrix",
                values.len()
            )));
        }
        let mut mask = ObservationMask::empty(nrows, ncols);
        for (idx, v) in values.iter().enumerate() {
            if let Some(v) = v {
                if !v.finite() {
                    return Err(Error::NonFinite {
                        row: idx % nrows,
                        col: idx / nrows,
                    });
                }
                mask.revealed[idx] = true;
                mask.count += 1;
            }
        }
        Ok(Self {
            nrows,
            ncols,
            values,
            mask,
        })
    }

    /// Reveals the entries of `x` listed in `mask`; all others are missing.
    pub fn from_mask(x: &DataMatrixOf<T>, mask: &ObservationMask) -> Result<Self> {
        if mask.shape() != (x.nrows(), x.ncols()) {
            return Err(Error::Dimension(format!(
                "mask shape {}x{} does not match matrix shape {}x{}",
                mask.nrows(),
                mask.ncols(),
                x.nrows(),
                x.ncols()
            )));
        }
        let m = x.as_matrix();
        let values = mask
            .flags()
            .iter()
            .enumerate()
            .map(|(idx, &r)| r.then(|| m[(idx % x.nrows(), idx / x.nrows())]))
            .collect();
        Ok(Self {
            nrows: x.nrows(),
            ncols: x.ncols(),
            values,
            mask: mask.clone(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<T> {
        self.values[col * self.nrows + row]
    }

    pub fn mask(&self) -> &ObservationMask {
        &self.mask
    }

    /// Column-major entries, `None` where missing.
    pub fn entries(&self) -> &[Option<T>] {
        &self.values
    }

    /// `P_Ω(X)` with zeros in the missing positions.
    pub fn zero_filled(&self) -> DMatrix<T> {
        DMatrix::from_iterator(
            self.nrows,
            self.ncols,
            self.values.iter().map(|v| v.unwrap_or_else(T::zero)),
        )
    }

    /// Keeps only the entries listed in `mask`, each of which must already be
    /// revealed.
    pub fn restrict(&self, mask: &ObservationMask) -> Result<Self> {
        if mask.shape() != (self.nrows, self.ncols) {
            return Err(Error::Dimension(format!(
                "mask shape {}x{} does not match matrix shape {}x{}",
                mask.nrows(),
                mask.ncols(),
                self.nrows,
                self.ncols
            )));
        }
        let mut values = vec![None; self.values.len()];
        for (i, j) in mask.pairs() {
            let idx = j * self.nrows + i;
            match self.values[idx] {
                Some(v) => values[idx] = Some(v),
                None => {
                    return Err(Error::Domain(format!(
                        "mask reveals ({i}, {j}) but that entry is missing"
                    )))
                }
            }
        }
        Ok(Self {
            nrows: self.nrows,
            ncols: self.ncols,
            values,
            mask: mask.clone(),
        })
    }

    /// The complete matrix, if no entry is missing.
    pub fn to_complete(&self) -> Option<DataMatrixOf<T>> {
        let vals: Option<Vec<T>> = self.values.iter().copied().collect();
        vals.and_then(|v| DataMatrixOf::from_column_slice(self.nrows, self.ncols, &v).ok())
    }
}
