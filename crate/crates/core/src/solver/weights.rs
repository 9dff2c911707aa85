//! The IRLS weight matrix `W = V (S + γI)^{-q} V^T`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lifting::{entrywise_pow, weighted_lift_into, MonomialBasis};
use crate::linalg::{symmetric_eigen, symmetrize};
use crate::scalar::{lit, Scalar};

/// Leading eigenpairs of an `s x s` kernel matrix; eigenvalues past
/// `values.len()` are zero.
pub(crate) struct Spectrum<T: Scalar> {
    /// Clamped at zero, non-increasing.
    pub values: DVector<T>,
    /// `s x values.len()`, orthonormal columns.
    pub vectors: DMatrix<T>,
    pub s: usize,
}

impl<T: Scalar> Spectrum<T> {
    pub fn lambda_max(&self) -> T {
        if self.values.is_empty() {
            T::zero()
        } else {
            self.values[0]
        }
    }

    /// `Σ_i (λ_i + γ)^{p/2}` over all `s` eigenvalues.
    pub fn surrogate(&self, gamma: T, p: T) -> T {
        let e = p * lit(0.5);
        let kept = self
            .values
            .iter()
            .fold(T::zero(), |acc, &v| acc + (v + gamma).powf(e));
        let null = T::from_usize(self.s - self.values.len()).unwrap_or_else(T::zero);
        kept + null * gamma.powf(e)
    }

    /// `(K + γI)^{-q}` from the stored eigenpairs.
    pub fn weights(&self, gamma: T, q: T) -> DMatrix<T> {
        let r = self.values.len();
        let mut w = if r == self.s {
            let scaled = self.scaled_vectors(|v| (v + gamma).powf(-q));
            scaled * self.vectors.transpose()
        } else {
            let base = gamma.powf(-q);
            let scaled = self.scaled_vectors(|v| (v + gamma).powf(-q) - base);
            let mut w = scaled * self.vectors.transpose();
            for i in 0..self.s {
                w[(i, i)] += base;
            }
            w
        };
        symmetrize(&mut w);
        w
    }

    fn scaled_vectors(&self, f: impl Fn(T) -> T) -> DMatrix<T> {
        let mut out = self.vectors.clone();
        for (j, mut col) in out.column_iter_mut().enumerate() {
            col.scale_mut(f(self.values[j]));
        }
        out
    }
}

pub(crate) fn kernel_spectrum<T: Scalar>(k: DMatrix<T>) -> Result<Spectrum<T>> {
    let s = k.nrows();
    let eig = symmetric_eigen(k)?;
    Ok(Spectrum {
        values: eig.values.map(|v| v.max(T::zero())),
        vectors: eig.vectors,
        s,
    })
}

/// Reusable buffers for the feature route.
pub(crate) struct FeatureWorkspace<T: Scalar> {
    basis: MonomialBasis,
    weights: Vec<T>,
    lifted: DMatrix<T>,
}

impl<T: Scalar> FeatureWorkspace<T> {
    pub fn new(n: usize, s: usize, d: usize) -> Result<Self> {
        let basis = MonomialBasis::new(n, d)?;
        let weights = crate::lifting::feature_weights(&basis)?;
        let lifted = DMatrix::zeros(basis.len(), s);
        Ok(Self {
            basis,
            weights,
            lifted,
        })
    }

    /// Spectrum of `k_d(X, X) = φ̃^T φ̃` from the thin QR `φ̃^T = Q R`:
    /// `K = Q (R R^T) Q^T`, so the eigenvectors are `Q U` for `R R^T = U S U^T`
    /// and stay orthonormal to working precision.
    pub fn spectrum(&mut self, x: &DMatrix<T>) -> Result<Spectrum<T>> {
        weighted_lift_into(&self.basis, &self.weights, x, &mut self.lifted);
        let s = self.lifted.ncols();
        let qr = self.lifted.transpose().qr();
        let r = qr.r();
        let eig = symmetric_eigen(&r * r.transpose())?;
        Ok(Spectrum {
            values: eig.values.map(|v| v.max(T::zero())),
            vectors: qr.q() * eig.vectors,
            s,
        })
    }
}

/// `W = V (S + γI)^{-q} V^T` where `K = V S V^T`, with eigenvalues clamped
/// at zero.
pub fn weight_matrix<T: Scalar>(k: &DMatrix<T>, gamma: T, q: T) -> Result<DMatrix<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma:e}")));
    }
    Ok(kernel_spectrum(k.clone())?.weights(gamma, q))
}

/// `W ⊙ k_{d-1}(X, X)` given the precomputed `G = X^T X + 1`.
pub(crate) fn hadamard_with_kernel<T: Scalar>(mut w: DMatrix<T>, g: &DMatrix<T>, d: usize) -> DMatrix<T> {
    match d {
        0 | 1 => w,
        2 => {
            w.component_mul_assign(g);
            w
        }
        _ => {
            w.component_mul_assign(&entrywise_pow(g, d - 1));
            w
        }
    }
}
