use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Starting value of the smoothing parameter `γ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gamma0<T> {
    /// `(0.1)^d · λ_max` of the kernel matrix at the initialization.
    Auto,
    Explicit(T),
}

/// Starting point of the iteration.
#[derive(Clone, Debug, PartialEq)]
pub enum Init<T: Scalar> {
    /// Observed entries, zeros elsewhere.
    ZeroFill,
    /// The given matrix with observed entries overwritten.
    Given(DMatrix<T>),
}

/// How the weight matrix `(K + γI)^{-q}` is formed each iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightRoute {
    /// `Feature` when `N < s` and the lift fits the budget, else `Kernel`.
    Auto,
    /// Eigendecomposition of the `s x s` kernel matrix.
    Kernel,
    /// Eigendecomposition of the `N x N` matrix `φ̃ φ̃^T`, whose nonzero
    /// spectrum equals that of `K`; null directions of `K` get weight
    /// `γ^{-q}`.
    Feature,
}

/// Knobs of the kernelized IRLS iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IrlsConfigOf<T: Scalar> {
    /// Kernel degree, at least 1. `d = 1` is plain low-rank completion.
    pub d: usize,
    /// Schatten exponent in `(0, 1]`.
    pub p: T,
    pub gamma0: Gamma0<T>,
    /// Per-iteration decay factor of `γ`, greater than 1.
    pub eta: T,
    /// `γ` never drops below `gamma_floor_rel · γ0`.
    pub gamma_floor_rel: T,
    pub max_iter: usize,
    /// Stop once the relative change of the unobserved entries drops below
    /// this.
    pub tol: T,
    pub init: Init<T>,
    pub route: WeightRoute,
    /// Keep a per-iteration [`TraceRecord`](super::TraceRecord).
    pub record_trace: bool,
}

impl<T: Scalar> Default for IrlsConfigOf<T> {
    fn default() -> Self {
        Self {
            d: 2,
            p: lit(0.5),
            gamma0: Gamma0::Auto,
            eta: lit(1.01),
            gamma_floor_rel: lit(1e-14),
            max_iter: 5000,
            tol: lit(1e-6),
            init: Init::ZeroFill,
            route: WeightRoute::Auto,
            record_trace: false,
        }
    }
}

impl<T: Scalar> IrlsConfigOf<T> {
    /// Variety completion at degree `d` with the remaining defaults.
    pub fn vmc(d: usize) -> Self {
        Self {
            d,
            ..Self::default()
        }
    }

    /// Linear-kernel completion: `p = 1` is nuclear-norm minimization,
    /// `p = 1/2` the non-convex Schatten-1/2 variant.
    pub fn lrmc(p: T) -> Self {
        Self {
            d: 1,
            p,
            ..Self::default()
        }
    }

    /// `q = 1 - p/2`, the negative power applied to the kernel matrix.
    pub fn q(&self) -> T {
        T::one() - self.p * lit(0.5)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        if self.d == 0 {
            return bad("kernel degree must be at least 1".into());
        }
        if !(self.p > T::zero() && self.p <= T::one()) {
            return bad(format!("p must lie in (0, 1], got {:e}", self.p));
        }
        if !(self.eta > T::one()) || !self.eta.finite() {
            return bad(format!("eta must exceed 1, got {:e}", self.eta));
        }
        if !(self.tol > T::zero()) {
            return bad(format!("tol must be positive, got {:e}", self.tol));
        }
        if !(self.gamma_floor_rel >= T::zero() && self.gamma_floor_rel < T::one()) {
            return bad(format!(
                "gamma_floor_rel must lie in [0, 1), got {:e}",
                self.gamma_floor_rel
            ));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if let Gamma0::Explicit(g) = self.gamma0 {
            if !(g > T::zero()) || !g.finite() {
                return bad(format!("gamma0 must be positive, got {g:e}"));
            }
        }
        Ok(())
    }
}
