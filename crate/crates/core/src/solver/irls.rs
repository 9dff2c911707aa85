//! Kernelized IRLS for Schatten-p minimization of the lifted matrix.
//!
//! Each iteration forms `K = k_d(X, X)`, the weight `W = (K + γI)^{-q}` with
//! `q = 1 - p/2`, takes the step `X <- X(I - τ (W ⊙ k_{d-1}(X, X)))` with
//! `τ = γ^q`, restores the observed entries, and shrinks `γ` by `η`.
//!
//! The exact gradient of `tr[k_d(X, X) W]` is `2d · X(W ⊙ k_{d-1}(X, X))`;
//! the step drops the `2d`, which only rescales `τ`.

use nalgebra::DMatrix;

use super::config::{Gamma0, Init, IrlsConfigOf, WeightRoute};
use super::weights::{hadamard_with_kernel, kernel_spectrum, FeatureWorkspace, Spectrum};
use crate::data::{DataMatrixOf, ObservedMatrixOf};
use crate::error::{Error, Result};
use crate::lifting::{entrywise_pow, feature_dimension, gram_plus_one, LIFT_BUDGET};
use crate::scalar::{lit, Scalar};

/// One iteration of the solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord<T> {
    /// 1-based.
    pub iteration: usize,
    /// `γ` used in this iteration.
    pub gamma: T,
    /// `Σ_i (λ_i + γ)^{p/2}` at the iterate entering this iteration.
    pub objective: T,
    /// `‖ΔX‖_F / ‖X‖_F` over the unobserved entries.
    pub rel_change: T,
}

/// Output of [`vmc_complete`].
#[derive(Clone, Debug, PartialEq)]
pub struct SolveResultOf<T: Scalar> {
    /// Completed matrix; observed entries equal the input bitwise.
    pub x_hat: DataMatrixOf<T>,
    pub iterations: usize,
    pub converged: bool,
    pub gamma0: T,
    /// `γ` used in the last iteration.
    pub final_gamma: T,
    pub trace: Option<Vec<TraceRecord<T>>>,
}

/// Starting iterate: `P_Ω(X0)` over zeros, or over a given matrix.
pub fn initialize<T: Scalar>(observed: &ObservedMatrixOf<T>, init: &Init<T>) -> Result<DMatrix<T>> {
    match init {
        Init::ZeroFill => Ok(observed.zero_filled()),
        Init::Given(start) => {
            if start.shape() != (observed.nrows(), observed.ncols()) {
                return Err(Error::Dimension(format!(
                    "initial matrix is {}x{}, observations are {}x{}",
                    start.nrows(),
                    start.ncols(),
                    observed.nrows(),
                    observed.ncols()
                )));
            }
            let mut x = start.clone();
            restore_observed(&mut x, observed);
            Ok(x)
        }
    }
}

fn restore_observed<T: Scalar>(x: &mut DMatrix<T>, observed: &ObservedMatrixOf<T>) {
    for (slot, v) in x.as_mut_slice().iter_mut().zip(observed.entries()) {
        if let Some(v) = v {
            *slot = *v;
        }
    }
}

/// The step direction `X(W ⊙ k_{d-1}(X, X))`.
pub fn step_direction<T: Scalar>(x: &DMatrix<T>, w: &DMatrix<T>, d: usize) -> DMatrix<T> {
    let g = gram_plus_one(x, x);
    x * hadamard_with_kernel(w.clone(), &g, d)
}

/// One projected step `X(I - τA)` with `A = W ⊙ k_{d-1}(X, X)`, observed
/// entries restored. A non-finite result is reported as divergence at
/// iteration 0.
pub fn irls_step<T: Scalar>(
    x: &DMatrix<T>,
    observed: &ObservedMatrixOf<T>,
    w: &DMatrix<T>,
    tau: T,
    d: usize,
) -> Result<DMatrix<T>> {
    if x.shape() != (observed.nrows(), observed.ncols()) || w.shape() != (x.ncols(), x.ncols()) {
        return Err(Error::Dimension(format!(
            "step needs X {}x{} matching observations {}x{} and W s x s, got W {}x{}",
            x.nrows(),
            x.ncols(),
            observed.nrows(),
            observed.ncols(),
            w.nrows(),
            w.ncols()
        )));
    }
    if d == 0 {
        return Err(Error::Domain("kernel degree must be at least 1".into()));
    }
    let g = gram_plus_one(x, x);
    projected_step(x, observed, w.clone(), &g, tau, d).ok_or(Error::Divergence { iteration: 0 })
}

fn projected_step<T: Scalar>(
    x: &DMatrix<T>,
    observed: &ObservedMatrixOf<T>,
    w: DMatrix<T>,
    g: &DMatrix<T>,
    tau: T,
    d: usize,
) -> Option<DMatrix<T>> {
    let a = hadamard_with_kernel(w, g, d);
    let mut next = x * a;
    next *= -tau;
    next += x;
    restore_observed(&mut next, observed);
    next.iter().all(|v| v.finite()).then_some(next)
}

fn use_feature_route(route: WeightRoute, n: usize, s: usize, d: usize) -> bool {
    match route {
        WeightRoute::Kernel => false,
        WeightRoute::Feature => true,
        WeightRoute::Auto => match feature_dimension(n, d) {
            Ok(nf) => nf < s && nf.saturating_mul(s) <= LIFT_BUDGET,
            Err(_) => false,
        },
    }
}

/// Relative Frobenius change over the hidden entries.
fn hidden_change<T: Scalar>(prev: &DMatrix<T>, next: &DMatrix<T>, observed: &ObservedMatrixOf<T>) -> T {
    let mut num = T::zero();
    let mut den = T::zero();
    for ((a, b), o) in prev.iter().zip(next.iter()).zip(observed.entries()) {
        if o.is_none() {
            let diff = *b - *a;
            num += diff * diff;
            den += *a * *a;
        }
    }
    if num == T::zero() {
        T::zero()
    } else if den == T::zero() {
        T::max_value().unwrap_or_else(T::one)
    } else {
        (num / den).sqrt()
    }
}

/// Minimizes the smoothed Schatten-p quasi-norm of `φ_d(X)` subject to
/// agreement with the observed entries.
pub fn vmc_complete<T: Scalar>(
    observed: &ObservedMatrixOf<T>,
    config: &IrlsConfigOf<T>,
) -> Result<SolveResultOf<T>> {
    config.validate()?;
    if observed.mask().is_empty() && matches!(config.init, Init::ZeroFill) {
        return Err(Error::Domain(
            "no observed entries and no initial matrix".into(),
        ));
    }
    let (n, s) = (observed.nrows(), observed.ncols());
    let d = config.d;
    let q = config.q();
    let mut x = initialize(observed, &config.init)?;
    if !x.iter().all(|v| v.finite()) {
        return Err(Error::Domain("initial matrix has non-finite entries".into()));
    }
    let hidden = observed.mask().hidden_len();

    let mut workspace = if use_feature_route(config.route, n, s, d) {
        Some(FeatureWorkspace::new(n, s, d)?)
    } else {
        None
    };

    let mut gamma = T::zero();
    let mut gamma0 = T::zero();
    let mut floor = T::zero();
    let mut trace = config.record_trace.then(Vec::new);
    let mut iterations = 0;
    let mut converged = false;
    let mut last_gamma = T::zero();

    for it in 1..=config.max_iter {
        let g = gram_plus_one(&x, &x);
        let spectrum: Spectrum<T> = match workspace.as_mut() {
            Some(ws) => ws.spectrum(&x)?,
            None => kernel_spectrum(entrywise_pow(&g, d))?,
        };
        if it == 1 {
            gamma0 = match config.gamma0 {
                Gamma0::Explicit(v) => v,
                Gamma0::Auto => {
                    let lm = spectrum.lambda_max();
                    let g0 = lit::<T>(0.1).powi(d as i32) * lm;
                    if g0 > T::zero() {
                        g0
                    } else {
                        T::one()
                    }
                }
            };
            gamma = gamma0;
            floor = config.gamma_floor_rel * gamma0;
        }

        let w = spectrum.weights(gamma, q);
        let tau = gamma.powf(q);
        let next = projected_step(&x, observed, w, &g, tau, d)
            .ok_or(Error::Divergence { iteration: it })?;
        let rel = hidden_change(&x, &next, observed);
        if let Some(t) = trace.as_mut() {
            t.push(TraceRecord {
                iteration: it,
                gamma,
                objective: spectrum.surrogate(gamma, config.p),
                rel_change: rel,
            });
        }
        x = next;
        iterations = it;
        last_gamma = gamma;
        gamma = (gamma / config.eta).max(floor);
        if hidden == 0 || rel < config.tol {
            converged = true;
            break;
        }
    }

    Ok(SolveResultOf {
        x_hat: DataMatrixOf::new(x)?,
        iterations,
        converged,
        gamma0,
        final_gamma: last_gamma,
        trace,
    })
}

/// Low-rank completion: [`vmc_complete`] with a linear kernel (`d = 1`).
/// `p = 1` is the convex nuclear-norm baseline, `p = 1/2` the non-convex one.
pub fn lrmc_complete<T: Scalar>(observed: &ObservedMatrixOf<T>, p: T) -> Result<SolveResultOf<T>> {
    vmc_complete(observed, &IrlsConfigOf::lrmc(p))
}

/// [`lrmc_complete`] with other knobs taken from `config`; `d` is forced to 1.
pub fn lrmc_complete_with<T: Scalar>(
    observed: &ObservedMatrixOf<T>,
    config: &IrlsConfigOf<T>,
) -> Result<SolveResultOf<T>> {
    let config = IrlsConfigOf {
        d: 1,
        ..config.clone()
    };
    vmc_complete(observed, &config)
}
