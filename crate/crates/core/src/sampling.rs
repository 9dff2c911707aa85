//! Degrees-of-freedom accounting for matrices that are low-rank after lifting.
//!
//! Observing `m` of `n` entries in a column reveals `M = C(m+d, d)` of the
//! `N = C(n+d, d)` lifted entries. An `N x s` rank-`R` matrix has
//! `R(N + s - R)` degrees of freedom, so completion needs at least
//! `M·s >= R(N + s - R)`.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::lifting::{binomial, feature_dimension};

/// Where a feature-space rank used in a bound came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RankSource {
    /// From a closed-form subspace bound.
    Analytic,
    /// Measured with the numerical-rank estimator.
    Empirical,
}

/// Minimal per-column sampling for a rank-`R` lifted matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingBound {
    pub n: usize,
    pub s: usize,
    pub d: usize,
    /// Assumed feature-space rank `R`.
    pub rank: usize,
    /// Feature dimension `N`.
    pub feature_dim: usize,
    /// Smallest `m` satisfying the degrees-of-freedom count.
    pub m0: usize,
    /// `M0 = C(m0 + d, d)`.
    pub observed_features: usize,
    /// `m0 / n`.
    pub rho0: f64,
}

impl SamplingBound {
    /// `R(N + s - R)`, the degrees of freedom of the lifted matrix.
    pub fn degrees_of_freedom(&self) -> u128 {
        dof(self.rank, self.feature_dim, self.s)
    }
}

fn dof(rank: usize, feature_dim: usize, s: usize) -> u128 {
    rank as u128 * (feature_dim as u128 + s as u128 - rank as u128)
}

fn to_usize(v: u64, what: &'static str) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::Overflow(what))
}

/// `C(r+d, d)`: lifted rank ceiling for data on one `r`-dimensional affine
/// subspace.
pub fn subspace_rank_bound(r: usize, d: usize) -> Result<usize> {
    to_usize(binomial(r as u64 + d as u64, d as u64)?, "subspace rank bound")
}

/// `k·C(r+d, d)`: lifted rank ceiling for a union of `k` affine subspaces of
/// dimension at most `r`.
pub fn uos_rank_bound(k: usize, r: usize, d: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::Domain("union of subspaces needs k >= 1".into()));
    }
    subspace_rank_bound(r, d)?
        .checked_mul(k)
        .ok_or(Error::Overflow("union rank bound"))
}

/// `M = C(m+d, d)`: lifted entries revealed by `m` observed coordinates.
pub fn observed_features(m: usize, d: usize) -> Result<usize> {
    to_usize(binomial(m as u64 + d as u64, d as u64)?, "observed features")
}

/// `((m/n)^d, ((m+d)/n)^d)`, which bracket `M/N`.
///
/// # Panics
/// If `n == 0` or `m > n`.
pub fn ratio_bounds(m: usize, n: usize, d: usize) -> (f64, f64) {
    assert!(n >= 1 && m <= n, "ratio_bounds needs 1 <= m <= n, got m={m}, n={n}");
    let d = d as i32;
    let n = n as f64;
    ((m as f64 / n).powi(d), ((m as f64 + d as f64) / n).powi(d))
}

/// Exact rational version of [`ratio_bounds`].
pub fn ratio_bounds_exact(m: usize, n: usize, d: usize) -> Result<(Ratio<u128>, Ratio<u128>)> {
    if n == 0 || m > n {
        return Err(Error::Domain(format!(
            "ratio bounds need 1 <= m <= n, got m={m}, n={n}"
        )));
    }
    let d32 = u32::try_from(d).map_err(|_| Error::Overflow("ratio bounds"))?;
    let pow = |b: u128| b.checked_pow(d32).ok_or(Error::Overflow("ratio bounds"));
    let den = pow(n as u128)?;
    Ok((
        Ratio::new(pow(m as u128)?, den),
        Ratio::new(pow(m as u128 + d as u128)?, den),
    ))
}

/// Smallest `m ∈ {0..n}` with `C(m+d, d)·s >= R(N + s - R)`, by ascending
/// search.
pub fn min_samples_per_column(n: usize, s: usize, d: usize, rank: usize) -> Result<SamplingBound> {
    if n == 0 || s == 0 {
        return Err(Error::Dimension(format!(
            "sampling bound needs n, s >= 1, got n={n}, s={s}"
        )));
    }
    let feature_dim = feature_dimension(n, d)?;
    if rank == 0 || rank > feature_dim.min(s) {
        return Err(Error::Domain(format!(
            "rank {rank} outside [1, min(N={feature_dim}, s={s})]"
        )));
    }
    let need = dof(rank, feature_dim, s);
    for m in 0..=n {
        let big_m = observed_features(m, d)?;
        if big_m as u128 * s as u128 >= need {
            return Ok(SamplingBound {
                n,
                s,
                d,
                rank,
                feature_dim,
                m0: m,
                observed_features: big_m,
                rho0: m as f64 / n as f64,
            });
        }
    }
    // unreachable for rank <= min(N, s): at m = n, N·s >= R(N + s - R)
    Err(Error::Domain(format!(
        "no m <= {n} satisfies the sampling bound for rank {rank}"
    )))
}

/// [`min_samples_per_column`] with `R = min(k·C(r+d, d), N, s)`.
pub fn min_samples_for_union(
    n: usize,
    s: usize,
    d: usize,
    k: usize,
    r: usize,
) -> Result<SamplingBound> {
    let cap = feature_dimension(n, d)?.min(s);
    min_samples_per_column(n, s, d, uos_rank_bound(k, r, d)?.min(cap))
}

/// `k^(1/d)·r`, the large-`s` per-column sample count for a union of `k`
/// `r`-dimensional subspaces.
pub fn uos_sampling_heuristic(k: usize, r: usize, d: usize) -> f64 {
    (k as f64).powf(1.0 / d as f64) * r as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_bound_examples() {
        assert_eq!(subspace_rank_bound(3, 2).unwrap(), 10);
        assert_eq!(subspace_rank_bound(0, 4).unwrap(), 1);
        assert_eq!(subspace_rank_bound(7, 1).unwrap(), 8);
        assert_eq!(subspace_rank_bound(5, 0).unwrap(), 1);
        assert_eq!(uos_rank_bound(1, 4, 3).unwrap(), subspace_rank_bound(4, 3).unwrap());
        assert_eq!(uos_rank_bound(2, 3, 2).unwrap(), 20);
        assert_eq!(uos_rank_bound(6, 3, 3).unwrap(), 120);
        assert!(uos_rank_bound(0, 3, 2).is_err());
        assert!(uos_rank_bound(usize::MAX, 3, 2).is_err());
    }

    #[test]
    fn observed_feature_examples() {
        assert_eq!(observed_features(8, 2).unwrap(), 45);
        assert_eq!(observed_features(0, 5).unwrap(), 1);
        assert_eq!(observed_features(9, 2).unwrap(), 55);
    }

    #[test]
    fn ratio_bound_examples() {
        let (lo, hi) = ratio_bounds(8, 15, 2);
        assert!((lo - 64.0 / 225.0).abs() < 1e-15);
        assert!((hi - 100.0 / 225.0).abs() < 1e-15);
        let mn = 45.0 / 136.0;
        assert!(lo <= mn && mn <= hi);

        let (lo, hi) = ratio_bounds(1, 100, 1);
        assert!((lo - 0.01).abs() < 1e-15 && (hi - 0.02).abs() < 1e-15);
        assert!(lo <= 2.0 / 101.0 && 2.0 / 101.0 <= hi);

        let (lo, hi) = ratio_bounds(12, 12, 3);
        assert_eq!(lo, 1.0);
        assert!((hi - (15.0f64 / 12.0).powi(3)).abs() < 1e-12);
    }

    #[test]
    fn min_samples_examples() {
        let b = min_samples_per_column(15, 300, 2, 30).unwrap();
        assert_eq!((b.m0, b.observed_features), (8, 45));
        assert!((b.rho0 - 8.0 / 15.0).abs() < 1e-15);
        assert_eq!(b.feature_dim, 136);
        assert_eq!(b.degrees_of_freedom(), 12180);

        let b = min_samples_per_column(15, 400, 2, 40).unwrap();
        assert_eq!((b.m0, b.observed_features), (9, 55));
        assert!((b.rho0 - 0.6).abs() < 1e-15);

        // rank equal to s forces full sampling
        let b = min_samples_per_column(15, 100, 2, 100).unwrap();
        assert_eq!((b.m0, b.rho0), (15, 1.0));

        let b = min_samples_for_union(15, 600, 2, 6, 3).unwrap();
        assert_eq!((b.rank, b.m0), (60, 11));
    }

    #[test]
    fn min_samples_domain_errors() {
        assert!(min_samples_per_column(15, 300, 2, 0).is_err());
        assert!(min_samples_per_column(15, 300, 2, 137).is_err());
        assert!(min_samples_per_column(15, 50, 2, 51).is_err());
        assert!(min_samples_per_column(0, 50, 2, 1).is_err());
    }

    #[test]
    fn heuristic_examples() {
        assert_eq!(uos_sampling_heuristic(1, 5, 3), 5.0);
        assert!((uos_sampling_heuristic(8, 3, 3) - 6.0).abs() < 1e-12);
        assert!((uos_sampling_heuristic(4, 3, 2) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn exact_ratio_bounds() {
        let (lo, hi) = ratio_bounds_exact(8, 15, 2).unwrap();
        assert_eq!(lo, Ratio::new(64, 225));
        assert_eq!(hi, Ratio::new(100, 225));
        assert!(ratio_bounds_exact(3, 2, 2).is_err());
    }
}
