use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::DataMatrixOf;
use crate::error::{Error, Result};
use crate::lifting::MonomialBasis;
use crate::DataMatrix;

/// Circle `x1² + x2² - 1 = 0` as conic coefficients `(c0..c5)`.
pub const CIRCLE: [f64; 6] = [-1.0, 0.0, 0.0, 1.0, 0.0, 1.0];
/// Parabola `x1² - x2 = 0`.
pub const PARABOLA: [f64; 6] = [0.0, 0.0, -1.0, 1.0, 0.0, 0.0];

/// Parameters of a synthetic variety.
#[derive(Clone, Debug, PartialEq)]
pub enum VarietySpec {
    /// `k` random `r`-dimensional subspaces of `R^n`, shifted by a random
    /// offset each when `affine`, mutually orthogonal when `orthogonal`.
    UnionOfSubspaces {
        n: usize,
        k: usize,
        r: usize,
        points_per_subspace: usize,
        affine: bool,
        orthogonal: bool,
    },
    /// Image of `[-1, 1]^latent_dim` under a random polynomial map of degree
    /// `map_degree` into `R^n`.
    Parametric {
        n: usize,
        latent_dim: usize,
        map_degree: usize,
        s: usize,
    },
    /// Points of `R^2` on `c0 + c1 x1 + c2 x2 + c3 x1² + c4 x1 x2 + c5 x2² = 0`
    /// with `x1` drawn uniformly from `window`.
    Conic {
        coefficients: [f64; 6],
        s: usize,
        window: (f64, f64),
    },
}

impl VarietySpec {
    pub fn ambient_dim(&self) -> usize {
        match *self {
            VarietySpec::UnionOfSubspaces { n, .. } | VarietySpec::Parametric { n, .. } => n,
            VarietySpec::Conic { .. } => 2,
        }
    }

    pub fn num_points(&self) -> usize {
        match *self {
            VarietySpec::UnionOfSubspaces {
                k,
                points_per_subspace,
                ..
            } => k * points_per_subspace,
            VarietySpec::Parametric { s, .. } | VarietySpec::Conic { s, .. } => s,
        }
    }

    /// Draws the dataset; identical `(spec, seed)` pairs give bitwise
    /// identical output.
    pub fn generate(&self, seed: u64) -> Result<GeneratedDataset> {
        match *self {
            VarietySpec::UnionOfSubspaces {
                n,
                k,
                r,
                points_per_subspace,
                affine,
                orthogonal,
            } => uos(n, k, r, points_per_subspace, affine, orthogonal, seed),
            VarietySpec::Parametric {
                n,
                latent_dim,
                map_degree,
                s,
            } => gen_parametric(n, latent_dim, map_degree, s, seed),
            VarietySpec::Conic {
                coefficients,
                s,
                window,
            } => gen_conic_in(coefficients, s, window, seed),
        }
    }
}

/// Ground-truth data drawn from a [`VarietySpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedDataset {
    pub x: DataMatrix,
    /// Subspace index of each column, for unions of subspaces.
    pub labels: Option<Vec<usize>>,
    pub spec: VarietySpec,
    pub seed: u64,
}

fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn orthonormal_basis(rng: &mut ChaCha8Rng, n: usize, r: usize) -> DMatrix<f64> {
    normal_matrix(rng, n, r).qr().q()
}

/// Union of `k` random `r`-dimensional subspaces of `R^n` with
/// `points_per_subspace` standard-normal points on each; columns are grouped
/// by subspace.
pub fn gen_uos(
    n: usize,
    k: usize,
    r: usize,
    points_per_subspace: usize,
    affine: bool,
    seed: u64,
) -> Result<GeneratedDataset> {
    uos(n, k, r, points_per_subspace, affine, false, seed)
}

/// [`gen_uos`] with mutually orthogonal subspaces; needs `k·r <= n`.
pub fn gen_uos_orthogonal(
    n: usize,
    k: usize,
    r: usize,
    points_per_subspace: usize,
    affine: bool,
    seed: u64,
) -> Result<GeneratedDataset> {
    uos(n, k, r, points_per_subspace, affine, true, seed)
}

fn uos(
    n: usize,
    k: usize,
    r: usize,
    points_per_subspace: usize,
    affine: bool,
    orthogonal: bool,
    seed: u64,
) -> Result<GeneratedDataset> {
    if k == 0 || r == 0 || r >= n || points_per_subspace == 0 {
        return Err(Error::Dimension(format!(
            "union of subspaces needs k >= 1, 1 <= r < n, points >= 1; got n={n}, k={k}, r={r}, points={points_per_subspace}"
        )));
    }
    if orthogonal && k * r > n {
        return Err(Error::Dimension(format!(
            "{k} mutually orthogonal {r}-dimensional subspaces do not fit in R^{n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let joint = orthogonal.then(|| orthonormal_basis(&mut rng, n, k * r));
    let s = k * points_per_subspace;
    let mut x = DMatrix::zeros(n, s);
    let mut labels = Vec::with_capacity(s);
    for c in 0..k {
        let basis = match &joint {
            Some(q) => q.columns(c * r, r).into_owned(),
            None => orthonormal_basis(&mut rng, n, r),
        };
        let offset = affine.then(|| normal_matrix(&mut rng, n, 1));
        let coeffs = normal_matrix(&mut rng, r, points_per_subspace);
        let mut block = basis * coeffs;
        if let Some(b) = &offset {
            for mut col in block.column_iter_mut() {
                col += b.column(0);
            }
        }
        x.columns_mut(c * points_per_subspace, points_per_subspace)
            .copy_from(&block);
        labels.extend(std::iter::repeat_n(c, points_per_subspace));
    }
    Ok(GeneratedDataset {
        x: DataMatrixOf::new(x)?,
        labels: Some(labels),
        spec: VarietySpec::UnionOfSubspaces {
            n,
            k,
            r,
            points_per_subspace,
            affine,
            orthogonal,
        },
        seed,
    })
}

/// Random polynomial map `R^latent_dim -> R^n` of degree `map_degree`
/// (standard-normal coefficients on the monomial basis) evaluated at `s`
/// points uniform on `[-1, 1]^latent_dim`.
pub fn gen_parametric(
    n: usize,
    latent_dim: usize,
    map_degree: usize,
    s: usize,
    seed: u64,
) -> Result<GeneratedDataset> {
    if !(1..=3).contains(&latent_dim) || latent_dim >= n || map_degree == 0 || s == 0 {
        return Err(Error::Dimension(format!(
            "parametric variety needs latent_dim in 1..=3, latent_dim < n, map_degree >= 1, s >= 1; got n={n}, latent_dim={latent_dim}, map_degree={map_degree}, s={s}"
        )));
    }
    let basis = MonomialBasis::new(latent_dim, map_degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = normal_matrix(&mut rng, n, basis.len());
    let latent = DMatrix::from_fn(latent_dim, s, |_, _| rng.gen_range(-1.0..=1.0));
    let latent = DataMatrixOf::new(latent)?;
    let features = crate::lifting::lift(&latent, map_degree)?;
    Ok(GeneratedDataset {
        x: DataMatrixOf::new(coeffs * features)?,
        labels: None,
        spec: VarietySpec::Parametric {
            n,
            latent_dim,
            map_degree,
            s,
        },
        seed,
    })
}

/// `s` points on the conic with the given coefficients, `x1` uniform on
/// `[-1, 1]`.
pub fn gen_conic(coefficients: [f64; 6], s: usize, seed: u64) -> Result<GeneratedDataset> {
    gen_conic_in(coefficients, s, (-1.0, 1.0), seed)
}

/// Solves the conic for `x2` at each sampled `x1`, taking either real root
/// with equal probability. Draws of `x1` with no real solution are redrawn.
pub fn gen_conic_in(
    coefficients: [f64; 6],
    s: usize,
    window: (f64, f64),
    seed: u64,
) -> Result<GeneratedDataset> {
    let [c0, c1, c2, c3, c4, c5] = coefficients;
    if coefficients.iter().all(|&c| c == 0.0) {
        return Err(Error::Domain("conic coefficients are all zero".into()));
    }
    if coefficients.iter().any(|c| !c.is_finite()) || s == 0 {
        return Err(Error::Domain(
            "conic needs finite coefficients and s >= 1".into(),
        ));
    }
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("invalid sampling window [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_draws = 1000 * s + 1000;
    let mut x = DMatrix::zeros(2, s);
    let mut filled = 0;
    for _ in 0..max_draws {
        if filled == s {
            break;
        }
        let x1: f64 = rng.gen_range(lo..=hi);
        let plus: bool = rng.gen();
        let a = c5;
        let b = c2 + c4 * x1;
        let c = c0 + c1 * x1 + c3 * x1 * x1;
        let x2 = if a == 0.0 {
            if b == 0.0 {
                continue;
            }
            -c / b
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                continue;
            }
            let root = disc.sqrt();
            if plus {
                (-b + root) / (2.0 * a)
            } else {
                (-b - root) / (2.0 * a)
            }
        };
        x[(0, filled)] = x1;
        x[(1, filled)] = x2;
        filled += 1;
    }
    if filled < s {
        return Err(Error::Domain(format!(
            "conic has no real points over x1 in [{lo}, {hi}]"
        )));
    }
    Ok(GeneratedDataset {
        x: DataMatrixOf::new(x)?,
        labels: None,
        spec: VarietySpec::Conic {
            coefficients,
            s,
            window,
        },
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uos_shapes_and_labels() {
        let g = gen_uos(15, 3, 3, 100, false, 1).unwrap();
        assert_eq!((g.x.nrows(), g.x.ncols()), (15, 300));
        let labels = g.labels.unwrap();
        assert_eq!(labels[0], 0);
        assert_eq!(labels[299], 2);
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 100);
    }

    #[test]
    fn uos_rejects_bad_dimensions() {
        assert!(gen_uos(5, 2, 5, 10, false, 0).is_err());
        assert!(gen_uos(5, 0, 2, 10, false, 0).is_err());
        assert!(gen_uos(5, 2, 2, 0, false, 0).is_err());
        assert!(gen_uos_orthogonal(5, 3, 2, 10, false, 0).is_err());
    }

    #[test]
    fn orthogonal_subspaces_are_orthogonal() {
        let g = gen_uos_orthogonal(10, 2, 2, 5, false, 3).unwrap();
        let x = g.x.as_matrix();
        let cross = x.columns(0, 5).transpose() * x.columns(5, 5);
        assert!(cross.amax() < 1e-12);
    }

    #[test]
    fn parametric_rejects_degenerate() {
        assert!(gen_parametric(20, 0, 2, 10, 0).is_err());
        assert!(gen_parametric(20, 4, 2, 10, 0).is_err());
        assert!(gen_parametric(2, 2, 2, 10, 0).is_err());
        assert!(gen_parametric(20, 1, 0, 10, 0).is_err());
    }

    #[test]
    fn conic_presets() {
        let p = gen_conic(PARABOLA, 20, 4).unwrap();
        for col in p.x.as_matrix().column_iter() {
            assert_eq!(col[1] - col[0] * col[0], 0.0);
        }
        let c = gen_conic(CIRCLE, 20, 4).unwrap();
        for col in c.x.as_matrix().column_iter() {
            assert!((col[0] * col[0] + col[1] * col[1] - 1.0).abs() < 1e-15);
        }
        assert!(gen_conic([0.0; 6], 5, 0).is_err());
        // x2² + 1 = 0 has no real points
        assert!(gen_conic([1.0, 0.0, 0.0, 0.0, 0.0, 1.0], 5, 0).is_err());
    }
}
