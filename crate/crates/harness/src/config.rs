//! Experiment configuration, read from flat TOML.
//!
//! Every key is optional except `kind`; unset keys take per-kind desk-scale
//! defaults when the config is resolved. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vmc_core::IrlsConfig;

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    PhaseUos,
    PhaseParametric,
    Bench,
}

/// A completion method compared in the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Variety completion with the degree-2 kernel.
    VmcD2,
    /// Variety completion with the degree-3 kernel.
    VmcD3,
    /// Nuclear-norm low-rank completion (`d = 1`, `p = 1`).
    Lrmc,
    /// Schatten-1/2 low-rank completion (`d = 1`, `p = 1/2`).
    LrmcNcvx,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::VmcD2, Method::VmcD3, Method::Lrmc, Method::LrmcNcvx];

    pub fn name(self) -> &'static str {
        match self {
            Method::VmcD2 => "vmc_d2",
            Method::VmcD3 => "vmc_d3",
            Method::Lrmc => "lrmc",
            Method::LrmcNcvx => "lrmc_ncvx",
        }
    }

    pub fn degree(self) -> usize {
        match self {
            Method::VmcD2 => 2,
            Method::VmcD3 => 3,
            Method::Lrmc | Method::LrmcNcvx => 1,
        }
    }

    /// Solver settings for this method. `vmc_p` applies to the variety
    /// methods only; the low-rank baselines have fixed exponents.
    pub fn solver_config(self, vmc_p: f64, max_iter: usize, tol: f64) -> IrlsConfig {
        let base = match self {
            Method::VmcD2 | Method::VmcD3 => IrlsConfig {
                p: vmc_p,
                ..IrlsConfig::vmc(self.degree())
            },
            Method::Lrmc => IrlsConfig::lrmc(1.0),
            Method::LrmcNcvx => IrlsConfig::lrmc(0.5),
        };
        IrlsConfig {
            max_iter,
            tol,
            ..base
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| {
                HarnessError::Usage(format!(
                    "unknown method {s:?}; expected one of vmc_d2, vmc_d3, lrmc, lrmc_ncvx"
                ))
            })
    }
}

/// Flat experiment description. See the field docs for per-kind defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Observed entries per column to sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_values: Option<Vec<usize>>,
    /// Number of subspaces per union (phase_uos). Default `[2, 3, 4, 6]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<usize>>,
    /// `[latent_dim, map_degree]` pairs (phase_parametric).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<Method>>,
    /// Ambient dimension. Default 15 for unions, 20 for parametric data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Subspace dimension (phase_uos). Default 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    /// Points per subspace (phase_uos). Default 100.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_per_subspace: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<bool>,
    /// Number of points (phase_parametric). Default 300.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    /// Degree at which parametric datasets are ranked. Default 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Schatten exponent of the variety methods. Default 0.5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Column-success threshold on relative column error. Default 1e-5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Input matrix (bench).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Fractions of entries hidden per column (bench).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

pub const DEFAULT_ROOT_SEED: u64 = 20_190_101;
pub const DEFAULT_MAX_ITER: usize = 4000;

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            m_values: None,
            k_values: None,
            families: None,
            trials: None,
            methods: None,
            n: None,
            r: None,
            points_per_subspace: None,
            affine: None,
            s: None,
            rank_degree: None,
            rel_tol: None,
            root_seed: None,
            max_iter: None,
            tol: None,
            p: None,
            threshold: None,
            input: None,
            rates: None,
            output_dir: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = crate::io::read_text(path)?;
        toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    /// Fills every unset field with its default and checks the result.
    pub fn resolved(&self) -> Result<Self> {
        let mut c = self.clone();
        let uos = c.kind == ExperimentKind::PhaseUos;
        let n = *c.n.get_or_insert(if uos { 15 } else { 20 });
        c.trials.get_or_insert(5);
        c.root_seed.get_or_insert(DEFAULT_ROOT_SEED);
        c.max_iter.get_or_insert(DEFAULT_MAX_ITER);
        c.tol.get_or_insert(1e-6);
        c.p.get_or_insert(0.5);
        c.threshold.get_or_insert(vmc_core::solver::COLUMN_SUCCESS_THRESHOLD);
        c.rel_tol.get_or_insert(vmc_core::lifting::DEFAULT_REL_TOL);
        match c.kind {
            ExperimentKind::PhaseUos => {
                c.m_values.get_or_insert_with(|| (1..=n).collect());
                c.k_values.get_or_insert_with(|| vec![2, 3, 4, 6]);
                c.methods
                    .get_or_insert_with(|| vec![Method::VmcD2, Method::VmcD3, Method::Lrmc, Method::LrmcNcvx]);
                c.r.get_or_insert(3);
                c.points_per_subspace.get_or_insert(100);
                c.affine.get_or_insert(false);
            }
            ExperimentKind::PhaseParametric => {
                c.m_values.get_or_insert_with(|| (1..=n).collect());
                c.families
                    .get_or_insert_with(|| vec![[1, 1], [1, 2], [1, 3], [2, 1], [2, 2], [3, 1]]);
                c.methods.get_or_insert_with(|| vec![Method::VmcD2, Method::VmcD3]);
                c.s.get_or_insert(300);
                c.rank_degree.get_or_insert(2);
            }
            ExperimentKind::Bench => {
                c.methods.get_or_insert_with(|| vec![Method::VmcD2, Method::Lrmc]);
                c.rates.get_or_insert_with(|| vec![0.0, 0.2, 0.4, 0.6]);
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        let n = self.n.unwrap_or(1);
        if n == 0 {
            return bad("n must be positive".into());
        }
        if self.trials == Some(0) {
            return bad("trials must be at least 1".into());
        }
        if self.methods.as_ref().is_some_and(Vec::is_empty) {
            return bad("methods must be nonempty".into());
        }
        if let Some(ms) = &self.m_values {
            if ms.is_empty() {
                return bad("m_values must be nonempty".into());
            }
            if let Some(&m) = ms.iter().find(|&&m| m == 0 || m > n) {
                return bad(format!("m value {m} outside 1..={n}"));
            }
        }
        if let Some(ks) = &self.k_values {
            if ks.is_empty() || ks.contains(&0) {
                return bad("k_values must be nonempty and positive".into());
            }
        }
        if let Some(fs) = &self.families {
            if fs.is_empty() {
                return bad("families must be nonempty".into());
            }
            if let Some(f) = fs.iter().find(|f| f[0] == 0 || f[0] > 3 || f[0] >= n || f[1] == 0) {
                return bad(format!(
                    "family {f:?} needs 1 <= latent_dim <= 3, latent_dim < n and map_degree >= 1"
                ));
            }
        }
        if let Some(r) = self.r {
            if r == 0 || r > n {
                return bad(format!("subspace dimension {r} outside 1..={n}"));
            }
        }
        if self.points_per_subspace == Some(0) || self.s == Some(0) {
            return bad("point counts must be positive".into());
        }
        if let Some(p) = self.p {
            if !(p > 0.0 && p <= 1.0) {
                return bad(format!("p = {p} outside (0, 1]"));
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("tol = {t} must be positive"));
            }
        }
        if let Some(t) = self.threshold {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("threshold = {t} must be positive"));
            }
        }
        if self.max_iter == Some(0) {
            return bad("max_iter must be at least 1".into());
        }
        if let Some(rates) = &self.rates {
            if rates.is_empty() {
                return bad("rates must be nonempty".into());
            }
        }
        if self.kind == ExperimentKind::Bench && self.input.is_none() {
            return bad("bench needs an input matrix".into());
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml_str("kind = \"phase_uos\"\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        assert_eq!(err.exit_code(), crate::error::exit::USAGE);
    }

    #[test]
    fn defaults_follow_kind() {
        let c = ExperimentConfig::new(ExperimentKind::PhaseParametric).resolved().unwrap();
        assert_eq!(c.n, Some(20));
        assert!(!c.methods.unwrap().contains(&Method::Lrmc));
        let c = ExperimentConfig::new(ExperimentKind::PhaseUos).resolved().unwrap();
        assert_eq!(c.k_values, Some(vec![2, 3, 4, 6]));
        assert_eq!(c.trials, Some(5));
    }

    #[test]
    fn empty_grids_and_zero_trials_fail() {
        let c = ExperimentConfig::from_toml_str("kind = \"phase_uos\"\nm_values = []").unwrap();
        assert!(c.resolved().is_err());
        let c = ExperimentConfig::from_toml_str("kind = \"phase_uos\"\ntrials = 0").unwrap();
        assert!(c.resolved().is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::new(ExperimentKind::PhaseUos).resolved().unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.root_seed = Some(1);
        assert_ne!(a.hash(), b.hash());
    }
}
