//! Completion error of each method on a user-supplied complete matrix at
//! several missing rates.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vmc_core::solver::{completion_error, vmc_complete};
use vmc_core::synth::{apply_mask, derive_seed, sample_mask};
use vmc_core::Error as CoreError;

use crate::config::{ExperimentConfig, ExperimentKind, Method};
use crate::error::{HarnessError, Result};
use crate::io::{load_complete_csv, read_text, write_text};
use crate::phase::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub missing_rate: f64,
    pub observed_per_column: usize,
    pub mask_seed: u64,
    pub completion_error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub input: PathBuf,
    pub input_sha256: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, method: Method, rate: f64) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.missing_rate == rate)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Serialize(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        write_text(&dir.join(format!("{stem}.json")), &self.to_json()?)?;
        write_text(&dir.join(format!("{stem}.csv")), &self.to_csv()?)
    }
}

/// Observed entries per column when a fraction `rate` of each column is hidden.
pub fn observed_per_column(n: usize, rate: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&rate) {
        return Err(CoreError::Domain(format!(
            "missing rate {rate} must lie in [0, 1); a rate of 1 leaves nothing observed"
        ))
        .into());
    }
    let hidden = (rate * n as f64).round() as usize;
    if hidden >= n {
        return Err(CoreError::Domain(format!(
            "missing rate {rate} hides every entry of a length-{n} column"
        ))
        .into());
    }
    Ok(n - hidden)
}

pub fn run_bench(
    matrix_file: impl AsRef<Path>,
    missing_rates: &[f64],
    methods: &[Method],
    config: &ExperimentConfig,
) -> Result<BenchReport> {
    let path = matrix_file.as_ref();
    let mut config = config.clone();
    config.kind = ExperimentKind::Bench;
    config.input = Some(path.to_path_buf());
    config.rates = Some(missing_rates.to_vec());
    config.methods = Some(methods.to_vec());
    let config = config.resolved()?;

    let text = read_text(path)?;
    let input_sha256 = hex::encode(Sha256::digest(text.as_bytes()));
    let x0 = load_complete_csv(path)?;
    let (n, s) = (x0.nrows(), x0.ncols());
    let root = config.root_seed.unwrap_or_default();
    let max_iter = config.max_iter.unwrap_or(crate::config::DEFAULT_MAX_ITER);
    let tol = config.tol.unwrap_or(1e-6);
    let p = config.p.unwrap_or(0.5);

    let mut rows = Vec::new();
    for (ri, &rate) in missing_rates.iter().enumerate() {
        let m = observed_per_column(n, rate)?;
        let mask_seed = derive_seed(root, ri as u64);
        let observed = apply_mask(&x0, &sample_mask(n, s, m, mask_seed)?)?;
        for &method in methods {
            let start = Instant::now();
            let result = vmc_complete(&observed, &method.solver_config(p, max_iter, tol))?;
            let seconds = start.elapsed().as_secs_f64();
            rows.push(BenchRow {
                method,
                missing_rate: rate,
                observed_per_column: m,
                mask_seed,
                completion_error: completion_error(&result.x_hat, &x0)?,
                iterations: result.iterations,
                converged: result.converged,
                seconds,
            });
        }
    }
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        input: path.to_path_buf(),
        input_sha256,
        config_hash: config.hash(),
        config,
        rows,
    })
}

/// Runs a bench described entirely by a config file.
pub fn run_bench_config(config: &ExperimentConfig) -> Result<BenchReport> {
    let resolved = config.resolved()?;
    let input = resolved.input.clone().ok_or_else(|| HarnessError::Config("bench needs an input".into()))?;
    run_bench(
        input,
        resolved.rates.as_deref().unwrap_or_default(),
        resolved.methods.as_deref().unwrap_or_default(),
        &resolved,
    )
}
