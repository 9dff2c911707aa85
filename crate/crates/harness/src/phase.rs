//! Phase-transition experiments: success of completion as a function of the
//! number of observed entries per column.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vmc_core::lifting::lifted_rank;
use vmc_core::sampling::{min_samples_for_union, min_samples_per_column, RankSource, SamplingBound};
use vmc_core::solver::{column_errors, completion_error, vmc_complete};
use vmc_core::synth::{apply_mask, derive_seed, gen_parametric, gen_uos, sample_mask};
use vmc_core::DataMatrix;

use crate::config::{ExperimentConfig, ExperimentKind, Method};
use crate::error::{HarnessError, Result};
use crate::io::write_text;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Column-recovery levels at which success fractions are reported, in percent.
pub const SUCCESS_PERCENTS: [u32; 3] = [100, 99, 90];
/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "VMC_THREADS";

const DATA_STREAM: u64 = 0;
const MASK_STREAM: u64 = 1;

/// Everything needed to regenerate a grid bitwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub artifact_version: String,
    pub root_seed: u64,
    pub config_hash: String,
    pub threads: usize,
    pub rank_source: String,
    /// The resolved configuration; its hash is `config_hash`.
    pub config: ExperimentConfig,
    pub cell_seeds: Vec<CellSeeds>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSeeds {
    pub axis: usize,
    pub m: usize,
    pub data_seeds: Vec<u64>,
    pub mask_seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub data_seed: u64,
    pub mask_seed: u64,
    /// Rank of the trial's dataset at the method's degree (parametric runs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_rank: Option<usize>,
    pub columns: usize,
    pub recovered_columns: usize,
    pub column_success: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completion_error: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Solver failure, recorded instead of aborting the run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileFraction {
    pub percent: u32,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    /// Index into the experiment's second axis (k values or families).
    pub axis: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// `[latent_dim, map_degree]` for parametric runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<[usize; 2]>,
    /// Rank at the configured ranking degree, used to sort parametric cells.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bucket_rank: Option<usize>,
    pub m: usize,
    pub method: Method,
    /// Feature-space rank fed to the sampling bound.
    pub rank: usize,
    pub predicted_m0: usize,
    pub rho0: f64,
    pub success: Vec<QuantileFraction>,
    pub trials: Vec<TrialRecord>,
}

impl PhaseCell {
    /// Fraction of trials that recovered at least `percent` of the columns.
    pub fn fraction_at(&self, percent: u32) -> f64 {
        fraction_at(&self.trials, percent)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub m_values: Vec<usize>,
    pub cells: Vec<PhaseCell>,
    pub manifest: Manifest,
}

impl PhaseGrid {
    pub fn cell(&self, axis: usize, m: usize, method: Method) -> Option<&PhaseCell> {
        self.cells
            .iter()
            .find(|c| c.axis == axis && c.m == m && c.method == method)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One row per cell and method, for plotting.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "axis", "k", "latent_dim", "map_degree", "bucket_rank", "m", "method", "rank",
            "predicted_m0", "rho0",
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        header.extend(SUCCESS_PERCENTS.iter().map(|p| format!("success_{p}")));
        header.push("failures".into());
        w.write_record(&header)?;
        let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
        for c in &self.cells {
            let mut row = vec![
                c.axis.to_string(),
                opt(c.k),
                opt(c.family.map(|f| f[0])),
                opt(c.family.map(|f| f[1])),
                opt(c.bucket_rank),
                c.m.to_string(),
                c.method.to_string(),
                c.rank.to_string(),
                c.predicted_m0.to_string(),
                format!("{:?}", c.rho0),
            ];
            row.extend(c.success.iter().map(|q| format!("{:?}", q.fraction)));
            row.push(c.trials.iter().filter(|t| t.failure.is_some()).count().to_string());
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Serialize(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes `<stem>.json` and `<stem>.csv` into `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        write_text(&dir.join(format!("{stem}.json")), &self.to_json()?)?;
        write_text(&dir.join(format!("{stem}.csv")), &self.to_csv()?)
    }
}

fn fraction_at(trials: &[TrialRecord], percent: u32) -> f64 {
    let hit = trials
        .iter()
        .filter(|t| t.recovered_columns as u64 * 100 >= percent as u64 * t.columns as u64)
        .count();
    hit as f64 / trials.len() as f64
}

/// Thread count from `VMC_THREADS`, else the rayon default.
pub fn configured_threads() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(t),
            _ => Err(HarnessError::Usage(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        },
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

pub fn data_seed(root: u64, axis: usize, trials: usize, trial: usize) -> u64 {
    derive_seed(derive_seed(root, DATA_STREAM), (axis * trials + trial) as u64)
}

pub fn mask_seed(root: u64, axis: usize, m_index: usize, num_m: usize, trials: usize, trial: usize) -> u64 {
    let cell = axis * num_m + m_index;
    derive_seed(derive_seed(root, MASK_STREAM), (cell * trials + trial) as u64)
}

struct Dataset {
    x: DataMatrix,
    seed: u64,
    // measured ranks keyed by degree, parametric runs only
    ranks: Vec<(usize, usize)>,
}

impl Dataset {
    fn rank_at(&self, d: usize) -> Option<usize> {
        self.ranks.iter().find(|(deg, _)| *deg == d).map(|&(_, r)| r)
    }
}

struct Plan {
    config: ExperimentConfig,
    axes: usize,
    m_values: Vec<usize>,
    methods: Vec<Method>,
    trials: usize,
    root: u64,
}

impl Plan {
    fn new(config: &ExperimentConfig, kind: ExperimentKind) -> Result<Self> {
        if config.kind != kind {
            return Err(HarnessError::Config(format!(
                "expected a {kind:?} config, got {:?}",
                config.kind
            )));
        }
        let config = config.resolved()?;
        let axes = match kind {
            ExperimentKind::PhaseUos => config.k_values.as_ref().map(Vec::len),
            _ => config.families.as_ref().map(Vec::len),
        }
        .unwrap_or(0);
        Ok(Plan {
            axes,
            m_values: config.m_values.clone().unwrap_or_default(),
            methods: config.methods.clone().unwrap_or_default(),
            trials: config.trials.unwrap_or(1),
            root: config.root_seed.unwrap_or_default(),
            config,
        })
    }

    fn manifest(&self, threads: usize, source: RankSource) -> Manifest {
        let cell_seeds = (0..self.axes)
            .flat_map(|a| {
                self.m_values.iter().enumerate().map(move |(mi, &m)| CellSeeds {
                    axis: a,
                    m,
                    data_seeds: (0..self.trials).map(|t| data_seed(self.root, a, self.trials, t)).collect(),
                    mask_seeds: (0..self.trials)
                        .map(|t| mask_seed(self.root, a, mi, self.m_values.len(), self.trials, t))
                        .collect(),
                })
            })
            .collect();
        Manifest {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION.to_string(),
            root_seed: self.root,
            config_hash: self.config.hash(),
            threads,
            rank_source: match source {
                RankSource::Analytic => "analytic",
                RankSource::Empirical => "empirical",
            }
            .to_string(),
            config: self.config.clone(),
            cell_seeds,
        }
    }
}

struct SolveJob<'a> {
    axis: usize,
    m_index: usize,
    trial: usize,
    method: Method,
    data: &'a Dataset,
}

fn solve_trial(plan: &Plan, job: &SolveJob<'_>) -> TrialRecord {
    let c = &plan.config;
    let m = plan.m_values[job.m_index];
    let x = &job.data.x;
    let (n, s) = (x.nrows(), x.ncols());
    let seed = mask_seed(plan.root, job.axis, job.m_index, plan.m_values.len(), plan.trials, job.trial);
    let mut record = TrialRecord {
        trial: job.trial,
        data_seed: job.data.seed,
        mask_seed: seed,
        measured_rank: job.data.rank_at(job.method.degree()),
        columns: s,
        recovered_columns: 0,
        column_success: 0.0,
        completion_error: None,
        iterations: 0,
        converged: false,
        failure: None,
    };
    let solver = job.method.solver_config(
        c.p.unwrap_or(0.5),
        c.max_iter.unwrap_or(crate::config::DEFAULT_MAX_ITER),
        c.tol.unwrap_or(1e-6),
    );
    let threshold = c.threshold.unwrap_or(vmc_core::solver::COLUMN_SUCCESS_THRESHOLD);
    let outcome = sample_mask(n, s, m, seed)
        .and_then(|mask| apply_mask(x, &mask))
        .and_then(|obs| vmc_complete(&obs, &solver));
    match outcome {
        Ok(result) => {
            let recovered = column_errors(&result.x_hat, x)
                .iter()
                .filter(|&&e| e < threshold)
                .count();
            record.recovered_columns = recovered;
            record.column_success = recovered as f64 / s as f64;
            record.completion_error = completion_error(&result.x_hat, x).ok();
            record.iterations = result.iterations;
            record.converged = result.converged;
        }
        Err(e) => record.failure = Some(e.to_string()),
    }
    record
}

fn with_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Usage(format!("cannot start {threads} worker threads: {e}")))?;
    Ok(pool.install(f))
}

/// Solves every (axis, m, method, trial) job and groups the records by cell.
fn sweep(
    plan: &Plan,
    datasets: &[Vec<Dataset>],
    bound: impl Fn(usize, Method) -> Result<(SamplingBound, Option<usize>)> + Sync,
    describe: impl Fn(&mut PhaseCell),
) -> Result<Vec<PhaseCell>> {
    let mut jobs = Vec::new();
    for (axis, row) in datasets.iter().enumerate() {
        for m_index in 0..plan.m_values.len() {
            for &method in &plan.methods {
                for (trial, data) in row.iter().enumerate() {
                    jobs.push(SolveJob {
                        axis,
                        m_index,
                        trial,
                        method,
                        data,
                    });
                }
            }
        }
    }
    // collect() keeps job order, so aggregation never depends on scheduling
    let records: Vec<TrialRecord> = jobs.par_iter().map(|j| solve_trial(plan, j)).collect();

    let mut cells = Vec::new();
    let mut chunks = records.chunks(plan.trials);
    for axis in 0..plan.axes {
        for &m in &plan.m_values {
            for &method in &plan.methods {
                let trials = chunks.next().expect("one chunk per cell").to_vec();
                let (b, bucket_rank) = bound(axis, method)?;
                let mut cell = PhaseCell {
                    axis,
                    k: None,
                    family: None,
                    bucket_rank,
                    m,
                    method,
                    rank: b.rank,
                    predicted_m0: b.m0,
                    rho0: b.rho0,
                    success: SUCCESS_PERCENTS
                        .iter()
                        .map(|&percent| QuantileFraction {
                            percent,
                            fraction: fraction_at(&trials, percent),
                        })
                        .collect(),
                    trials,
                };
                describe(&mut cell);
                cells.push(cell);
            }
        }
    }
    Ok(cells)
}

/// Unions of `k` random `r`-dimensional subspaces, swept over `m` and `k`.
/// The predicted `m0` uses the union rank bound capped at `min(N, s)`.
pub fn run_phase_uos(config: &ExperimentConfig) -> Result<PhaseGrid> {
    run_phase_uos_with_threads(config, configured_threads()?)
}

pub fn run_phase_uos_with_threads(config: &ExperimentConfig, threads: usize) -> Result<PhaseGrid> {
    let plan = Plan::new(config, ExperimentKind::PhaseUos)?;
    let c = &plan.config;
    let ks = c.k_values.clone().unwrap_or_default();
    let (n, r, pts, affine) = (
        c.n.unwrap_or(15),
        c.r.unwrap_or(3),
        c.points_per_subspace.unwrap_or(100),
        c.affine.unwrap_or(false),
    );
    with_pool(threads, || {
        let datasets = ks
            .iter()
            .enumerate()
            .map(|(a, &k)| {
                (0..plan.trials)
                    .into_par_iter()
                    .map(|t| {
                        let seed = data_seed(plan.root, a, plan.trials, t);
                        let g = gen_uos(n, k, r, pts, affine, seed)?;
                        Ok(Dataset {
                            x: g.x,
                            seed,
                            ranks: Vec::new(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let cells = sweep(
            &plan,
            &datasets,
            |a, method| {
                Ok((
                    min_samples_for_union(n, ks[a] * pts, method.degree(), ks[a], r)?,
                    None,
                ))
            },
            |cell| cell.k = Some(ks[cell.axis]),
        )?;
        Ok(PhaseGrid {
            schema_version: SCHEMA_VERSION,
            kind: ExperimentKind::PhaseUos,
            m_values: plan.m_values.clone(),
            cells,
            manifest: plan.manifest(threads, RankSource::Analytic),
        })
    })?
}

/// Random polynomial images of low-dimensional cubes, swept over `m`. Each
/// family's feature rank is measured on its generated datasets (the largest
/// over trials), and cells are ordered by that rank at the ranking degree.
pub fn run_phase_parametric(config: &ExperimentConfig) -> Result<PhaseGrid> {
    run_phase_parametric_with_threads(config, configured_threads()?)
}

pub fn run_phase_parametric_with_threads(config: &ExperimentConfig, threads: usize) -> Result<PhaseGrid> {
    let plan = Plan::new(config, ExperimentKind::PhaseParametric)?;
    let c = &plan.config;
    let families = c.families.clone().unwrap_or_default();
    let (n, s, rank_degree, rel_tol) = (
        c.n.unwrap_or(20),
        c.s.unwrap_or(300),
        c.rank_degree.unwrap_or(2),
        c.rel_tol.unwrap_or(vmc_core::lifting::DEFAULT_REL_TOL),
    );
    let mut degrees: Vec<usize> = plan.methods.iter().map(|m| m.degree()).collect();
    degrees.push(rank_degree);
    degrees.sort_unstable();
    degrees.dedup();

    with_pool(threads, || {
        let datasets = families
            .iter()
            .enumerate()
            .map(|(a, &[latent, map_degree])| {
                (0..plan.trials)
                    .into_par_iter()
                    .map(|t| {
                        let seed = data_seed(plan.root, a, plan.trials, t);
                        let g = gen_parametric(n, latent, map_degree, s, seed)?;
                        let ranks = degrees
                            .iter()
                            .map(|&d| Ok((d, lifted_rank(&g.x, d, rel_tol)?.numerical_rank)))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(Dataset { x: g.x, seed, ranks })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let family_rank = |a: usize, d: usize| -> usize {
            datasets[a]
                .iter()
                .filter_map(|ds| ds.rank_at(d))
                .max()
                .unwrap_or(1)
                .max(1)
        };
        let mut cells = sweep(
            &plan,
            &datasets,
            |a, method| {
                let b = min_samples_per_column(n, s, method.degree(), family_rank(a, method.degree()))?;
                Ok((b, Some(family_rank(a, rank_degree))))
            },
            |cell| cell.family = Some(families[cell.axis]),
        )?;
        cells.sort_by_key(|c| (c.bucket_rank, c.axis, c.m, c.method));
        Ok(PhaseGrid {
            schema_version: SCHEMA_VERSION,
            kind: ExperimentKind::PhaseParametric,
            m_values: plan.m_values.clone(),
            cells,
            manifest: plan.manifest(threads, RankSource::Empirical),
        })
    })?
}

/// Re-runs the experiment described by a manifest with its recorded thread
/// count. Fails if the embedded config no longer matches its hash.
pub fn rerun_from_manifest(manifest: &Manifest) -> Result<PhaseGrid> {
    if manifest.config.hash() != manifest.config_hash {
        return Err(HarnessError::Data(
            "manifest config does not match its recorded hash".into(),
        ));
    }
    match manifest.config.kind {
        ExperimentKind::PhaseUos => run_phase_uos_with_threads(&manifest.config, manifest.threads),
        ExperimentKind::PhaseParametric => {
            run_phase_parametric_with_threads(&manifest.config, manifest.threads)
        }
        ExperimentKind::Bench => Err(HarnessError::Config(
            "bench runs are not phase experiments".into(),
        )),
    }
}
