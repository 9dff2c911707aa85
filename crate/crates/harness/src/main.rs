use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use vmc_core::lifting::lifted_rank;
use vmc_core::sampling::{min_samples_for_union, min_samples_per_column, SamplingBound};
use vmc_core::solver::vmc_complete;
use vmc_core::synth::{apply_mask, sample_mask, VarietySpec, CIRCLE, PARABOLA};
use vmc_core::IrlsConfig;
use vmc_harness::error::exit;
use vmc_harness::io::{load_mask_csv, load_matrix_csv, save_mask_csv, save_matrix_csv, save_observed_csv};
use vmc_harness::phase::{rerun_from_manifest, run_phase_parametric, run_phase_uos, PhaseGrid};
use vmc_harness::{bench, ExperimentConfig, HarnessError, Method, Result};

/// Variety-based matrix completion tools.
#[derive(Parser)]
#[command(name = "vmc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset (and optionally a mask) as CSV.
    Gen(GenArgs),
    /// Numerical rank of the lifted kernel matrix of a CSV matrix.
    Rank {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value_t = vmc_core::lifting::DEFAULT_REL_TOL)]
        rel_tol: f64,
    },
    /// Minimal observed entries per column.
    Bound(BoundArgs),
    /// Complete a matrix with missing entries.
    Complete(CompleteArgs),
    /// Phase transition over unions of subspaces.
    PhaseUos(PhaseArgs),
    /// Phase transition over parametric varieties.
    PhaseParametric(PhaseArgs),
    /// Re-run a phase experiment from the manifest in a saved grid.
    Rerun {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Completion error per method and missing rate on a complete matrix.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Uos,
    Parametric,
    Circle,
    Parabola,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 15)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    r: usize,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long)]
    affine: bool,
    #[arg(long)]
    orthogonal: bool,
    #[arg(long, default_value_t = 1)]
    latent_dim: usize,
    #[arg(long, default_value_t = 1)]
    map_degree: usize,
    /// Number of points for parametric and conic data.
    #[arg(long, default_value_t = 300)]
    s: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Observed entries per column; writes a mask when given.
    #[arg(long, requires = "mask_out")]
    m: Option<usize>,
    #[arg(long)]
    mask_out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    mask_seed: u64,
    /// Also write the masked matrix with empty cells for hidden entries.
    #[arg(long, requires = "m")]
    observed_out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    degree: usize,
    #[arg(long, conflicts_with_all = ["k", "r"], required_unless_present_all = ["k", "r"])]
    rank: Option<usize>,
    #[arg(long, requires = "r")]
    k: Option<usize>,
    #[arg(long, requires = "k")]
    r: Option<usize>,
}

#[derive(Args)]
struct CompleteArgs {
    /// Matrix CSV; empty or NaN cells are missing.
    #[arg(long)]
    input: PathBuf,
    /// Mask CSV selecting the observed entries of a complete input.
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    degree: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
    /// Write one JSON object per iteration to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.2, 0.4, 0.6])]
    rates: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [Method::VmcD2, Method::Lrmc])]
    methods: Vec<Method>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn print_text(text: &str) {
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_json(value: &serde_json::Value) {
    print_text(&serde_json::to_string_pretty(value).expect("json value serializes"));
}

fn bound_json(b: &SamplingBound) -> serde_json::Value {
    json!({
        "n": b.n, "s": b.s, "degree": b.d, "rank": b.rank, "feature_dim": b.feature_dim,
        "m0": b.m0, "observed_features": b.observed_features, "rho0": b.rho0,
    })
}

fn gen(a: GenArgs) -> Result<()> {
    let spec = match a.family {
        Family::Uos => VarietySpec::UnionOfSubspaces {
            n: a.n,
            k: a.k,
            r: a.r,
            points_per_subspace: a.points,
            affine: a.affine,
            orthogonal: a.orthogonal,
        },
        Family::Parametric => VarietySpec::Parametric {
            n: a.n,
            latent_dim: a.latent_dim,
            map_degree: a.map_degree,
            s: a.s,
        },
        Family::Circle | Family::Parabola => VarietySpec::Conic {
            coefficients: if matches!(a.family, Family::Circle) { CIRCLE } else { PARABOLA },
            s: a.s,
            window: (-1.0, 1.0),
        },
    };
    let g = spec.generate(a.seed)?;
    save_matrix_csv(&a.out, g.x.as_matrix())?;
    if let (Some(m), Some(mask_out)) = (a.m, a.mask_out.as_ref()) {
        let mask = sample_mask(g.x.nrows(), g.x.ncols(), m, a.mask_seed)?;
        save_mask_csv(mask_out, &mask)?;
        if let Some(path) = &a.observed_out {
            save_observed_csv(path, &apply_mask(&g.x, &mask)?)?;
        }
    }
    print_json(&json!({ "rows": g.x.nrows(), "cols": g.x.ncols(), "seed": a.seed }));
    Ok(())
}

fn complete(a: CompleteArgs) -> Result<()> {
    let mut observed = load_matrix_csv(&a.input)?;
    if let Some(mask_path) = &a.mask {
        let mask = load_mask_csv(mask_path, observed.nrows(), observed.ncols())?;
        observed = observed.restrict(&mask)?;
    }
    let config = IrlsConfig {
        d: a.degree,
        p: a.p,
        max_iter: a.max_iter,
        tol: a.tol,
        record_trace: a.trace.is_some(),
        ..IrlsConfig::default()
    };
    let result = vmc_complete(&observed, &config)?;
    save_matrix_csv(&a.out, result.x_hat.as_matrix())?;
    if let (Some(path), Some(trace)) = (&a.trace, &result.trace) {
        let mut text = Vec::new();
        for t in trace {
            let line = json!({
                "iteration": t.iteration, "gamma": t.gamma,
                "objective": t.objective, "rel_change": t.rel_change,
            });
            writeln!(text, "{line}").expect("writing to memory");
        }
        std::fs::write(path, text).map_err(|e| HarnessError::Io { path: path.clone(), source: e })?;
    }
    print_json(&json!({
        "iterations": result.iterations,
        "converged": result.converged,
        "gamma0": result.gamma0,
        "final_gamma": result.final_gamma,
        "observed": observed.mask().len(),
        "missing": observed.mask().hidden_len(),
    }));
    Ok(())
}

fn finish_grid(grid: PhaseGrid, out_dir: Option<PathBuf>, stem: &str) -> Result<()> {
    let dir = out_dir
        .or_else(|| grid.manifest.config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    grid.save(&dir, stem)?;
    let cells = grid.cells.len();
    let failures: usize = grid
        .cells
        .iter()
        .map(|c| c.trials.iter().filter(|t| t.failure.is_some()).count())
        .sum();
    print_json(&json!({
        "json": dir.join(format!("{stem}.json")),
        "csv": dir.join(format!("{stem}.csv")),
        "cells": cells,
        "failed_trials": failures,
        "config_hash": grid.manifest.config_hash,
    }));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Rank { input, degree, rel_tol } => {
            let x = vmc_harness::io::load_complete_csv(&input)?;
            let report = lifted_rank(&x, degree, rel_tol)?;
            print_json(&json!({
                "numerical_rank": report.numerical_rank,
                "feature_dim": report.feature_dim,
                "s": report.s,
                "lambda_max": report.lambda_max(),
                "rel_tol": report.rel_tol,
            }));
            Ok(())
        }
        Command::Bound(a) => {
            let b = match (a.rank, a.k, a.r) {
                (Some(rank), _, _) => min_samples_per_column(a.n, a.s, a.degree, rank)?,
                (None, Some(k), Some(r)) => min_samples_for_union(a.n, a.s, a.degree, k, r)?,
                _ => return Err(HarnessError::Usage("give --rank or both --k and --r".into())),
            };
            print_json(&bound_json(&b));
            Ok(())
        }
        Command::Complete(a) => complete(a),
        Command::PhaseUos(a) => {
            let config = ExperimentConfig::load(&a.config)?;
            finish_grid(run_phase_uos(&config)?, a.out_dir, "phase_uos")
        }
        Command::PhaseParametric(a) => {
            let config = ExperimentConfig::load(&a.config)?;
            finish_grid(run_phase_parametric(&config)?, a.out_dir, "phase_parametric")
        }
        Command::Rerun { grid, out_dir } => {
            let text = std::fs::read_to_string(&grid).map_err(|e| HarnessError::Io { path: grid.clone(), source: e })?;
            let saved = PhaseGrid::from_json(&text)?;
            let fresh = rerun_from_manifest(&saved.manifest)?;
            let identical = fresh == saved;
            let stem = format!("{}_rerun", grid.file_stem().and_then(|s| s.to_str()).unwrap_or("grid"));
            let dir = out_dir.unwrap_or_else(|| grid.parent().map(Path::to_path_buf).unwrap_or_default());
            fresh.save(&dir, &stem)?;
            print_json(&json!({ "identical": identical }));
            if identical {
                Ok(())
            } else {
                Err(HarnessError::Data("rerun differs from the saved grid".into()))
            }
        }
        Command::Bench(a) => {
            let mut config = ExperimentConfig::new(vmc_harness::ExperimentKind::Bench);
            config.root_seed = a.seed;
            config.max_iter = a.max_iter;
            config.tol = a.tol;
            let report = bench::run_bench(&a.input, &a.rates, &a.methods, &config)?;
            if let Some(dir) = &a.out_dir {
                report.save(dir, "bench")?;
            }
            print_text(&report.to_json()?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(exit::SUCCESS as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
