use sha2::{Digest, Sha256};
use vmc_core::synth::gen_uos;
use vmc_harness::bench::{observed_per_column, run_bench};
use vmc_harness::io::save_matrix_csv;
use vmc_harness::{ExperimentConfig, ExperimentKind, HarnessError, Method};

fn write_uos(dir: &std::path::Path, n: usize, k: usize, r: usize, pts: usize) -> std::path::PathBuf {
    let g = gen_uos(n, k, r, pts, false, 4).unwrap();
    let path = dir.join("uos.csv");
    save_matrix_csv(&path, g.x.as_matrix()).unwrap();
    path
}

#[test]
fn zero_rate_is_exact_and_provenance_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_uos(dir.path(), 6, 2, 2, 10);
    let report = run_bench(&path, &[0.0], &Method::ALL, &ExperimentConfig::new(ExperimentKind::Bench)).unwrap();
    assert_eq!(report.rows.len(), 4);
    for row in &report.rows {
        assert_eq!(row.completion_error, 0.0, "{}", row.method);
        assert!(row.seconds >= 0.0);
    }
    let digest = hex_digest(&std::fs::read(&path).unwrap());
    assert_eq!(report.input_sha256, digest);
    assert_eq!(report.input, path);
    let csv = report.to_csv().unwrap();
    assert_eq!(csv.lines().count(), 5);
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn full_missing_rate_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_uos(dir.path(), 6, 2, 2, 10);
    let err = run_bench(&path, &[1.0], &[Method::VmcD2], &ExperimentConfig::new(ExperimentKind::Bench))
        .unwrap_err();
    assert!(matches!(err, HarnessError::Core(vmc_core::Error::Domain(_))), "{err}");
    assert_eq!(err.exit_code(), vmc_harness::error::exit::DATA);
    assert!(observed_per_column(10, -0.1).is_err());
    assert_eq!(observed_per_column(10, 0.4).unwrap(), 6);
}

#[test]
fn malformed_input_is_reported_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "1,2\n3,4\n5\n").unwrap();
    let err = run_bench(&path, &[0.0], &[Method::Lrmc], &ExperimentConfig::new(ExperimentKind::Bench)).unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
    std::fs::write(&path, "1,2\n3,\n").unwrap();
    assert!(run_bench(&path, &[0.0], &[Method::Lrmc], &ExperimentConfig::new(ExperimentKind::Bench)).is_err());
}

#[test]
fn variety_method_wins_on_high_rank_unions() {
    // k * r >= n, so the matrix itself is full rank
    let dir = tempfile::tempdir().unwrap();
    let path = write_uos(dir.path(), 6, 3, 2, 30);
    let report = run_bench(
        &path,
        &[0.4],
        &[Method::VmcD2, Method::Lrmc],
        &ExperimentConfig::new(ExperimentKind::Bench),
    )
    .unwrap();
    let vmc = report.row(Method::VmcD2, 0.4).unwrap().completion_error;
    let lrmc = report.row(Method::Lrmc, 0.4).unwrap().completion_error;
    assert!(vmc < lrmc, "vmc {vmc:e} vs lrmc {lrmc:e}");
}
