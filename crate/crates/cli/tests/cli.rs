//! End-to-end checks of the command line driver: flags, exit codes, report
//! files and the config-file merge.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_robineig")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("robineig_cli_{name}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn eig_disk_reports_bessel_level_lambda() {
    let dir = tmp_dir("eig_disk");
    let out = run(&[
        "eig",
        "--domain",
        "disk:1",
        "--p",
        "2",
        "--beta",
        "1",
        "--h",
        "0.05",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let body = std::fs::read_to_string(dir.join("eig_report.json")).unwrap();
    let records: serde_json::Value = serde_json::from_str(&body).unwrap();
    let lambda = records[0]["lambda"].as_f64().unwrap();
    assert!((lambda - 1.5778).abs() / 1.5778 < 0.01, "lambda {lambda}");
    assert_eq!(records[0]["converged"], serde_json::Value::Bool(true));
    assert!(records[0]["eigenfunction"].as_array().unwrap().len() > 100);
}

#[test]
fn eig_beta_zero_gives_zero_lambda() {
    let dir = tmp_dir("eig_zero");
    let out = run(&[
        "eig", "--domain", "square:1", "--p", "2", "--beta", "0", "--h", "0.2", "--out",
        dir.to_str().unwrap(), "--format", "csv",
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(dir.join("eig_report.csv")).unwrap();
    let line = body.lines().nth(1).unwrap();
    assert!(line.starts_with("square:1,2,0,0,"), "row: {line}");
}

#[test]
fn malformed_beta_exits_2() {
    let out = run(&["eig", "--domain", "disk:1", "--p", "2", "--beta", "oops"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_domain_kind_exits_2() {
    let out = run(&["eig", "--domain", "blob:1", "--p", "2", "--beta", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_without_grid_exits_2() {
    let out = run(&["sweep", "--domain", "disk:1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_emits_slope_and_gap_rows() {
    let dir = tmp_dir("sweep");
    let out = run(&[
        "sweep",
        "--domain",
        "square:1",
        "--p",
        "2",
        "--beta-grid",
        "1e-3:1e2:6:log",
        "--h",
        "0.08",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let body = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    assert!(body.starts_with("domain,p,beta,lambda,slope,gap,note\n"));
    assert!(body.contains("slope_limit"));
    assert!(body.contains("slope_target"));
    assert!(body.contains("final_gap"));
    // the extrapolated slope sits near P/|Omega| = 4
    let slope_row = body.lines().find(|l| l.ends_with("slope_limit")).unwrap();
    let slope: f64 = slope_row.split(',').nth(4).unwrap().parse().unwrap();
    assert!((slope - 4.0).abs() / 4.0 < 0.02, "slope {slope}");
}

#[test]
fn mesh_roundtrips_through_file_domain() {
    let dir = tmp_dir("meshfile");
    let out = run(&[
        "mesh", "--domain", "rectangle:2,1", "--h", "0.4", "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mesh_path = dir.join("mesh_rectangle_2_1.txt");
    assert!(mesh_path.exists());
    let domain = format!("file:{}", mesh_path.display());
    let out = run(&[
        "eig", "--domain", &domain, "--p", "2", "--beta", "1", "--out",
        dir.to_str().unwrap(), "--format", "csv",
    ]);
    assert!(out.status.success());
}

#[test]
fn verify_single_record_satisfied_with_expected_margin() {
    let dir = tmp_dir("verify_one");
    let out = run(&[
        "verify",
        "--domain",
        "disk:1",
        "--p",
        "2",
        "--beta",
        "1",
        "--h",
        "0.05",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(dir.join("verify_report.json")).unwrap();
    let reports: serde_json::Value = serde_json::from_str(&body).unwrap();
    let margin = reports[0]["bounds"]["upper_torsion"]["margin"].as_f64().unwrap();
    assert!(margin > 0.0 && margin < 0.03, "near-tight margin {margin}");
    let csv = std::fs::read_to_string(dir.join("verify_report.csv")).unwrap();
    assert!(csv.starts_with(
        "domain,p,beta,lambda,upper_dirichlet,upper_torsion,trivial_min,polya_p2,hersch,all_satisfied\n"
    ));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tmp_dir("config");
    let config_path = dir.join("run.conf");
    std::fs::write(
        &config_path,
        "# experiment record\ndomain = square:1\np = 2\nbeta = 0\nh = 0.2\nformat = csv\n",
    )
    .unwrap();
    // config supplies everything
    let out = run(&[
        "eig", "--config", config_path.to_str().unwrap(), "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("eig_report.csv").exists());

    // flag overrides the config beta
    let out = run(&[
        "eig",
        "--config",
        config_path.to_str().unwrap(),
        "--beta",
        "1",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(dir.join("eig_report.csv")).unwrap();
    assert!(body.lines().nth(1).unwrap().starts_with("square:1,2,1,"), "{body}");
}

#[test]
fn non_convergence_exits_3_with_partial_results() {
    let dir = tmp_dir("exit3");
    let out = run(&[
        "eig",
        "--domain",
        "disk:1",
        "--p",
        "2",
        "--beta",
        "1",
        "--h",
        "0.1",
        "--max-iter",
        "1",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    // partial results are still written
    let body = std::fs::read_to_string(dir.join("eig_report.json")).unwrap();
    let records: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(records[0]["converged"], serde_json::Value::Bool(false));
}

#[test]
fn reports_are_written_atomically_no_tmp_left_behind() {
    let dir = tmp_dir("atomic");
    let out = run(&[
        "eig", "--domain", "square:1", "--p", "2", "--beta", "1", "--h", "0.2", "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(dir.join("eig_report.json").exists());
    assert!(!has_tmp_files(&dir));
}

fn has_tmp_files(dir: &Path) -> bool {
    std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .any(|e| e.path().extension().is_some_and(|ext| ext == "tmp"))
}

#[test]
fn identical_configs_give_byte_identical_reports() {
    let dir_a = tmp_dir("det_a");
    let dir_b = tmp_dir("det_b");
    for dir in [&dir_a, &dir_b] {
        let out = run(&[
            "eig",
            "--domain",
            "disk:1",
            "--p",
            "1.5,2",
            "--beta",
            "0.5,2",
            "--h",
            "0.1",
            "--seed",
            "7",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read(dir_a.join("eig_report.json")).unwrap();
    let b = std::fs::read(dir_b.join("eig_report.json")).unwrap();
    assert_eq!(a, b, "eig reports differ between identical runs");
}

#[test]
fn stdout_summary_is_deterministic() {
    let args = [
        "verify", "--domain", "square:1", "--p", "2", "--beta", "1,10", "--h", "0.1",
    ];
    let dir = tmp_dir("det_stdout");
    let full: Vec<String> = args
        .iter()
        .map(|s| s.to_string())
        .chain(["--out".to_string(), dir.display().to_string()])
        .collect();
    let first = stdout(&run(&full.iter().map(|s| s.as_str()).collect::<Vec<_>>()));
    let second = stdout(&run(&full.iter().map(|s| s.as_str()).collect::<Vec<_>>()));
    assert_eq!(first, second);
}
