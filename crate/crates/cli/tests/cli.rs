use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qadapt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qadapt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn toy_hamiltonian_gives_single_row_trace() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.txt");
    fs::write(&h, "nqubits 1\n-1.0 Z0\n").unwrap();
    let out = dir.path().join("run");
    let o = qadapt(&[
        "run-adapt",
        "--input",
        s(&h),
        "--pool",
        "v",
        "--output",
        s(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(o.stdout.is_empty());
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("0,0,,,-1.0000000000000000e0,"));
    let cfg = fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(cfg.contains("eps = 0.001"));
    assert!(cfg.contains("pool = v"));
}

#[test]
fn identical_configs_give_identical_traces() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = qadapt(&[
            "random-hamiltonian",
            "--n",
            "3",
            "--seed",
            "11",
            "--run",
            "--pool",
            "random",
            "--fraction",
            "1.0",
            "--eps",
            "1e-6",
            "--output",
            s(&out),
        ]);
        assert!(matches!(o.status.code(), Some(0 | 2 | 3)));
        (
            fs::read(out.join("trace.csv")).unwrap(),
            fs::read(out.join("hamiltonian.txt")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn random_hamiltonian_coefficients_are_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let o = qadapt(&[
        "random-hamiltonian",
        "--n",
        "3",
        "--seed",
        "5",
        "--output",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("hamiltonian.txt")).unwrap();
    let mut count = 0;
    for line in text.lines().skip(1) {
        let c: f64 = line.split_whitespace().next().unwrap().parse().unwrap();
        assert!((-2.0..=2.0).contains(&c));
        assert!(line.matches('Y').count() % 2 == 0);
        count += 1;
    }
    assert_eq!(count, 35);
}

#[test]
fn h4_qubit_pool_reaches_fci() {
    let dir = tempfile::tempdir().unwrap();
    let o = qadapt(&[
        "run-adapt",
        "--input",
        s(&data("h4_sto3g_r1.5.fcidump")),
        "--pool",
        "qubit",
        "--eps",
        "1e-6",
        "--max-iter",
        "40",
        "--output",
        s(dir.path()),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    let err: f64 = last.split(',').nth(5).unwrap().parse().unwrap();
    assert!(err.abs() < 1e-6);
}

#[test]
fn max_iterations_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = qadapt(&[
        "run-adapt",
        "--input",
        s(&data("h4_sto3g_r1.5.fcidump")),
        "--pool",
        "qubit",
        "--max-iter",
        "2",
        "--output",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_input_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("bad.txt");
    fs::write(&h, "nqubits 2\n1.0 Q0\n").unwrap();
    let o = qadapt(&["run-adapt", "--input", s(&h), "--output", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn check_pool_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = qadapt(&[
        "check-pool",
        "--family",
        "v",
        "--n",
        "5",
        "--output",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("check_pool.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",31,31,true,false"));

    let pool = dir.path().join("one.pool");
    fs::write(&pool, "nqubits 2\ni Y0\n").unwrap();
    let spec = format!("file:{}", s(&pool));
    let o = qadapt(&["check-pool", "--pool", &spec, "--output", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("check_pool.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",false,false"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("incomplete"));
}

#[test]
fn pool_scan_two_qubits() {
    let dir = tempfile::tempdir().unwrap();
    let o = qadapt(&[
        "pool-scan",
        "--n",
        "2",
        "--sizes",
        "1..6",
        "--trials",
        "30",
        "--seed",
        "3",
        "--output",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("pool_scan.csv")).unwrap();
    let fractions: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(fractions.len(), 6);
    assert_eq!(fractions[0], 0.0);
    assert!(fractions[1] > 0.0 && fractions[1] < 1.0);
    assert!(fractions[2..].iter().all(|&f| f == 1.0));
}

#[test]
fn pool_scan_guards() {
    let dir = tempfile::tempdir().unwrap();
    let o = qadapt(&[
        "pool-scan",
        "--n",
        "2",
        "--trials",
        "0",
        "--output",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = qadapt(&["pool-scan", "--n", "8", "--output", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn estimate_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = qadapt(&[
        "estimate",
        "--m",
        "4",
        "--n-params",
        "11",
        "--output",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("estimate.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 2);
    let per: f64 = rows[0][8].parse().unwrap();
    let total: f64 = rows[0][9].parse().unwrap();
    assert!((per - 175.0).abs() <= 1.0);
    assert!((total - 1928.41).abs() < 0.01);
    assert_eq!(rows[0][2..5], rows[1][2..5]);

    let big = dir.path().join("big");
    let o = qadapt(&["estimate", "--m", "20", "--output", s(&big)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!big.join("counts.csv").exists());
}

#[test]
fn diag_sector_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = qadapt(&[
        "diag",
        "--input",
        s(&data("h4_sto3g_r1.5.fcidump")),
        "--electrons",
        "4",
        "--output",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("diag.csv")).unwrap();
    let e: f64 = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert!((e + 1.9961503255188093).abs() < 1e-9);
}
