use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn coh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coh"))
        .args(args)
        .env_remove("COH_TOLERANCE_SCALE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn value_line<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(key).map(str::trim))
        .unwrap_or_else(|| panic!("no {key:?} line in {out}"))
}

#[test]
fn measure_affinity_of_uniform_qubit() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "rho1.json",
        r#"{"dim": 2, "re": [[0.5, 0.5], [0.5, 0.5]], "im": [[0, 0], [0, 0]]}"#,
    );
    let o = coh(&["measure", arg(&f), "--measure", "affinity"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(value_line(&stdout(&o), "value "), "0.292893218813");
}

#[test]
fn measure_diagonal_state_is_zero() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "diag.json",
        r#"{"dim": 2, "re": [[0.3, 0], [0, 0.7]]}"#,
    );
    let o = coh(&[
        "measure",
        arg(&f),
        "--measure",
        "alpha-affinity",
        "--alpha",
        "0.3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(value_line(&out, "value "), "0");
    assert_eq!(value_line(&out, "closest_incoherent "), "0.3 0.7");
}

#[test]
fn measure_geometric_qubit() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "plus.json",
        r#"{"dim": 2, "re": [[0.5, 0.5], [0.5, 0.5]]}"#,
    );
    let o = coh(&["measure", arg(&f), "--measure", "geometric-qubit"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(value_line(&stdout(&o), "value "), "0.5");
}

#[test]
fn measure_other_measures() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "plus.json",
        r#"{"dim": 2, "re": [[0.5, 0.5], [0.5, 0.5]]}"#,
    );
    let o = coh(&["measure", arg(&f), "--measure", "l1"]);
    assert_eq!(value_line(&stdout(&o), "value "), "1");
    let o = coh(&["measure", arg(&f), "--measure", "qcb"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("argmax_alpha"));
}

#[test]
fn measure_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "bad.json",
        r#"{"dim": 2, "re": [[0.6, 0], [0, 0.6]]}"#,
    );
    let o = coh(&["measure", arg(&f), "--measure", "l1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trace"), "{}", stderr(&o));

    let f = write(
        &dir,
        "nonherm.json",
        r#"{"dim": 2, "re": [[0.5, 0.3], [0.1, 0.5]]}"#,
    );
    let o = coh(&["measure", arg(&f), "--measure", "l1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Hermitian"));

    let f = write(&dir, "junk.json", "{not json");
    assert_eq!(
        coh(&["measure", arg(&f), "--measure", "l1"]).status.code(),
        Some(2)
    );

    let good = write(&dir, "good.json", r#"{"dim": 1, "re": [[1]]}"#);
    let o = coh(&[
        "measure",
        arg(&good),
        "--measure",
        "alpha-affinity",
        "--alpha",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha"));
    assert_eq!(
        coh(&["measure", arg(&good), "--measure", "nope"])
            .status
            .code(),
        Some(2)
    );
}

const ZERO_PLUS: &str = r#"{"probs": [0.5, 0.5], "states": [
    {"re": [1, 0], "im": [0, 0]},
    {"re": [0.7071067811865476, 0.7071067811865476], "im": [0, 0]}]}"#;

#[test]
fn qsd_strategies() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "zp.json", ZERO_PLUS);
    let h = coh(&["qsd", arg(&f), "--strategy", "helstrom"]);
    assert!(h.status.success(), "{}", stderr(&h));
    let h_err = value_line(&stdout(&h), "error ").to_string();
    assert_eq!(h_err, "0.146446609407");
    assert!(stdout(&h).contains("povm_element 1"));

    let l = coh(&["qsd", arg(&f), "--strategy", "lsm"]);
    assert_eq!(value_line(&stdout(&l), "error "), h_err);

    let s = coh(&["qsd", arg(&f), "--strategy", "symmetric-optimal"]);
    assert!(s.status.success(), "{}", stderr(&s));
    assert_eq!(value_line(&stdout(&s), "error "), h_err);
}

#[test]
fn qsd_orthonormal_and_errors() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "basis.json",
        r#"{"probs": [0.2, 0.3, 0.5], "states": [{"re": [1, 0, 0]}, {"re": [0, 1, 0]}, {"re": [0, 0, 1]}]}"#,
    );
    let o = coh(&["qsd", arg(&f), "--strategy", "lsm"]);
    assert_eq!(value_line(&stdout(&o), "error "), "0");
    assert_eq!(
        coh(&["qsd", arg(&f), "--strategy", "helstrom"])
            .status
            .code(),
        Some(2)
    );
    let skewed = r#"{"probs": [0.3, 0.7], "states": [{"re": [1, 0]}, {"re": [0.6, 0.8]}]}"#;
    let g = write(&dir, "skewed.json", skewed);
    let o = coh(&["qsd", arg(&g), "--strategy", "symmetric-optimal"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("equal priors"));
}

#[test]
fn duality_single_models() {
    let dir = TempDir::new().unwrap();
    let ortho = r#"{"amplitudes": [{"re": 0.6, "im": 0}, {"re": 0, "im": 0.8}],
                    "detectors": [{"re": [1, 0]}, {"re": [0, 1]}]}"#;
    let f = write(&dir, "ortho.json", ortho);
    let o = coh(&["duality", arg(&f)]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(value_line(&out, "coherence "), "0");
    assert_eq!(value_line(&out, "distinguishability "), "1");
    assert!(value_line(&out, "verdict ").starts_with("VERIFIED"));

    // nearly pure and strongly coherent over four paths
    let (a, b) = (0.9 * 0.25 + 0.025, 0.9 * 0.25);
    let rows: Vec<String> = (0..4)
        .map(|i| {
            let r: Vec<String> = (0..4)
                .map(|j| if i == j { a } else { b }.to_string())
                .collect();
            format!("[{}]", r.join(", "))
        })
        .collect();
    let mixed = format!(
        r#"{{"rho": {{"dim": 4, "re": [{}]}}, "detectors": [{{"re": [1, 0]}}, {{"re": [0, 1]}}, {{"re": [1, 0]}}, {{"re": [0, 1]}}]}}"#,
        rows.join(", ")
    );
    let f = write(&dir, "mixed.json", &mixed);
    let o = coh(&["duality", arg(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(value_line(&stdout(&o), "verdict ").starts_with("UNVERIFIED"));
}

#[test]
fn duality_sweep_rows_sum_to_one() {
    let dir = TempDir::new().unwrap();
    let model = r#"{"amplitudes": [{"re": 0.5}, {"re": 0.5}, {"re": 0.5}, {"re": 0, "im": 0.5}],
                    "detectors": [{"re": [1, 0]}, {"re": [0, 1]}, {"re": [1, 0]}, {"re": [0, 1]}]}"#;
    let f = write(&dir, "pure.json", model);
    let o = coh(&["duality", arg(&f), "--sweep", "overlap:0:1:0.01"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("overlap,coherence,distinguishability"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[100][0], 1.0);
    for r in &rows {
        assert!((r[1] + r[2] - 1.0).abs() <= 1e-9, "{r:?}");
    }
    assert_eq!(
        coh(&["duality", arg(&f), "--sweep", "visibility:0:1:0.1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        coh(&["duality", arg(&f), "--sweep", "overlap:0:2:0.1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_suites() {
    let o = coh(&[
        "verify", "--suite", "theorem2", "--seed", "42", "--trials", "500",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let out = stdout(&o);
    let v: f64 = value_line(&out, "theorem2")
        .split_whitespace()
        .nth(5)
        .unwrap()
        .parse()
        .unwrap();
    assert!(v <= 1e-9);

    let o = coh(&[
        "verify", "--suite", "axioms", "--seed", "5", "--trials", "0",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("trials 0 max_violation 0.000e0"));

    assert_eq!(coh(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn verify_all_is_deterministic() {
    let a = coh(&["verify", "--suite", "all", "--seed", "7", "--trials", "200"]);
    assert!(a.status.success(), "{}", stdout(&a));
    assert_eq!(stdout(&a).lines().count(), 8);
    let b = coh(&["verify", "--suite", "all", "--seed", "7", "--trials", "200"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn verify_failures_exit_one() {
    let o = Command::new(env!("CARGO_BIN_EXE_coh"))
        .args([
            "verify", "--suite", "theorem2", "--seed", "1", "--trials", "20",
        ])
        .env("COH_TOLERANCE_SCALE", "1e-30")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn random_instances_are_valid_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let s1 = dir.path().join("s1.json");
    let s2 = dir.path().join("s2.json");
    assert!(coh(&[
        "random",
        "--kind",
        "state",
        "--dim",
        "3",
        "--rank",
        "3",
        "--seed",
        "1",
        "--out",
        arg(&s1)
    ])
    .status
    .success());
    assert!(coh(&[
        "random",
        "--kind",
        "state",
        "--dim",
        "3",
        "--rank",
        "3",
        "--seed",
        "1",
        "--out",
        arg(&s2)
    ])
    .status
    .success());
    assert_eq!(fs::read(&s1).unwrap(), fs::read(&s2).unwrap());
    coh::io::read_state(&s1).unwrap();

    let e = dir.path().join("e.json");
    assert!(coh(&[
        "random",
        "--kind",
        "ensemble",
        "--dim",
        "4",
        "--rank",
        "4",
        "--seed",
        "2",
        "--out",
        arg(&e)
    ])
    .status
    .success());
    let ens = coh::io::read_ensemble(&e).unwrap();
    assert_eq!(ens.len(), 4);
    let gram = coh::linalg::eig_hermitian(&ens.overlaps()).unwrap();
    assert!(gram.min_eigenvalue() > 1e-8);

    let m = dir.path().join("m.json");
    assert!(coh(&[
        "random",
        "--kind",
        "model",
        "--dim",
        "2",
        "--seed",
        "3",
        "--out",
        arg(&m)
    ])
    .status
    .success());
    assert!(coh::io::read_model(&m).unwrap().is_pure());
    let o = coh(&["duality", arg(&m)]);
    assert!(value_line(&stdout(&o), "verdict ").starts_with("VERIFIED"));

    let bad = coh(&[
        "random",
        "--kind",
        "state",
        "--dim",
        "2",
        "--rank",
        "3",
        "--seed",
        "1",
        "--out",
        arg(&s1),
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("rank"));
    let bad = coh(&[
        "random",
        "--kind",
        "widget",
        "--dim",
        "2",
        "--seed",
        "1",
        "--out",
        arg(&s1),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}
