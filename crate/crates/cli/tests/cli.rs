use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coherence-forge"))
        .args(args)
        .env_remove("COHERENCE_FORGE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stdout_text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn measures_on_noisy_cbit() {
    let out = forge(&[
        "measures",
        "--state",
        &fixture("noisy_cbit_06.json"),
        "--ham",
        &fixture("qubit_levels.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["F"].as_f64().unwrap() - 0.36).abs() < 1e-12);
    assert!((v["P"].as_f64().unwrap() - 0.5625).abs() < 1e-12);
    assert!(v["variance_if_pure"].is_null());
    assert_eq!(v["support_commutes"], Value::Bool(true));
}

#[test]
fn pure_state_has_infinite_purity() {
    let out = forge(&[
        "measures",
        "--state",
        &fixture("cbit.json"),
        "--ham",
        &fixture("qubit_levels.json"),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["P"], "inf");
    assert!((v["variance_if_pure"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn malformed_json_is_an_input_error() {
    let out = forge(&[
        "measures",
        "--state",
        &fixture("malformed.json"),
        "--ham",
        &fixture("qubit_levels.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema error"));
}

#[test]
fn missing_file_and_bad_flags_exit_one() {
    let out = forge(&[
        "measures",
        "--state",
        "/nonexistent.json",
        "--ham",
        &fixture("qubit_levels.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(forge(&["nope"]).status.code(), Some(1));
    assert_eq!(
        forge(&["qubit-bound", "--lambda", "1.5", "--n", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(forge(&["--help"]).status.code(), Some(0));
}

#[test]
fn dense_hamiltonian_is_snapped_with_warning() {
    let out = forge(&[
        "measures",
        "--state",
        &fixture("cbit.json"),
        "--ham",
        &fixture("dense_qubit.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("snapped"));
    assert!((stdout_json(&out)["variance_if_pure"].as_f64().unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn purify_matches_qfi() {
    let out = forge(&[
        "purify",
        "--state",
        &fixture("noisy_cbit_06.json"),
        "--ham",
        &fixture("qubit_levels.json"),
        "--ensemble",
    ]);
    let v = stdout_json(&out);
    let tv = v["total_variance"].as_f64().unwrap();
    assert!((tv - 0.09).abs() < 1e-12);
    assert!((v["qfi_over_4"].as_f64().unwrap() - tv).abs() < 1e-12);
    assert!(v["kkt_residual"].as_f64().unwrap() < 1e-10);
    assert!(!v["ensemble"].as_array().unwrap().is_empty());
}

#[test]
fn dist_csv_and_summary() {
    let out = forge(&[
        "dist",
        "--state",
        &fixture("trit.json"),
        "--ham",
        &fixture("trit_levels.json"),
        "--copies",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_text(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,p"));
    let rows: Vec<(i64, f64)> = lines
        .map(|l| {
            let (n, p) = l.split_once(',').unwrap();
            (n.parse().unwrap(), p.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 7);
    // p(3) for three copies of uniform {0,1,2} is 7/27.
    assert!((rows[3].1 - 7.0 / 27.0).abs() < 1e-15);
    let summary: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(summary["L"], 1);
    assert!((summary["period"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!(summary["tv_to_tp"].as_f64().unwrap() <= summary["barbour_bound"].as_f64().unwrap());
}

#[test]
fn convert_csv_schema() {
    let out = forge(&[
        "convert",
        "--in",
        &fixture("trit.json"),
        &fixture("trit_levels.json"),
        "--out",
        &fixture("cbit.json"),
        &fixture("qubit_levels.json"),
        "--rate",
        "1.5",
        "--copies",
        "8,32",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_text(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,k,tv_error,fidelity_floor,m_out");
    assert_eq!(lines.len(), 3);
    for l in &lines[1..] {
        let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[3] - (1.0 - 2.0 * f[2]).max(0.0)).abs() < 1e-15);
        assert!(f[4] >= (1.5 * f[0]).ceil());
    }
}

#[test]
fn distill_reports_bounds() {
    let out = forge(&[
        "distill",
        "--in",
        &fixture("noisy_cbit_06.json"),
        &fixture("qubit_levels.json"),
        "--target",
        &fixture("cbit.json"),
        &fixture("qubit_levels.json"),
        "--copies",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let f = v["fidelity"].as_f64().unwrap();
    assert!(v["gap"].as_f64().unwrap() < 1e-7);
    assert!(1.0 - f >= v["bound_exact"].as_f64().unwrap() - 1e-7);
}

#[test]
fn qubit_bound_csv() {
    let out = forge(&["qubit-bound", "--lambda", "0.5", "--n", "5"]);
    let text = stdout_text(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,exact,asymptotic,cirac");
    assert_eq!(lines.len(), 6);
    // n = 1 gives (1 − λ)/2.
    assert_eq!(
        lines[1].split(',').nth(1).unwrap().parse::<f64>().unwrap(),
        0.25
    );
}

#[test]
fn proptest_is_seeded() {
    let run = |seed: &str| {
        stdout_text(&forge(&[
            "proptest",
            "--measure",
            "P",
            "--trials",
            "25",
            "--seed",
            seed,
        ]))
    };
    let a = run("11");
    assert_eq!(a, run("11"));
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["seed"], 11);
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_coherence-forge"))
        .args(["proptest", "--measure", "F", "--trials", "3"])
        .env("COHERENCE_FORGE_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["seed"], 99);
    let out = Command::new(env!("CARGO_BIN_EXE_coherence-forge"))
        .args(["proptest", "--measure", "F", "--trials", "3", "--seed", "5"])
        .env("COHERENCE_FORGE_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["seed"], 5);
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("cf-cli-{}.csv", std::process::id()));
    let out = forge(&[
        "qubit-bound",
        "--lambda",
        "0.6",
        "--n",
        "2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("n,exact,asymptotic,cirac\n"));
}
