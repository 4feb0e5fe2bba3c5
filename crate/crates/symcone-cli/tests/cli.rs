//! Behavior of the command line front end: exit codes, error messages,
//! output formats, and seed handling.

use std::io::Write;
use std::process::Command;

use symcone::element::{ConeElement, SymElement};
use symcone::power::PowerParam;
use symcone::riesz::log_gamma_omega;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symcone"))
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = bin().args(args).output().expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

fn write_temp(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f.flush().unwrap();
    f
}

#[test]
fn sample_is_deterministic_and_positive() {
    let args = ["sample", "--r", "1", "--s", "2", "--n", "3", "--seed", "7"];
    let (out1, _, code) = run(&args);
    assert_eq!(code, 0);
    let (out2, _, _) = run(&args);
    assert_eq!(out1, out2);
    let values: Vec<f64> = out1
        .lines()
        .skip(1)
        .map(|l| l.parse::<f64>().unwrap())
        .collect();
    assert_eq!(values.len(), 3);
    assert!(values.iter().all(|v| *v > 0.0));

    let (out3, _, _) = run(&["sample", "--r", "1", "--s", "2", "--n", "3", "--seed", "8"]);
    assert_ne!(out1, out3);
}

#[test]
fn inadmissible_exponent_is_a_usage_error() {
    let (_, err, code) = run(&["sample", "--r", "2", "--s", "1,0.4", "--n", "5"]);
    assert_eq!(code, 2);
    assert!(err.contains("s[2] = 0.4 violates s_i > (i-1)/2"), "{err}");
}

#[test]
fn beta_riesz_samples_stay_in_the_unit_interval_of_the_cone() {
    let (out, _, code) = run(&[
        "sample",
        "--r",
        "2",
        "--s",
        "1.5,2.5",
        "--s-prime",
        "2,3",
        "--dist",
        "beta-riesz",
        "--n",
        "40",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    for line in out.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        let m = nalgebra::DMatrix::from_row_slice(2, 2, &[v[0], v[1], v[1], v[2]]);
        let x = SymElement::new(m).unwrap();
        let e = SymElement::identity(2);
        assert!(ConeElement::try_new(x.clone()).is_ok());
        assert!(ConeElement::try_new(&e - &x).is_ok());
    }
}

#[test]
fn beta_riesz_requires_second_exponent() {
    let (_, err, code) = run(&[
        "sample",
        "--r",
        "1",
        "--s",
        "2",
        "--dist",
        "beta-riesz",
        "--n",
        "2",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("s-prime"), "{err}");
}

#[test]
fn json_sample_lines_parse() {
    let (out, _, code) = run(&[
        "sample", "--r", "2", "--s", "1.5,2.5", "--n", "4", "--seed", "1", "--format", "json",
    ]);
    assert_eq!(code, 0);
    for line in out.lines() {
        let v: Vec<f64> = serde_json::from_str(line).unwrap();
        assert_eq!(v.len(), 3);
    }
}

#[test]
fn density_gamma_value_and_sentinel() {
    let point = write_temp("1 1.0\n");
    let (out, _, code) = run(&[
        "density",
        "--r",
        "1",
        "--s",
        "2",
        "--point",
        point.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "-1.0");

    let outside = write_temp("2\n1.0\n0.2 -0.5\n");
    let (out, _, code) = run(&[
        "density",
        "--r",
        "2",
        "--s",
        "1,2",
        "--point",
        outside.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "-inf");
}

#[test]
fn density_at_unit_point_matches_normalizing_constant() {
    // at x = e, σ = e every power term vanishes and ⟨σ, x⟩ = r
    let point = write_temp("3 1 0 1 0 0 1\n");
    let (out, _, code) = run(&[
        "density",
        "--r",
        "3",
        "--s",
        "1.5,2,3",
        "--point",
        point.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let got: f64 = out.trim().parse().unwrap();
    let s = PowerParam::new(vec![1.5, 2.0, 3.0]).unwrap();
    let expected = -log_gamma_omega(&s).unwrap() - 3.0;
    assert!((got - expected).abs() < 1e-12);
}

#[test]
fn density_rejects_malformed_point_file() {
    let bad = write_temp("2 1.0 junk 0.5\n");
    let (_, err, code) = run(&[
        "density",
        "--r",
        "2",
        "--s",
        "1,2",
        "--point",
        bad.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("junk"), "{err}");

    let short = write_temp("2 1.0\n");
    let (_, _, code) = run(&[
        "density",
        "--r",
        "2",
        "--s",
        "1,2",
        "--point",
        short.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn sigma_file_is_honored() {
    // σ = diag(2): rank-1 gamma with rate 2 at x = 1 has log pdf
    // s·log 2 − 2 + (s−1)·0 − log Γ(s) with s = 2: 2 log 2 − 2
    let sigma = write_temp("1 2.0\n");
    let point = write_temp("1 1.0\n");
    let (out, _, code) = run(&[
        "density",
        "--r",
        "1",
        "--s",
        "2",
        "--sigma",
        sigma.path().to_str().unwrap(),
        "--point",
        point.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let got: f64 = out.trim().parse().unwrap();
    assert!((got - (2.0 * 2.0_f64.ln() - 2.0)).abs() < 1e-12);

    // rank mismatch between --r and the sigma file is a usage error
    let (_, err, code) = run(&[
        "density",
        "--r",
        "2",
        "--s",
        "1,2",
        "--sigma",
        sigma.path().to_str().unwrap(),
        "--point",
        point.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("rank"), "{err}");
}

#[test]
fn verify_passes_and_fault_injection_fails() {
    let (out, _, code) = run(&["verify", "--r", "2", "--trials", "50", "--seed", "11"]);
    assert_eq!(code, 0);
    let reports: Vec<serde_json::Value> = out
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(reports.len(), 9);
    assert!(reports.iter().all(|r| r["pass"].as_bool().unwrap()));

    let (out, _, code) = run(&[
        "verify",
        "--r",
        "2",
        "--trials",
        "50",
        "--seed",
        "11",
        "--inject-fault",
    ]);
    assert_eq!(code, 1);
    let failed = out
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|r| !r["pass"].as_bool().unwrap())
        .count();
    assert!(failed >= 1);
}

#[test]
fn experiment_guards_small_n() {
    let (_, err, code) = run(&[
        "experiment",
        "--r",
        "2",
        "--s",
        "1,3",
        "--s-prime",
        "1.5,3.5",
        "--n",
        "50",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("N >= 100"), "{err}");
}

#[test]
fn experiment_emits_parsable_results() {
    let (out, _, code) = run(&[
        "experiment",
        "--mode",
        "contrast",
        "--r",
        "2",
        "--s",
        "1,3",
        "--s-prime",
        "1.5,3.5",
        "--n",
        "500",
        "--permutations",
        "99",
        "--dcor-subsample",
        "200",
        "--seed",
        "4",
    ]);
    assert_eq!(code, 0, "{out}");
    let results: Vec<serde_json::Value> = out
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(results.len(), 2);
    assert_eq!(results[0]["algorithm"], "cholesky");
    assert_eq!(results[1]["algorithm"], "quadratic");
    for r in &results {
        let p = r["permutation_p_value"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
}

#[test]
fn experiment_dump_samples_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    let (_, _, code) = run(&[
        "experiment",
        "--r",
        "2",
        "--s",
        "1,3",
        "--s-prime",
        "1.5,3.5",
        "--n",
        "120",
        "--permutations",
        "99",
        "--dcor-subsample",
        "50",
        "--seed",
        "4",
        "--dump-samples",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "u_1,u_2,u_3,v_1,v_2,v_3");
    assert_eq!(lines.count(), 120);
}

#[test]
fn seed_env_var_matches_flag() {
    let args = ["sample", "--r", "1", "--s", "2", "--n", "5"];
    let with_flag = bin().args(args).arg("--seed").arg("42").output().unwrap();
    let with_env = bin().args(args).env("SYMCONE_SEED", "42").output().unwrap();
    assert_eq!(with_flag.stdout, with_env.stdout);

    let bad_env = bin()
        .args(args)
        .env("SYMCONE_SEED", "nope")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let args = [
        "sample", "--r", "2", "--s", "1.5,2.5", "--n", "6", "--seed", "9",
    ];
    let (stdout, _, _) = run(&args);
    let (_, _, code) = run(&[
        "sample",
        "--r",
        "2",
        "--s",
        "1.5,2.5",
        "--n",
        "6",
        "--seed",
        "9",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
}
