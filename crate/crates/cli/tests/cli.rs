//! Black-box tests of the binary: formats, exit codes, seed resolution.

use std::process::{Command, Output};

fn supercurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supercurv"))
        .args(args)
        .env_remove("SUPERCURV_SEED")
        .output()
        .expect("run supercurv")
}

#[test]
fn json_output_is_well_formed_and_passing() {
    let out = supercurv(&["curvature", "--n", "2", "--samples", "3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["version"].is_string());
    assert_eq!(v["config"]["command"], "curvature");
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert_eq!(c["verdict"], "pass");
        assert!(c["tolerance"].as_f64().unwrap() > 0.0);
        assert!(!c["samples"].as_array().unwrap().is_empty());
    }
}

#[test]
fn csv_rows_match_json_samples() {
    let args = ["sphere", "--n", "3", "--samples", "4"];
    let json = supercurv(&[&args[..], &["--format", "json"][..]].concat());
    let csv_out = supercurv(&[&args[..], &["--format", "csv"][..]].concat());
    assert!(json.status.success() && csv_out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let sample_count: usize = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["samples"].as_array().unwrap().len())
        .sum();
    let mut rdr = csv::Reader::from_reader(&csv_out.stdout[..]);
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "check_name",
            "N",
            "k",
            "point_re",
            "point_im",
            "residual_max",
            "K_body_re",
            "K_expected",
            "K_abs_err",
            "soul_max",
            "verdict"
        ]
    );
    assert_eq!(rdr.records().count(), sample_count);
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join("supercurv_cli_test.json");
    let out = supercurv(&[
        "algebra",
        "--samples",
        "3",
        "--format",
        "json",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["checks"][0]["name"], "operator_algebra");
    std::fs::remove_file(&path).ok();
}

#[test]
fn seed_env_fallback_matches_flag() {
    let flagged = supercurv(&["sphere", "--n", "2", "--samples", "2", "--seed", "9", "--format", "json"]);
    let env_run = Command::new(env!("CARGO_BIN_EXE_supercurv"))
        .args(["sphere", "--n", "2", "--samples", "2", "--format", "json"])
        .env("SUPERCURV_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(flagged.stdout, env_run.stdout);
    // explicit flag wins over the environment
    let both = Command::new(env!("CARGO_BIN_EXE_supercurv"))
        .args(["sphere", "--n", "2", "--samples", "2", "--seed", "11", "--format", "json"])
        .env("SUPERCURV_SEED", "9")
        .output()
        .unwrap();
    assert_ne!(flagged.stdout, both.stdout);
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["curvature", "--n", "3", "--k", "7"][..],
        &["curvature", "--jet-order", "1"][..],
        &["g2n", "--n", "2"][..],
        &["curvature", "--curve", "gsv", "--xi", "not-a-number"][..],
    ] {
        let out = supercurv(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!out.stderr.is_empty(), "args {args:?} printed no error");
    }
    let bad_env = Command::new(env!("CARGO_BIN_EXE_supercurv"))
        .args(["algebra", "--samples", "2"])
        .env("SUPERCURV_SEED", "not-a-seed")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let out = supercurv(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn complex_and_poly_flags_parse() {
    let out = supercurv(&[
        "curvature",
        "--n",
        "3",
        "--k",
        "1",
        "--curve",
        "gsv",
        "--xi",
        "0.5-0.25i,1i,2",
        "--samples",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
