//! End-to-end tests of the binary: exit codes, output shapes, determinism,
//! and agreement with the library on shared fixtures.

use fqn::family::{enumerate_spectrum, SpectrumOptions};
use fqn::gf::FieldCtx;
use serde_json::Value;
use std::process::{Command, Output};

fn fqn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("valid json line"))
        .collect()
}

#[test]
fn eval_single_point() {
    let out = fqn(&["--p", "13", "eval", "--chain", "4,5,10,12,11", "--x", "1", "--plus-x"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["f"], 1);
    assert_eq!(lines[0]["f_plus_x"], 2);
}

#[test]
fn eval_all_is_total() {
    let out = fqn(&["--p", "13", "eval", "--chain", "4,5,10,12,11", "--all"]);
    assert!(out.status.success());
    assert_eq!(stdout_lines(&out).len(), 13);
}

#[test]
fn eval_rejects_zero_constant() {
    let out = fqn(&["--p", "13", "eval", "--chain", "4,0,11", "--x", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("must be nonzero"), "stderr: {err}");
}

#[test]
fn decompose_worked_example() {
    let out = fqn(&["--p", "13", "decompose", "--g", "-1,2", "--poles", "0,11,9,2"]);
    assert!(out.status.success());
    let v = &stdout_lines(&out)[0];
    assert_eq!(v["chain"], serde_json::json!([4, 5, 10, 12, 11]));
    assert_eq!(v["trace"]["epsilon"], 2);
    assert_eq!(v["trace"]["c_descending"], serde_json::json!([[4, 11], [3, 12]]));

    let out = fqn(&["--p", "13", "decompose", "--g", "5,3", "--poles", "0,12,1,8,6,2"]);
    let v = &stdout_lines(&out)[0];
    assert_eq!(v["chain"], serde_json::json!([7, 2, 3, 6, 10, 5, 2]));
}

#[test]
fn decompose_rejects_bad_anchor() {
    let out = fqn(&["--p", "13", "decompose", "--g", "5,3", "--poles", "0,1,2,3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_matches_library() {
    let out = fqn(&["--p", "13", "spectrum", "--n", "2"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    let sizes: Vec<u64> = lines[1..]
        .iter()
        .map(|v| v["size"].as_u64().unwrap())
        .collect();
    assert_eq!(sizes, vec![3, 11]);

    let ctx = FieldCtx::new(13, 1).unwrap();
    let rep = enumerate_spectrum(&ctx, 2, &SpectrumOptions::default()).unwrap();
    assert_eq!(
        rep.sizes(),
        sizes.iter().map(|&s| s as usize).collect::<Vec<_>>()
    );
}

#[test]
fn spectrum_budget_exit_code() {
    let out = fqn(&["--p", "13", "--budget", "1000", "spectrum", "--n", "6"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn spectrum_sample_mode_is_reproducible() {
    let args = ["--p", "13", "--seed", "7", "spectrum", "--n", "4", "--sample", "500"];
    let out1 = fqn(&args);
    let out2 = fqn(&args);
    assert!(out1.status.success());
    assert_eq!(out1.stdout, out2.stdout, "same seed must give identical bytes");
    let lines = stdout_lines(&out1);
    assert_eq!(lines[0]["mode"], "sample");
    assert_eq!(lines[0]["seed"], 7);

    let other = fqn(&["--p", "13", "--seed", "8", "spectrum", "--n", "4", "--sample", "500"]);
    let other_lines = stdout_lines(&other);
    assert_eq!(other_lines[0]["seed"], 8);
}

#[test]
fn verify_sweep_b_emits_one_report_per_b() {
    let out = fqn(&["--p", "13", "verify", "--family", "thm7iv", "--n", "4", "--sweep-b"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 12);
    assert!(lines.iter().all(|v| v["match"] == true));
}

#[test]
fn construct_single_report() {
    let out = fqn(&["--p", "13", "construct", "--family", "cor3i", "--c", "1"]);
    assert!(out.status.success());
    let v = &stdout_lines(&out)[0];
    assert_eq!(v["match"], true);
    assert_eq!(v["observed"]["values"], serde_json::json!([0, 11, 12]));
}

#[test]
fn construct_reports_inadmissible_parameters() {
    let out = fqn(&["--p", "13", "construct", "--family", "thm7i", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("too small"), "stderr: {err}");
}

#[test]
fn extension_field_elements_roundtrip() {
    // coset family over F_25: alpha of order 2 is -1 = [4,0]
    let out = fqn(&["--p", "5", "--r", "2", "construct", "--family", "coset", "--alpha", "[4,0]", "--c", "[2,0]"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = &stdout_lines(&out)[0];
    assert_eq!(v["match"], true);
    assert_eq!(v["n"], 2);
}

#[test]
fn tsv_output_has_fixed_header() {
    let out = fqn(&["--p", "13", "--format", "tsv", "spectrum", "--n", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# q=13"));
    assert_eq!(lines.next().unwrap(), "size\ta\tb\tpoles\tchain\tcount");

    let out = fqn(&["--p", "13", "--format", "tsv", "eval", "--chain", "4,5,10,12,11", "--x", "1"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().next().unwrap(), "x\tf");
}

#[test]
fn analyze_profiles_match_construct() {
    let out = fqn(&["--p", "13", "analyze", "--g", "-1,2", "--poles", "0,11,9,2"]);
    assert!(out.status.success());
    let v = &stdout_lines(&out)[0];
    assert_eq!(v["profile"]["values"], serde_json::json!([0, 2, 8]));
    assert_eq!(v["profile"]["max_count"], 9);
    assert_eq!(v["complete_mapping"], false);
    assert_eq!(v["sum_f_plus_x"], 0);
    assert_eq!(v["chain"], serde_json::json!([4, 5, 10, 12, 11]));
}

#[test]
fn analyze_from_chain_with_poly() {
    let out = fqn(&["--p", "13", "analyze", "--chain", "7,2,3,6,10,5,2", "--poly"]);
    assert!(out.status.success());
    let v = &stdout_lines(&out)[0];
    assert_eq!(v["g"]["a"], 5);
    assert_eq!(v["g"]["b"], 3);
    assert!(v["f_poly"].as_array().unwrap().len() <= 13);
}

#[test]
fn missing_p_is_usage_error() {
    let out = fqn(&["spectrum", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
