use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn folid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folid"))
        .args(args)
        .env("FOLID_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn check_proof_pass_as_json() {
    let sig = fixture("nat.folid");
    let o = folid(&["check-proof", &fixture("even_odd.proof"), "--sig", &sig, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["verdict"], "PASS");
}

#[test]
fn check_proof_fail_is_exit_one() {
    let sig = fixture("nat.folid");
    let o = folid(&[
        "check-proof",
        &fixture("nat_refl.proof"),
        &fixture("no_progress.proof"),
        "--sig",
        &sig,
    ]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].ends_with("nat_refl.proof: PASS"));
    assert!(lines[1].ends_with("no_progress.proof: FAIL"));
    assert!(o.stderr.is_empty());
}

#[test]
fn check_proof_reports_local_violations() {
    let o = folid(&[
        "check-proof",
        &fixture("allr_fresh.proof"),
        "--sig",
        &fixture("nat.folid"),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["results"][0]["local"][0]["violation"], "FreshnessViolation");
}

#[test]
fn output_is_deterministic() {
    let sig = fixture("nat.folid");
    let args = [
        "check-proof",
        &fixture("mixed_loop.proof"),
        &fixture("two.proof"),
        "--sig",
        &sig,
        "--json",
    ];
    assert_eq!(folid(&args).stdout, folid(&args).stdout);
}

#[test]
fn json_keys_are_sorted() {
    let o = folid(&[
        "check-proof",
        &fixture("bad_cut.proof"),
        "--sig",
        &fixture("nat.folid"),
        "--json",
    ]);
    let text = stdout(&o);
    let first = text.find("\"results\"").unwrap();
    let last = text.rfind("\"verdict\"").unwrap();
    assert!(first < last);
    assert!(text.find("\"file\"").unwrap() < text.find("\"gtc\"").unwrap());
}

#[test]
fn lfp_of_clamp() {
    let o = folid(&[
        "lfp",
        "--sig",
        &fixture("nat.folid"),
        "--model",
        &fixture("clamp.model"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "N = {0,1,2}"));
}

#[test]
fn unfold_zero_is_false() {
    let o = folid(&["unfold", "--sig", &fixture("nat.folid"), "--pred", "N", "--k", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn unfold_checked_against_a_model() {
    let o = folid(&[
        "unfold",
        "--sig",
        &fixture("nat.folid"),
        "--pred",
        "E",
        "--model",
        &fixture("junk.model"),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["violations"], serde_json::json!([]));
}

#[test]
fn standard_check_exit_codes() {
    let sig = fixture("nat.folid");
    assert_eq!(
        folid(&["standard-check", "--sig", &sig, "--model", &fixture("clamp.model")])
            .status
            .code(),
        Some(0)
    );
    let o = folid(&[
        "standard-check",
        "--sig",
        &sig,
        "--model",
        &fixture("junk.model"),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["differences"][0]["extra"], serde_json::json!([[2]]));
}

#[test]
fn eval_formula_and_sequent() {
    let sig = fixture("nat.folid");
    let clamp = fixture("clamp.model");
    let o = folid(&[
        "eval",
        "--sig",
        &sig,
        "--model",
        &clamp,
        "--formula",
        "O(x)",
        "--assign",
        "x=1",
    ]);
    assert_eq!(stdout(&o).trim(), "true");
    let o = folid(&[
        "eval",
        "--sig",
        &sig,
        "--model",
        &fixture("fixed.model"),
        "--sequent",
        "|- N(x)",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["valid"], false);
}

#[test]
fn termmodel_export_round_trips() {
    let dir = std::env::temp_dir().join(format!("folid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("tm.model");
    let o = folid(&[
        "termmodel",
        "--sig",
        &fixture("nat.folid"),
        "--model",
        &fixture("cycle2.model"),
        "--budget",
        "3",
        "--export",
        out.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
    assert_eq!(v["standard"], true);
    let exported: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(exported, v["model"]);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn code_round_trip_and_search() {
    let sig = fixture("nat.folid");
    let o = folid(&["code", "--sig", &sig, "--formula", "forall x. N(x) -> E(s(x))"]);
    let code = stdout(&o).trim().to_string();
    let o = folid(&["code", "--sig", &sig, "--decode", &code, "--json"]);
    assert_eq!(json(&o)["decoded"], "forall x. N(x) -> E(s(x))");
    assert_eq!(json(&o)["tag"], "all");
    let o = folid(&[
        "code",
        "--sig",
        &sig,
        "--model",
        &fixture("clamp.model"),
        "--search",
        "E",
        "--term",
        "s(0)",
        "--budget",
        "3",
        "--json",
    ]);
    let v = json(&o);
    assert_eq!(v["found"], false);
    let o = folid(&[
        "code",
        "--sig",
        &sig,
        "--model",
        &fixture("clamp.model"),
        "--search",
        "O",
        "--term",
        "s(0)",
        "--budget",
        "3",
        "--json",
    ]);
    let v = json(&o);
    assert_eq!(v["found"], true);
    // stages ∅, {E(0)}, {O(s(0))}: three stages, three predicates each
    assert_eq!(v["stages"].as_array().unwrap().len(), 3);
    assert_eq!(v["stages"][0], serde_json::json!([[], [], []]));
}

#[test]
fn approx_truth_passes_on_fixtures() {
    for m in ["clamp.model", "cycle2.model", "fixed.model"] {
        let o = folid(&[
            "approx-truth",
            "--sig",
            &fixture("nat.folid"),
            "--model",
            &fixture(m),
            "--budget",
            "3",
            "--json",
        ]);
        assert_eq!(o.status.code(), Some(0), "{m}: {}", stdout(&o));
        let v = json(&o);
        assert_eq!(v["i_report"]["violations"], serde_json::json!([]));
        assert_eq!(v["search"]["contradict"], serde_json::json!([]));
    }
}

#[test]
fn translate_pa_prints_signature_and_sequent() {
    let o = folid(&["translate-pa", "--formula", "forall x. add(x, 0) = x", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["signature"].as_str().unwrap().contains("rule sc: N(x) => N(s(x));"));
    assert_eq!(v["relativized"], "forall x. N(x) -> add(x, 0) = x");
    assert!(v["sequent"]
        .as_str()
        .unwrap()
        .ends_with("|- forall x. N(x) -> add(x, 0) = x"));
    let bad = folid(&["translate-pa", "--formula", "N(0)"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
}

#[test]
fn explain_trace_matches_golden_text() {
    let o = folid(&[
        "explain-trace",
        &fixture("mixed_loop.proof"),
        "--sig",
        &fixture("nat.folid"),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        stdout(&o),
        std::fs::read_to_string(fixture("mixed_loop.explain")).unwrap()
    );
    let o = folid(&[
        "explain-trace",
        &fixture("nat_refl.proof"),
        "--sig",
        &fixture("nat.folid"),
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn explain_trace_with_a_given_lasso() {
    let sig = fixture("nat.folid");
    let o = folid(&[
        "explain-trace",
        &fixture("no_progress.proof"),
        "--sig",
        &sig,
        "--cycle",
        "1,2",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["lasso"]["cycle"], serde_json::json!([1, 2]));
    let o = folid(&[
        "explain-trace",
        &fixture("no_progress.proof"),
        "--sig",
        &sig,
        "--cycle",
        "2,2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let sig = fixture("nat.folid");
    let o = folid(&["lfp", "--sig", &sig]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let o = folid(&[
        "eval",
        "--sig",
        &sig,
        "--model",
        &fixture("clamp.model"),
        "--formula",
        "N((",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = folid(&["check-proof", &fixture("missing.proof"), "--sig", &sig]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.proof"));
    assert_eq!(folid(&["no-such-command"]).status.code(), Some(2));
}
