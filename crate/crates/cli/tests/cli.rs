use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn calculus(name: &str) -> String {
    root().join("../core/calculi").join(name).display().to_string()
}

fn data(name: &str) -> String {
    root().join("tests/data").join(name).display().to_string()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(root().join("tests/golden").join(name)).unwrap()
}

fn gndk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gndk")).args(args).output().unwrap()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = gndk(args);
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn core(args: &[&str]) -> (i32, String, String) {
    let c = calculus("gc-core.json");
    let mut all = args.to_vec();
    all.extend(["--calculus", &c]);
    run(&all)
}

/// Writes `text` to a scratch file and checks it under gc-core.
fn rechecks(text: &str) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("emitted.gnd");
    std::fs::write(&path, text).unwrap();
    let (code, out, err) = core(&["check", path.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (0, "OK\n"), "{text}\n{err}");
}

#[test]
fn check_single_proof() {
    let (code, out, _) = core(&["check", &data("and_intro.gnd")]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("check_ok.txt"));
}

#[test]
fn check_several_proofs_keeps_input_order() {
    let files = [data("and_intro.gnd"), data("bad.gnd"), data("tree.gnd")];
    let (code, out, err) = core(&["check", &files[0], &files[1], &files[2]]);
    assert_eq!(code, 1);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], format!("{}: OK", files[0]));
    assert!(lines[1].starts_with(&format!("{}: FAIL root grounding[and]", files[1])));
    assert_eq!(lines[2], format!("{}: OK", files[2]));
    assert_eq!(err, "ERROR CheckFailed: 1 of 3 proofs rejected\n");
}

#[test]
fn check_json_report() {
    let (code, out, _) = core(&["check", "--json", &data("bad.gnd")]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["report"]["ok"], false);
    assert_eq!(v[0]["report"]["failures"][0]["path"], "root");
}

#[test]
fn bars_of_the_wide_derivation() {
    let c = calculus("gc-core-commutative.json");
    let (code, out, _) = run(&["bars", &data("wide.gnd"), "--calculus", &c]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 6);
    assert_eq!(out, golden("bars_wide.txt"));
}

#[test]
fn bars_with_conditions() {
    assert_eq!(core(&["bars", &data("tree.gnd")]).1, golden("bars_tree.txt"));
    let (_, out, _) = core(&["bars", "--json", &data("tree.gnd")]);
    assert_eq!(out, golden("bars_tree.json"));
}

#[test]
fn tree_correspondence() {
    let (code, out, _) = core(&["to-tree", &data("tree.gnd")]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("to_tree.txt"));
    let (code, back, _) = core(&["from-tree", out.trim()]);
    assert_eq!(code, 0);
    rechecks(&back);
    let original = std::fs::read_to_string(data("tree.gnd")).unwrap();
    let squash = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
    assert_eq!(squash(&back), squash(&original));
}

#[test]
fn normalize_with_trace() {
    let (code, out, _) = core(&["normalize", "--trace", &data("detours.gnd")]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("normalize_trace.txt"));
    let (_, plain, _) = core(&["normalize", &data("detours.gnd")]);
    rechecks(&plain);
}

#[test]
fn mediate_growth_is_visible() {
    let (code, out, _) = core(&["normalize", "--with-mediate", "--trace", &data("med_growth.gnd")]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("med_growth_trace.txt"));
    let (_, untouched, _) = core(&["normalize", &data("med_growth.gnd")]);
    let original = std::fs::read_to_string(data("med_growth.gnd")).unwrap();
    assert_eq!(untouched, original);
}

#[test]
fn budget_exhaustion() {
    let (code, out, err) = core(&["normalize", "--with-mediate", "--budget", "1", &data("med_growth.gnd")]);
    assert_eq!(code, 1);
    assert_eq!(err, "ERROR BudgetExhausted: step budget of 1 exhausted after 1 reductions\n");
    rechecks(&out);
}

#[test]
fn wdoi_witnesses() {
    let (code, out, _) = core(&["wdoi", "p, q |> p & q"]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("wdoi_imm.gnd"));
    rechecks(&out);
    let (code, out, _) = core(&["wdoi", "((r, s *> r & s) *> ~~(r & s)) [~t] |> ~~(r & s) | t"]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("wdoi_tree.gnd"));
    rechecks(&out);
    let (code, out, _) =
        core(&["wdoi", "--json", "(p, q *> p & q), (r, ~s *> r | s) |> (p & q) & (r | s)", "--entry", "g1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["eliminations"], 2);
    rechecks(v["proof"].as_str().unwrap());
}

#[test]
fn wdoi_rejects_non_instances() {
    let (code, out, err) = core(&["wdoi", "p&q&r&s |> p"]);
    assert_eq!(code, 1);
    assert_eq!(out, "");
    assert!(err.starts_with("ERROR NotIntroducible: "), "{err}");
    let (code, _, err) = core(&["wdoi", "(p, q *> p & q) |> x", "--entry", "g3"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR NotATreeEntry: "), "{err}");
}

#[test]
fn decompose_then_recompose() {
    let claim = "(p, q *> p & q), (r, ~s *> r | s) |> (p & q) & (r | s)";
    let (code, out, _) = core(&["decompose", claim]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("decompose.txt"));
    let mut args = vec!["recompose", claim];
    args.extend(out.lines());
    let (code, proof, _) = core(&args);
    assert_eq!(code, 0);
    rechecks(&proof);
    let (code, _, err) = core(&["recompose", claim, "p, q |> p & q"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR PartsMismatch: "), "{err}");
}

#[test]
fn reduce_single_redexes() {
    let (code, out, _) = core(&["reduce", &data("detours.gnd")]);
    assert_eq!(code, 0);
    assert_eq!(out, "root\timm\t11\n0.0.0.0\ttree1\t14\n");
    let (code, out, _) = core(&["reduce", &data("detours.gnd"), "--at", "0.0.0.0"]);
    assert_eq!(code, 0);
    rechecks(&out);
    let (code, _, err) = core(&["reduce", &data("detours.gnd"), "--at", "0.0"]);
    assert_eq!(code, 1);
    assert_eq!(err, "ERROR NoRedex: no redex at 0.0\n");
}

#[test]
fn domain_errors() {
    let (code, _, err) = core(&["from-tree", "p & q"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR "), "{err}");
    let (code, _, err) = core(&["to-tree", "/nonexistent/proof.gnd"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR Io: "), "{err}");
    let (code, _, err) = core(&["wdoi", "p |> "]);
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR Syntax: "), "{err}");
}

#[test]
fn usage_errors() {
    let (code, _, _) = run(&["check", &data("and_intro.gnd")]);
    assert_eq!(code, 2);
    let (code, _, _) = core(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, _) = core(&["normalize", "--budget", "many", &data("detours.gnd")]);
    assert_eq!(code, 2);
    let (code, _, _) = core(&[]);
    assert_eq!(code, 2);
}

#[test]
fn output_is_stable() {
    let a = core(&["bars", "--json", &data("tree.gnd")]);
    let b = core(&["bars", "--json", &data("tree.gnd")]);
    assert_eq!(a, b);
}
