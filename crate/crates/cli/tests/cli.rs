use std::io::Write;
use std::process::{Command as Process, Output};

use tautchern_cli::document::{render_text, DegreeJson};
use tautchern_cli::request::Command;
use tautchern_cli::{execute, execute_with_threads, parse_request, render_output, ComputationRequest, Format, Mode};
use tautchern_core::arith::Rational;
use tautchern_core::strata::TautClass;

fn argv(args: &[&str]) -> Vec<String> {
    std::iter::once("tautchern").chain(args.iter().copied()).map(String::from).collect()
}

fn request(args: &[&str]) -> ComputationRequest {
    parse_request(argv(args)).unwrap().0
}

fn binary(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_tautchern")).args(args).output().unwrap()
}

fn temp_json(value: &serde_json::Value) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{value}").unwrap();
    f
}

#[test]
fn defaults() {
    let req = request(&["chern-char", "--g", "2"]);
    assert_eq!(req.command, Command::ChernChar);
    assert_eq!(req.space.labels(), ["1"]);
    assert_eq!(req.smax, req.space.dim());
    assert_eq!((req.mode, req.format), (Mode::Theorem, Format::Json));
    assert_eq!(req.divisor.degree(), 0);
    assert!(!req.negate && !req.expand && req.phi.is_none());
}

#[test]
fn bn_smax_defaults_to_codimension() {
    // r = 0, d = 1 on genus 3: codimension g - d = 2
    let req = request(&["bn-class", "--g", "3", "--d", "1:1"]);
    assert_eq!(req.smax, 2);
}

#[test]
fn flags_override_config_file() {
    let cfg = temp_json(&serde_json::json!({
        "command": "chern-char", "g": 2, "markings": ["1", "2"], "ell": 3, "smax": 1
    }));
    let req = request(&["--config", cfg.path().to_str().unwrap(), "--ell", "1"]);
    assert_eq!(req.divisor.ell, 1);
    assert_eq!(req.smax, 1);
    assert_eq!(req.space.n_markings(), 2);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let cfg = temp_json(&serde_json::json!({ "command": "chern-char", "g": 2, "genus": 2 }));
    let err = parse_request(argv(&["--config", cfg.path().to_str().unwrap()])).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn anchor_outside_s_is_rejected() {
    let err = parse_request(argv(&["chern-char", "--g", "2", "--markings", "1,2", "--a", "1:2=1"])).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("anchor"), "{err}");
}

#[test]
fn smax_beyond_dimension_is_rejected() {
    let err = parse_request(argv(&["chern-char", "--g", "1", "--smax", "2"])).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn echo_round_trips() {
    let args = "chern-classes --g 2 --markings 1,2 --ell -1 --d 1:2,2:-1 --a 1:1=2 --a 0:1+2=-1 --smax 2 --negate";
    let req = request(&args.split_whitespace().collect::<Vec<_>>());
    let doc = execute(&req).unwrap();
    assert_eq!(ComputationRequest::from_config(&doc.request).unwrap(), req);
    let json: serde_json::Value = serde_json::from_str(&render_output(&doc, Format::Json)).unwrap();
    let back = serde_json::from_value(json["request"].clone()).unwrap();
    assert_eq!(ComputationRequest::from_config(&back).unwrap(), req);
}

#[test]
fn text_output_starts_with_euler_characteristic() {
    // d = 2ℓ + d_1 = 3, so ch_0 = d + 1 - g = 2
    let req = request(&["chern-char", "--g", "2", "--ell", "1", "--d", "1:1", "--smax", "2", "--format", "text"]);
    let text = render_output(&execute(&req).unwrap(), Format::Text);
    assert!(text.starts_with("deg 0: 2·1\n"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("deg ")).count(), 3);
}

#[test]
fn vanishing_degree_renders_as_zero() {
    let req = request(&["chern-char", "--g", "2", "--ell", "1", "--smax", "2", "--format", "text"]);
    let text = render_output(&execute(&req).unwrap(), Format::Text);
    assert!(text.lines().any(|l| l == "deg 2: 0"), "{text}");
}

#[test]
fn both_modes_agree() {
    let req = request(&["chern-char", "--g", "2", "--markings", "1,2", "--a", "1:1=1", "--mode", "both"]);
    let doc = execute(&req).unwrap();
    assert_eq!(doc.metadata.agreement, Some(true));
    assert!(doc.diff.is_empty());
    assert_eq!(doc.exit_code(), 0);
}

#[test]
fn disagreement_sets_exit_code_and_diff() {
    let req = request(&["chern-char", "--g", "1", "--mode", "both", "--format", "text"]);
    let mut doc = execute(&req).unwrap();
    let wrong = TautClass::one(&req.space).scaled(&Rational::new(1, 3));
    doc.diff.push(DegreeJson::from_class(&req.space, 0, &wrong));
    doc.metadata.agreement = Some(false);
    assert_eq!(doc.exit_code(), 3);
    let text = render_text(&doc);
    assert!(text.contains("agreement: false"));
    assert!(text.contains("diff deg 0: 1/3·1"), "{text}");
}

#[test]
fn worker_count_does_not_change_output() {
    let req = request(&["chern-classes", "--g", "2", "--markings", "1,2", "--ell", "1", "--a", "1:1=-1"]);
    let one = render_output(&execute_with_threads(&req, Some(1)).unwrap(), Format::Json);
    let three = render_output(&execute_with_threads(&req, Some(3)).unwrap(), Format::Json);
    assert_eq!(one, three);
}

#[test]
fn drc_divisor_lists_twists() {
    let req = request(&["drc-divisor", "--g", "1", "--markings", "1,2,3", "--i", "1", "--j", "2"]);
    let div = execute(&req).unwrap().divisor.unwrap();
    assert_eq!((div.ell, div.d["1"], div.d["2"], div.d["3"]), (0, 1, -1, 0));
    assert!(!div.a.is_empty());
    assert!(div.a.iter().all(|a| a.value == -1 && a.s.contains(&"1".to_string()) && !a.s.contains(&"2".to_string())
        || a.value == 1 && !a.s.contains(&"1".to_string())));
}

#[test]
fn binary_exit_codes() {
    let ok = binary(&["chern-char", "--g", "1", "--format", "text"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("deg 0: "));

    let bad = binary(&["chern-char", "--g", "1", "--ell", "1.5"]);
    assert_eq!(bad.status.code(), Some(2));

    let anchor = binary(&["chern-char", "--g", "2", "--markings", "1,2", "--a", "1:2=1"]);
    assert_eq!(anchor.status.code(), Some(2));

    let missing = binary(&["chern-char", "--config", "/nonexistent/tautchern.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn binary_reports_degenerate_phi() {
    // side degree of (1,{1}) is ℓ + d_1 = 0, so φ = 1/2 sits on a wall
    let phi = temp_json(&serde_json::json!({ "d": 0, "phi": [{ "h": 1, "S": ["1"], "value": "1/2" }] }));
    let out = binary(&["validate-phi", "--g", "2", "--phi-file", phi.path().to_str().unwrap(), "--format", "text"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("nondegenerate: false"), "{text}");

    let good = temp_json(&serde_json::json!({ "d": 0, "phi": [{ "h": 1, "S": ["1"], "value": "1/3" }] }));
    let out = binary(&["validate-phi", "--g", "2", "--phi-file", good.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn binary_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("doc.json");
    let out = binary(&["chern-char", "--g", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["metadata"]["command"], "chern-char");
}
