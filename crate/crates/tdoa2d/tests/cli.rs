//! End-to-end tests for the command-line binary: exit codes, output shapes,
//! and agreement with the library on exact data.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tdoa2d::bifurcation::build_quintic;
use tdoa2d::formats::poly_from_json;
use tdoa2d::geometry::{make_config, RationalPoint, ReceiverConfig};
use tdoa2d::rational::int;

const RECEIVERS_JSON: &str = r#"{"receivers": [["0","0"],["2","0"],["2","2"]]}"#;
const COLLINEAR_JSON: &str = r#"{"receivers": [["0","0"],["1","1"],["2","2"]]}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tdoa2d"))
}

/// Writes a per-test fixture file and returns its path.
fn fixture(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("tdoa2d-cli-{}-{name}", std::process::id()));
    fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", text(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn reference_config() -> ReceiverConfig {
    make_config(
        RationalPoint::new(int(0), int(0)),
        RationalPoint::new(int(2), int(0)),
        RationalPoint::new(int(2), int(2)),
    )
    .unwrap()
}

// ---- exit codes ----

#[test]
fn test_help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["localize", "--help"]).status.code(), Some(0));
}

#[test]
fn test_unknown_subcommand_exits_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn test_missing_receivers_file_exits_one() {
    let out = run(&["asymptotes", "--receivers", "/nonexistent/r.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!text(&out.stderr).is_empty());
}

#[test]
fn test_collinear_receivers_exit_one() {
    let path = fixture("collinear.json", COLLINEAR_JSON);
    let out = run(&["asymptotes", "--receivers", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("collinear"));
}

#[test]
fn test_bad_tau_exits_one() {
    let path = fixture("badtau.json", RECEIVERS_JSON);
    let p = path.to_str().unwrap();
    for tau in ["abc", "1", "1,2,3", "1;2"] {
        let out = run(&["classify-tau", "--receivers", p, "--tau", tau]);
        assert_eq!(out.status.code(), Some(1), "tau {tau:?} accepted");
    }
}

#[test]
fn test_curve_sample_small_n_exits_one() {
    let path = fixture("smalln.json", RECEIVERS_JSON);
    let out = run(&[
        "curve-sample",
        "--receivers",
        path.to_str().unwrap(),
        "--n",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

// ---- output shapes ----

#[test]
fn test_classify_tau_shape() {
    let path = fixture("ctau.json", RECEIVERS_JSON);
    let out = run(&[
        "classify-tau",
        "--receivers",
        path.to_str().unwrap(),
        "--tau",
        "0.25,0.5",
    ]);
    let v = stdout_json(&out);
    assert!(v["region"].is_string());
    assert!(v["expected_count"].is_number());
    assert!(v["a_value"].is_number());
    assert_eq!(v["facet_slacks"].as_array().unwrap().len(), 6);
}

#[test]
fn test_localize_recovers_known_source() {
    // tau2_forward of x = (3, 1) for the reference receivers.
    let config = reference_config();
    let tau = tdoa2d::tdoa::tau2_forward(&config, tdoa2d::geometry::Vec2::new(3.0, 1.0));
    let path = fixture("loc.json", RECEIVERS_JSON);
    let out = run(&[
        "localize",
        "--receivers",
        path.to_str().unwrap(),
        "--tau",
        &format!("{},{}", tau.tau1, tau.tau2),
    ]);
    let v = stdout_json(&out);
    let sources = v["sources"].as_array().unwrap();
    assert!(!sources.is_empty());
    let hit = sources.iter().any(|s| {
        let sx = s[0].as_f64().unwrap();
        let sy = s[1].as_f64().unwrap();
        ((sx - 3.0).powi(2) + (sy - 1.0).powi(2)).sqrt() < 1e-7
    });
    assert!(hit, "no recovered source near (3, 1): {v}");
    assert_eq!(
        v["d0"].as_array().unwrap().len(),
        sources.len(),
        "one range per source"
    );
    assert_eq!(v["degenerate"], serde_json::Value::Bool(false));
}

#[test]
fn test_classify_point_shape() {
    let path = fixture("cpoint.json", RECEIVERS_JSON);
    let out = run(&[
        "classify-point",
        "--receivers",
        path.to_str().unwrap(),
        "--point",
        "-1.0,0.5",
    ]);
    let v = stdout_json(&out);
    assert!(v["region"].is_string());
    assert!(v["F_value"].is_number());
    assert!(v["sampson_distance"].is_number());
}

#[test]
fn test_asymptotes_shape() {
    let path = fixture("asym.json", RECEIVERS_JSON);
    let out = run(&["asymptotes", "--receivers", path.to_str().unwrap()]);
    let v = stdout_json(&out);
    let lines = v["asymptotes"].as_array().unwrap();
    assert_eq!(lines.len(), 3);
    for line in lines {
        assert!(line["a"].is_number());
        assert!(line["b"].is_number());
        assert!(line["c"].is_number());
        assert_eq!(line["exact"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn test_vertices_and_tangency_shapes() {
    let path = fixture("verts.json", RECEIVERS_JSON);
    let p = path.to_str().unwrap();
    let v = stdout_json(&run(&["vertices", "--receivers", p]));
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
    let t = stdout_json(&run(&["tangency", "--receivers", p]));
    assert!(t["tangency"].is_array() || t["tangency"].is_object());
}

// ---- data formats ----

#[test]
fn test_bifurcation_poly_round_trips_exactly() {
    let path = fixture("poly.json", RECEIVERS_JSON);
    let p = path.to_str().unwrap();
    let curve = build_quintic(&reference_config());

    let raw = run(&["bifurcation-poly", "--receivers", p]);
    assert_eq!(raw.status.code(), Some(0));
    let parsed = poly_from_json(&text(&raw.stdout)).unwrap();
    assert_eq!(&parsed, curve.f());

    let norm = run(&["bifurcation-poly", "--receivers", p, "--normalized"]);
    assert_eq!(norm.status.code(), Some(0));
    let parsed = poly_from_json(&text(&norm.stdout)).unwrap();
    assert_eq!(parsed, curve.normalized());
}

#[test]
fn test_curve_sample_csv_header() {
    let path = fixture("csv.json", RECEIVERS_JSON);
    let out = run(&[
        "curve-sample",
        "--receivers",
        path.to_str().unwrap(),
        "--n",
        "120",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = text(&out.stdout);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("arc_id,theta,x,y"));
    let first = lines.next().unwrap();
    assert_eq!(first.split(',').count(), 4);
}

#[test]
fn test_curve_sample_json_has_three_arcs() {
    let path = fixture("arcs.json", RECEIVERS_JSON);
    let out = run(&[
        "curve-sample",
        "--receivers",
        path.to_str().unwrap(),
        "--n",
        "240",
        "--format",
        "json",
    ]);
    let v = stdout_json(&out);
    let arcs = v["arcs"].as_array().unwrap();
    assert_eq!(arcs.len(), 3);
    for (k, arc) in arcs.iter().enumerate() {
        assert_eq!(arc["arc_id"].as_u64(), Some(k as u64));
        assert!(!arc["samples"].as_array().unwrap().is_empty());
    }
}

#[test]
fn test_curve_sample_svg_document() {
    let path = fixture("svg.json", RECEIVERS_JSON);
    let out = run(&[
        "curve-sample",
        "--receivers",
        path.to_str().unwrap(),
        "--n",
        "120",
        "--format",
        "svg",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = text(&out.stdout);
    assert!(body.starts_with("<svg"));
    assert!(body.trim_end().ends_with("</svg>"));
}

#[test]
fn test_curve_sample_out_writes_file() {
    let path = fixture("outfile.json", RECEIVERS_JSON);
    let target = std::env::temp_dir().join(format!("tdoa2d-cli-{}-curve.csv", std::process::id()));
    let out = run(&[
        "curve-sample",
        "--receivers",
        path.to_str().unwrap(),
        "--n",
        "120",
        "--format",
        "csv",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let body = fs::read_to_string(&target).unwrap();
    assert!(body.starts_with("arc_id,theta,x,y"));
    fs::remove_file(&target).ok();
}

// ---- validation and determinism ----

#[test]
fn test_validate_passes_on_reference_receivers() {
    let path = fixture("validate.json", RECEIVERS_JSON);
    let out = run(&[
        "validate",
        "--receivers",
        path.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 5);
    for c in checks {
        assert_eq!(c["passed"], serde_json::Value::Bool(true), "{c}");
    }
}

#[test]
fn test_outputs_are_deterministic() {
    let path = fixture("determ.json", RECEIVERS_JSON);
    let p = path.to_str().unwrap();
    let poly_args = ["bifurcation-poly", "--receivers", p, "--normalized"];
    assert_eq!(run(&poly_args).stdout, run(&poly_args).stdout);
    let val_args = ["validate", "--receivers", p, "--seed", "11"];
    assert_eq!(run(&val_args).stdout, run(&val_args).stdout);
}
