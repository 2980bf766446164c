use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{Map, Value};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Runs the binary, writing the report through `--output`; returns the exit
/// code and the parsed document.
fn weblab(args: &[&str], input: &Path) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_weblab"))
        .args(args)
        .arg("--input")
        .arg(input)
        .arg("--output")
        .arg(&out)
        .env("RUST_LOG", "off")
        .status()
        .unwrap();
    let text = std::fs::read_to_string(&out).unwrap_or_else(|_| "null".into());
    (status.code().unwrap(), serde_json::from_str(&text).unwrap())
}

fn report(args: &[&str], name: &str) -> Map<String, Value> {
    let (code, doc) = weblab(args, &fixture(name));
    assert_eq!(code, 0, "{args:?} on {name}: {}", doc["report"]["error"]);
    doc["report"].as_object().unwrap().clone()
}

fn check_golden(name: &str, actual: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let rendered = weblab_cli::render(actual);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &rendered).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {name}; rerun with UPDATE_GOLDEN=1"));
    assert!(expected == rendered, "report differs from golden {name}");
}

#[test]
fn parallel_web_full_report() {
    let r = report(&["full"], "parallel4.json");
    assert_eq!(r["rank"]["rank"], 3);
    assert_eq!(r["rank"]["flat"], true);
    assert_eq!(r["curvature"]["trace"]["terms"], serde_json::json!([]));
    assert_eq!(r["pw"]["is_linear"], true);
    assert_eq!(r["linearizability"]["linearizable"], true);
    check_golden("parallel4.full.json", &Value::Object(r));
}

#[test]
fn curved_three_web_golden() {
    let r = report(&["full"], "curved3.json");
    assert_eq!(r["rank"]["rank"], 0);
    assert_eq!(r["trace_formula"]["equal"], true);
    assert_eq!(r["linearizability"]["skipped"]["code"], "invalid_degree");
    check_golden("curved3.full.json", &Value::Object(r));
}

#[test]
fn hexagonal_web_from_coefficients_has_rank_three() {
    let r = report(&["rank"], "collinear_pencils.json");
    assert_eq!(r["rank"]["rank"], 3);
    assert_eq!(r["rank"]["pi_d"], 3);
    assert!(r["input"]["coefficients"].is_array());
    check_golden("collinear_pencils.rank.json", &Value::Object(r));
}

#[test]
fn trace_check_on_curved_four_web() {
    let r = report(&["trace-check"], "curved4.json");
    assert_eq!(r["trace_formula"]["equal"], true);
    assert_eq!(r["trace_formula"]["subweb_curvatures"].as_array().unwrap().len(), 4);
    assert_eq!(r["nakai"]["nakai_equivalence"], true);
    check_golden("curved4.trace-check.json", &Value::Object(r));
}

#[test]
fn full_is_the_union_of_the_subcommands() {
    let full = report(&["full"], "curved4.json");
    let mut union = Map::new();
    for cmd in ["validate", "pw", "system", "connection", "curvature", "trace-check", "rank", "linearize"] {
        for (k, v) in report(&[cmd], "curved4.json") {
            if let Some(prev) = union.insert(k.clone(), v.clone()) {
                assert_eq!(prev, v, "section {k} differs between subcommands");
            }
        }
    }
    assert_eq!(full, union);
}

#[test]
fn reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("r{i}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_weblab"))
            .args(["curvature", "--input"])
            .arg(fixture("generic4.json"))
            .arg("--output")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        outputs.push(weblab_cli::render(&doc["report"]));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn chart_and_vertical_leaves() {
    let r = report(&["rank"], "rectified_chart.json");
    assert_eq!(r["rank"]["rank"], 3);
    assert_eq!(r["input"]["chart"], serde_json::json!(["1", "5"]));
}

#[test]
fn order_override_and_recheck() {
    let r = report(&["rank", "--order", "10", "--recheck-order", "13"], "generic4.json");
    assert_eq!(r["input"]["order"], 10);
    assert_eq!(r["rank"]["rank"], 0);
    assert_eq!(r["recheck"]["order"], 13);
    assert_eq!(r["recheck"]["agrees"], true);
    let (code, doc) = weblab(&["rank", "--recheck-order", "12"], &fixture("generic4.json"));
    assert_eq!(code, 1);
    assert_eq!(doc["report"]["error"]["code"], "malformed_input");
}

#[test]
fn error_exit_codes() {
    for (name, args, code, error) in [
        ("collision.json", &["validate"][..], 2, "slope_collision"),
        ("singular_leading.json", &["pw"][..], 2, "singular_at_origin"),
        ("low_order.json", &["full"][..], 1, "malformed_input"),
        ("exhausted8.json", &["rank"][..], 3, "precision_exhausted"),
        ("collinear_pencils.json", &["trace-check"][..], 1, "no_explicit_slopes"),
        ("curved3.json", &["linearize"][..], 1, "invalid_degree"),
    ] {
        let (got, doc) = weblab(args, &fixture(name));
        assert_eq!(got, code, "{name}");
        assert_eq!(doc["report"]["error"]["code"], error, "{name}");
    }
}

#[test]
fn malformed_documents_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in [
        "{not json",
        r#"{"format_version": "1", "order": 12}"#,
        r#"{"format_version": "9", "order": 12, "slopes": [[[0,0,"1","1"]]]}"#,
        r#"{"format_version": "1", "order": 12, "slopes": ["vertical", [[0,0,"1","1"]], [[0,0,"2","1"]]]}"#,
        r#"{"format_version": "1", "order": 12, "slopes": [[[0,0,"1","0"]], [[0,0,"2","1"]], [[0,0,"3","1"]]]}"#,
        r#"{"format_version": "1", "order": 12, "chart": ["1","5"], "coefficients": [[[0,0,"1","1"]], [], [], [[0,0,"1","1"]]]}"#,
    ]
    .iter()
    .enumerate()
    {
        let path = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&path, text).unwrap();
        let (code, doc) = weblab(&["validate"], &path);
        assert_eq!(code, 1, "{text}");
        assert_eq!(doc["report"]["error"]["code"], "malformed_input", "{text}");
    }
    let missing = dir.path().join("missing.json");
    let status = Command::new(env!("CARGO_BIN_EXE_weblab")).args(["validate", "--input"]).arg(&missing).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn meta_carries_timing_and_precision_ledger() {
    let (code, doc) = weblab(&["rank"], &fixture("generic4.json"));
    assert_eq!(code, 0);
    let ledger = doc["meta"]["precision_ledger"].as_array().unwrap();
    assert!(ledger.iter().any(|e| e["stage"] == "rank_decision"));
    assert!(doc["meta"]["timing_ms"]["rank"].as_f64().is_some());
    assert!(doc["report"].get("meta").is_none());
}
