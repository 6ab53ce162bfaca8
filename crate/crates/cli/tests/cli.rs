use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn code(name: &str) -> PathBuf {
    root().join("codes").join(name)
}

fn nlturbo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlturbo")).args(args).output().expect("spawn nlturbo")
}

fn nlturbo_threads(threads: usize, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlturbo"))
        .env("NLTURBO_THREADS", threads.to_string())
        .args(args)
        .output()
        .expect("spawn nlturbo")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn validate(schema: &str, value: &Value) {
    let text = std::fs::read_to_string(root().join("schemas").join(schema)).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(value).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

/// A short-block turbo code for quick sweeps.
fn small_code(dir: &Path) -> PathBuf {
    let path = dir.join("small.toml");
    let p = path.to_str().unwrap();
    let out = nlturbo(&[
        "design", "--density", "0.6", "-n", "9", "--d-b", "1", "--info-bits", "400", "--spread", "5",
        "--puncture1", "243", "--puncture2", "243", "-o", p,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn shipped_reference_code_matches_golden_record() {
    let v = json(&nlturbo(&["audit", code("reference.toml").to_str().unwrap()]));
    assert_eq!(v["metric"], "z");
    assert_eq!(v["ones"], 349);
    assert_eq!(v["branch_distance"], 2);
    assert_eq!(v["merge_distance"], 0);
    assert_eq!(v["effective_free_distance"], 5);
    assert_eq!(v["rate"], "1/10");
    assert_eq!(v["mismatches"], Value::Array(vec![]));
}

#[test]
fn shipped_broadcast_codes_audit_clean() {
    let v = json(&nlturbo(&["audit", code("bbsc_user2.toml").to_str().unwrap()]));
    assert_eq!(v["branch_distance"], 4);
    assert_eq!(v["effective_free_distance"], 20);
    assert_eq!(v["table_density"], "1/2");
    let v = json(&nlturbo(&["audit", code("bbsc_user1.toml").to_str().unwrap()]));
    assert_eq!(v["table_density"], "3/20");
    assert_eq!(v["systematic"], false);
    assert_eq!(v["rate"], "1/10");
}

#[test]
fn audit_detects_corrupted_digit() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(code("reference.toml")).unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, text.replacen("\"534\"", "\"535\"", 1)).unwrap();
    let out = nlturbo(&["audit", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let fields: Vec<&str> = v["mismatches"].as_array().unwrap().iter().map(|m| m["field"].as_str().unwrap()).collect();
    assert!(fields.contains(&"ones"), "{fields:?}");
}

#[test]
fn audit_of_all_zero_labels() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(code("reference.toml")).unwrap();
    let labels = text.lines().find(|l| l.starts_with("labels")).unwrap();
    let zeros = format!("labels = [{}]", vec!["[\"000\", \"000\", \"000\", \"000\"]"; 16].join(", "));
    let body: String = text.lines().take_while(|l| !l.starts_with("[declared]")).collect::<Vec<_>>().join("\n");
    let path = dir.path().join("zeros.toml");
    std::fs::write(&path, body.replace(labels, &zeros)).unwrap();
    let v = json(&nlturbo(&["audit", path.to_str().unwrap(), "--metric", "hamming"]));
    assert_eq!(v["branch_distance"], 0);
    assert_eq!(v["merge_distance"], 0);
    assert_eq!(v["ones"], 0);
}

#[test]
fn parse_errors_report_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "states = 16\nk = 2\nn = 9\nnext_state = [[0, 1]\n").unwrap();
    let out = nlturbo(&["audit", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(nlturbo(&["z-sim", "--bogus"]).status.code(), Some(1));
    assert_eq!(nlturbo(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(nlturbo(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_parameters_exit_two() {
    assert_eq!(nlturbo(&["capacity", "-p", "1.5"]).status.code(), Some(2));
    assert_eq!(nlturbo(&["region", "--alpha", "0.3", "--beta", "0.2"]).status.code(), Some(2));
}

#[test]
fn capacity_and_region_values() {
    let v = json(&nlturbo(&["capacity", "-p", "0,0.5"]));
    assert!((v[0]["capacity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v[1]["capacity"].as_f64().unwrap() - 0.321_928_094_887_362_4).abs() < 1e-9);
    let v = json(&nlturbo(&["capacity", "--channel", "bsc", "-p", "0.5"]));
    assert!(v[0]["capacity"].as_f64().unwrap().abs() < 1e-12);

    let v = json(&nlturbo(&["region", "--alpha", "0.188", "--beta", "0.2017", "--r1", "0.1", "--r2", "0.1"]));
    let (lo, hi) = (v["p1_lower"].as_f64().unwrap(), v["p1_upper"].as_f64().unwrap());
    assert!(lo < hi && v["horizontal_margin"].as_f64().unwrap() > 0.05);

    let out = nlturbo(&["region", "--alpha", "0", "--beta", "0.2", "--points", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().last().unwrap().starts_with("0.5,1,0"));
}

#[test]
fn noiseless_sweep_and_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_code(dir.path());
    let out = nlturbo(&["z-sim", "--code", c.to_str().unwrap(), "-p", "0,0.05,0.1", "--max-blocks", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    let headers = rdr.headers().unwrap().clone();
    let idx = headers.iter().position(|h| h == "bit_errors").unwrap();
    assert_eq!(&rows[0][idx], "0");
    assert_eq!(&rows[0][headers.iter().position(|h| h == "rate").unwrap()], "1/6");
}

#[test]
fn sweep_csv_is_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_code(dir.path());
    let args = ["z-sim", "--code", c.to_str().unwrap(), "--gap", "0.2,0.0,-0.05", "--max-blocks", "30"];
    let a = nlturbo_threads(1, &args);
    let b = nlturbo_threads(4, &args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    // above capacity the gap is negative and flagged, but the point still runs
    let gap: f64 = text.lines().nth(3).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((gap + 0.05).abs() < 1e-9, "{text}");
}

#[test]
fn single_point_report_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_code(dir.path());
    let v = json(&nlturbo(&["z-sim", "--code", c.to_str().unwrap(), "-p", "0.3", "--max-blocks", "5"]));
    validate("sim_report.schema.json", &v);
    assert_eq!(v["rate"], "1/6");
    assert_eq!(v["config"]["crossovers"][0], 0.3);
    let gap = v["capacity"].as_f64().unwrap() - 1.0 / 6.0;
    assert!((v["gap"].as_f64().unwrap() - gap).abs() < 1e-12);
}

#[test]
fn confidence_intervals_shrink_as_inverse_sqrt_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_code(dir.path());
    let width = |blocks: usize| {
        let v = json(&nlturbo(&[
            "z-sim", "--code", c.to_str().unwrap(), "-p", "0.9", "--error-target", "0",
            "--max-blocks", &blocks.to_string(), "--iterations", "1",
        ]));
        v["ber_ci"][1].as_f64().unwrap() - v["ber_ci"][0].as_f64().unwrap()
    };
    let (w1, w2, w3) = (width(16), width(64), width(256));
    for ratio in [w1 / w2, w2 / w3] {
        assert!((ratio - 2.0).abs() < 0.2, "{w1} {w2} {w3}");
    }
}

#[test]
fn designed_code_audits_clean() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_code(dir.path());
    let v = json(&nlturbo(&["audit", c.to_str().unwrap()]));
    assert_eq!(v["mismatches"], Value::Array(vec![]));
    assert_eq!(v["ones"], 16 * 22);
    let d = json(&nlturbo(&["density", "--code", c.to_str().unwrap(), "--blocks", "200"]));
    let dens = d["ones_density"].as_f64().unwrap();
    assert!(dens > 0.55 && dens < 0.65, "{dens}");
}

#[test]
fn broadcast_report_matches_schema() {
    let out = nlturbo(&[
        "bbsc-sim", "--user1", code("bbsc_user1.toml").to_str().unwrap(),
        "--user2", code("bbsc_user2.toml").to_str().unwrap(),
        "--alpha", "0.188", "--beta", "0.2017", "--max-blocks", "2", "--density-blocks", "2", "--genie",
    ]);
    let v = json(&out);
    validate("bbsc_report.schema.json", &v);
    assert_eq!(v["rate1"], "1/10");
    assert_eq!(v["user1"]["bits"], 40000);
    assert!(v["capacity_margin"][0].as_f64().unwrap() > 0.0);
}
