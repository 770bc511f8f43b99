use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use msqi::TestFunction;
use serde_json::Value;

fn msqi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msqi")).args(args).output().unwrap()
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(name);
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, path: &Path) {
    let doc: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema(schema_name)).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{}: {errors:?}", path.display());
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn node_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f2.csv");
    TestFunction::F2.export_csv(64, None, fs::File::create(&input).unwrap()).unwrap();
    let out = dir.path().join("q.csv");
    let o = msqi(&[
        "fit", "--input", input.to_str().unwrap(), "--gaps", "32", "--d", "6", "--at-nodes", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let mut samples = csv::Reader::from_path(&input).unwrap();
    let mut fitted = csv::Reader::from_path(&out).unwrap();
    assert_eq!(fitted.headers().unwrap(), vec!["x", "Q", "extrapolated", "in_gap"]);
    // the two nodes bounding the gap see the far side's models through a ~1e-6 weight
    let mut rows = 0;
    for (i, (s, q)) in samples.records().zip(fitted.records()).enumerate() {
        let (s, q) = (s.unwrap(), q.unwrap());
        let y: f64 = s[1].parse().unwrap();
        let v: f64 = q[1].parse().unwrap();
        assert_eq!(s[0].parse::<f64>().unwrap(), q[0].parse::<f64>().unwrap());
        let tol = if i == 32 || i == 33 { 1e-5 } else { 1e-10 };
        assert!((y - v).abs() <= tol, "node {i}: {y} vs {v}");
        assert_eq!(&q[2], "false");
        rows += 1;
    }
    assert_eq!(rows, 65);
}

#[test]
fn dump_covering_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f3.csv");
    TestFunction::F3.export_csv(100, None, fs::File::create(&input).unwrap()).unwrap();
    let cov = dir.path().join("cov.json");
    let o = msqi(&[
        "fit", "--input", input.to_str().unwrap(), "--gaps", "50", "--ne", "10", "--dump-covering",
        cov.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_valid("covering.schema.json", &cov);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&cov).unwrap()).unwrap();
    assert_eq!(doc["counts"].as_array().unwrap().len(), 2);
    // stdout carries the 11-point evaluation
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 12);
}

#[test]
fn experiment_outputs_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 4] = [
        ("exp1", &["--functions", "f1,f4", "--n", "128", "--ne", "100,200"]),
        ("exp2", &["--functions", "f2", "--n", "50,100", "--d", "1,3"]),
        ("exp3", &["--n", "128", "--seed", "1,2", "--ne", "200"]),
        ("exp4", &["--functions", "f6", "--n", "40,80", "--d", "1", "--ne", "200"]),
    ];
    for (exp, extra) in runs {
        let out = dir.path().join(exp);
        let mut args = vec![exp, "--out-dir", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        let o = msqi(&args);
        assert!(o.status.success(), "{exp}: {}", stderr(&o));
        let summary = out.join(format!("{exp}_summary.json"));
        assert_valid("summary.schema.json", &summary);
        let doc: Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
        let config = out.join("config.json");
        fs::write(&config, doc["config"].to_string()).unwrap();
        assert_valid("experiment_config.schema.json", &config);
        for line in String::from_utf8_lossy(&o.stdout).lines() {
            assert!(Path::new(line).exists(), "{line}");
        }
    }
    let table = fs::read_to_string(dir.path().join("exp1/exp1_emax.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "function,n,d,K,n_e,e_max,argmax,in_gap");
    let l1 = fs::read_to_string(dir.path().join("exp2/exp2_l1.csv")).unwrap();
    assert_eq!(l1.lines().next().unwrap(), "function,n,d,K,e_l1");
    assert_eq!(l1.lines().count(), 5);
}

#[test]
fn config_file_is_merged_with_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.json");
    fs::write(&config, r#"{"functions": ["f5"], "n": [50, 100], "d": [1], "K": [6], "n_e": [300]}"#).unwrap();
    assert_valid("config_overrides.schema.json", &config);
    let out = dir.path().join("out");
    let o = msqi(&[
        "exp4", "--config", config.to_str().unwrap(), "--K", "8", "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&fs::read_to_string(out.join("exp4_summary.json")).unwrap()).unwrap();
    assert_eq!(doc["config"]["K"], serde_json::json!([8]));
    assert_eq!(doc["config"]["n"], serde_json::json!([50, 100]));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{"nodes": [10]}"#).unwrap();
    let o = msqi(&["exp1", "--config", config.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn odd_mu_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = msqi(&["exp4", "--mu", "3", "--n", "20", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn malformed_csv_reports_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "x,y\n0,1\n0.5,oops\n1,2\n").unwrap();
    let o = msqi(&["fit", "--input", input.to_str().unwrap(), "--d", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
}

#[test]
fn too_few_nodes_is_a_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("short.csv");
    TestFunction::F5.export_csv(8, None, fs::File::create(&input).unwrap()).unwrap();
    let o = msqi(&["fit", "--input", input.to_str().unwrap(), "--d", "20"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn missing_input_file_is_an_input_error() {
    let o = msqi(&["fit", "--input", "/nonexistent/samples.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fit_reads_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_msqi"))
        .args(["fit", "--input", "-", "--d", "1", "--K", "2", "--ne", "4"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut data = String::from("x,y\n");
    for i in 0..=8 {
        let x = -1.0 + i as f64 / 4.0;
        data.push_str(&format!("{x},{}\n", 2.0 * x + 1.0));
    }
    child.stdin.take().unwrap().write_all(data.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (x, q): (f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        assert!((q - (2.0 * x + 1.0)).abs() < 1e-12);
    }
}
