use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn operlab(dir: &Path, config: Option<&str>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_operlab"));
    cmd.current_dir(dir)
        .env_remove("OPERLAB_OUTPUT_DIR")
        .args(["--threads", "2"]);
    if let Some(text) = config {
        fs::write(dir.join("run.json"), text).unwrap();
        cmd.args(["--config", "run.json"]);
    }
    cmd.args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn lie_check_sln5() {
    let dir = tempfile::tempdir().unwrap();
    let out = operlab(dir.path(), None, &["lie-check", "--sln", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["exponents"], serde_json::json!([1, 2, 3, 4]));
    for (name, check) in v["checks"].as_object().unwrap() {
        assert_eq!(check["pass"], true, "{name}");
    }
    assert!(v["residuals"]["xplus_xminus"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn lie_check_g2_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let out = operlab(dir.path(), None, &["lie-check", "--cartan", "G2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["exponents"], serde_json::json!([1, 5]));
}

#[test]
fn malformed_config_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let out = operlab(
        dir.path(),
        Some("{\n  \"seed\": 3,\n  \"hbar\": [1.0,\n}"),
        &["oper-check"],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4") && err.contains("column"), "{err}");
}

#[test]
fn unknown_keys_and_bad_values_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = operlab(
        dir.path(),
        Some("{\"solver\": {\"newton_tolerance\": 1e-9}}"),
        &["solve"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("newton_tolerance"));
    let out = operlab(dir.path(), Some("{\"group\": {\"cartan\": \"E6\"}}"), &["gcheck"]);
    assert_eq!(out.status.code(), Some(2));
    let out = operlab(dir.path(), None, &["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oper_and_group_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = operlab(
        dir.path(),
        Some("{\"group\": {\"sln\": 3}, \"hbar\": [0.6, 0.5]}"),
        &["oper-check"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(stdout_json(&out)["checks"]["operator_dictionary"]["pass"]
        .as_bool()
        .unwrap());
    for t in ["G2", "B3", "D4"] {
        let out = operlab(dir.path(), None, &["gcheck", "--cartan", t]);
        assert_eq!(out.status.code(), Some(0), "{t}");
    }
}

#[test]
fn default_sweep_is_quartic() {
    let dir = tempfile::tempdir().unwrap();
    let out = operlab(dir.path(), None, &["--out", "res", "sweep"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(&dir.path().join("res/sweep_summary.json"));
    let slope = summary["slope"].as_f64().unwrap();
    assert!((3.85..=4.15).contains(&slope), "{slope}");
    let text = fs::read_to_string(dir.path().join("res/sweep.csv")).unwrap();
    let hash = summary["config_sha256"].as_str().unwrap();
    assert_eq!(text.lines().next().unwrap(), format!("# config_sha256 {hash}"));
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "R",
            "sup_f",
            "l2_f",
            "newton_iters",
            "curvature_residual",
            "conn_diff",
            "slope_partial"
        ]
    );
    assert_eq!(rdr.records().count(), 7);
}

#[test]
fn zero_differential_sweep_has_no_slope() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "{\"u\": [], \"surface\": {\"subdivision\": 4}, \"sweep\": {\"count\": 3}}";
    let out = operlab(dir.path(), Some(cfg), &["sweep"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "norms at solver floor, slope not defined");
    assert!(v["result"]["slope"].is_null());
}

#[test]
fn diverging_solves_give_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "{\"surface\": {\"subdivision\": 4}, \"u\": [{\"order\": 2, \"amplitude\": [40.0, 0.0]}], \
               \"sweep\": {\"r_min\": 0.05, \"r_max\": 2.0, \"count\": 5}, \"solver\": {\"max_newton\": 3}}";
    let out = operlab(dir.path(), Some(cfg), &["--out", "res", "sweep"]);
    assert_eq!(out.status.code(), Some(1));
    let summary = read_json(&dir.path().join("res/sweep_summary.json"));
    let failures = summary["failures"].as_array().unwrap().len();
    let rows = summary["rows"].as_array().unwrap().len();
    assert!(failures > 0 && rows > 0, "{failures} failures, {rows} rows");
    let csv_rows = fs::read_to_string(dir.path().join("res/sweep.csv"))
        .unwrap()
        .lines()
        .count()
        - 2;
    assert_eq!(csv_rows, rows);
}

#[test]
fn holonomy_traces_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "{\"u\": [{\"order\": 2, \"amplitude\": [0.8, 0.0]}], \"loops\": [[], [0], [1], [2], [3]]}";
    let out = operlab(
        dir.path(),
        Some(cfg),
        &["--out", "res", "holonomy", "--gauge-perturbation"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    assert!(v["checks"]["gauge_perturbation_trace_change"]["pass"]
        .as_bool()
        .unwrap());
    assert!(v["checks"]["trivial_loop_trace_minus_n"]["value"].as_f64().unwrap() < 1e-8);
    let list = read_json(&dir.path().join("res/holonomy.json"));
    let list = list.as_array().unwrap();
    assert_eq!(list.len(), 10);
    for e in list {
        for key in ["word", "trace_re", "trace_im", "det_err", "config_sha256"] {
            assert!(e.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn solve_dump_matches_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "{\"group\": {\"sln\": 3}, \"surface\": {\"subdivision\": 4}, \
               \"u\": [{\"order\": 3, \"amplitude\": [2.0, 0.0]}], \"r\": 0.5}";
    let out = operlab(dir.path(), Some(cfg), &["--out", "res", "solve"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let res = dir.path().join("res");
    let mesh = fs::read_to_string(res.join("mesh.txt")).unwrap();
    let nv = mesh.lines().filter(|l| l.starts_with("v ")).count();
    let dump = fs::read_to_string(res.join("solution.txt")).unwrap();
    let rows: Vec<&str> = dump.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), nv);
    // index plus re/im of a 3x3 matrix
    assert_eq!(rows[0].split_whitespace().count(), 1 + 18);
    let summary = read_json(&res.join("summary.json"));
    assert_eq!(summary["R"], 0.5);
    assert!(summary["sup_norm"].as_f64().unwrap() > 0.0);
    assert!(summary["residual"].as_f64().unwrap() < 1e-10);

    // The dumped mesh can be read back as the surface of another run.
    let cfg2 = format!(
        "{{\"surface\": {{\"mesh_file\": \"{}\"}}, \"r\": 0.5}}",
        res.join("mesh.txt").display()
    );
    let out = operlab(dir.path(), Some(&cfg2), &["--out", "res2", "solve"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn output_dir_env_override_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_operlab"))
        .current_dir(dir.path())
        .env("OPERLAB_OUTPUT_DIR", "from-env")
        .args(["lie-check", "--sln", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("from-env/lie_check.json").exists());
    let out = operlab(dir.path(), None, &["--out", "from-env", "report"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["runs"].as_array().unwrap().len(), 1);
    let out = operlab(dir.path(), None, &["--out", "empty", "report"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "{\"seed\": 5, \"samples\": 20}";
    operlab(dir.path(), Some(cfg), &["--out", "a", "oper-check"]);
    operlab(dir.path(), Some(cfg), &["--out", "b", "oper-check"]);
    let a = fs::read_to_string(dir.path().join("a/oper_check.json")).unwrap();
    let b = fs::read_to_string(dir.path().join("b/oper_check.json")).unwrap();
    assert_eq!(a, b);
}
