use std::path::Path;
use std::process::{Command, Output};

use microreg::cli::report::parse_trajectory;
use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_microreg")).args(args).current_dir(dir).output().expect("binary runs")
}

fn report(args: &[&str], dir: &Path) -> Value {
    let out = run(args, dir);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn code(args: &[&str], dir: &Path) -> i32 {
    run(args, dir).status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn ints(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

#[test]
fn dist_info_growth_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&["dist", "info", "martinet", "--point", "0,0,0"], dir.path());
    assert_eq!(ints(&r["results"]["growth_vector"]), [2, 2, 3]);
    assert_eq!(r["results"]["step"], 3);
    assert_eq!(r["results"]["regular_at_point"], false);
    let r = report(&["dist", "info", "heisenberg", "--point", "0,0,0"], dir.path());
    assert_eq!(ints(&r["results"]["growth_vector"]), [2, 3]);
    assert_eq!(r["results"]["step"], 2);
    assert_eq!(code(&["dist", "info", "heisenberg", "--point", "0,zero,0"], dir.path()), 2);
    assert_eq!(code(&["dist", "info", "heisenberg", "--point", "0,0"], dir.path()), 2);
    assert_eq!(code(&["dist", "info", "no-such-model"], dir.path()), 2);
}

#[test]
fn report_envelope_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(&["jet", "lift", "engel", "--controls", "t,1+t^2", "--order", "5"], dir.path());
    let b = run(&["jet", "lift", "engel", "--controls", "t,1+t^2", "--order", "5"], dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["command", "exactness", "inputs", "results", "tool_version", "warnings"]);
    assert_eq!(v["exactness"], "exact");
    assert_eq!(v["inputs"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn lift_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "diag.json", r#"{"basepoint": [0, 0, 0], "controls": ["t", "t"]}"#);
    let r = report(&["lift", "martinet", "--curve", "diag.json", "--out", "traj.dat"], dir.path());
    let end: Vec<f64> = r["results"]["endpoint"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((end[0] - 1.0).abs() < 1e-12 && (end[1] - 1.0).abs() < 1e-12 && (end[2] - 1.0 / 3.0).abs() < 1e-9);
    let (header, rows) = parse_trajectory(&std::fs::read_to_string(dir.path().join("traj.dat")).unwrap()).unwrap();
    assert_eq!(header["model"], "martinet");
    assert_eq!(header["columns"], "t x1 x2 y");
    assert_eq!(rows.len(), 1001);
    assert!((rows[1000][3] - 1.0 / 3.0).abs() < 1e-9);

    write(dir.path(), "zero.json", r#"{"basepoint": [0, 0, 5], "controls": ["0", "0"]}"#);
    let r = report(&["lift", "martinet", "--curve", "zero.json", "--step", "0.01"], dir.path());
    assert_eq!(r["results"]["endpoint"], serde_json::json!([0.0, 0.0, 5.0]));

    write(dir.path(), "bad.json", r#"{"basepoint": [1, 0, 0], "controls": ["t", "t"]}"#);
    assert_eq!(code(&["lift", "martinet", "--curve", "bad.json"], dir.path()), 2);
    write(dir.path(), "junk.json", r#"{"basepoint": [0, 0, 0]}"#);
    assert_eq!(code(&["lift", "martinet", "--curve", "junk.json"], dir.path()), 2);
}

#[test]
fn sampled_curves_lift() {
    let dir = tempfile::tempdir().unwrap();
    let times: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
    let values: Vec<[f64; 2]> = times.iter().map(|t| [*t, 0.0]).collect();
    let doc = serde_json::json!({"basepoint": [0, 0, 0], "controls": {"times": times, "values": values}});
    write(dir.path(), "s.json", &doc.to_string());
    let r = report(&["classify", "heisenberg", "--curve", "s.json"], dir.path());
    assert_eq!(r["results"]["verdict"], "regular");
}

#[test]
fn classify_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "line.json", r#"{"basepoint": [0, 0, 0], "controls": ["t", "0"]}"#);
    let r = report(&["classify", "martinet", "--curve", "line.json"], dir.path());
    assert_eq!(r["results"]["verdict"], "singular");
    assert_eq!(r["results"]["jacobian"]["matrix"].as_array().unwrap().len(), 1);
    let r = report(&["classify", "heisenberg", "--curve", "line.json", "--directions", "4"], dir.path());
    assert_eq!(r["results"]["verdict"], "regular");
    assert_eq!(r["results"]["directions_used"], 4);
    // A band containing σ_min forces the middle verdict, with both tolerances reported.
    let r = report(&["classify", "heisenberg", "--curve", "line.json", "--tol", "10", "--tol-low", "1e-8"], dir.path());
    assert_eq!(r["results"]["verdict"], "inconclusive");
    assert_eq!(r["results"]["tol"], 10.0);
    assert_eq!(r["results"]["tol_low"], 1e-8);
}

#[test]
fn deform_reports_fixed_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "line.json", r#"{"basepoint": [0, 0, 0], "controls": ["t", "0"]}"#);
    let r = report(&["deform", "heisenberg", "--curve", "line.json", "--channel", "1", "--steps", "3"], dir.path());
    assert!(r["results"]["endpoint_drift"].as_f64().unwrap() < 1e-9);
    assert_eq!(r["results"]["s"].as_array().unwrap().len(), 3);
    assert_eq!(code(&["deform", "martinet", "--curve", "line.json", "--channel", "1"], dir.path()), 3);
}

#[test]
fn abnormal_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(
        &["abnormal", "martinet", "--covector", "0,0,0;1", "--stratum", "martinet-x2zero", "--out", "ab.dat"],
        dir.path(),
    );
    assert_eq!(r["results"]["completed"], true);
    let end = r["results"]["projected_endpoint"].as_array().unwrap();
    assert!((end[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let (header, rows) = parse_trajectory(&std::fs::read_to_string(dir.path().join("ab.dat")).unwrap()).unwrap();
    for key in ["model", "cp0", "T", "h"] {
        assert!(header.contains_key(key), "missing header {key}");
    }
    assert_eq!(header["columns"], "t x1 x2 y a kernel_rank residual");
    assert!(rows.iter().all(|r| r[5] == 1.0));
    assert_eq!(code(&["abnormal", "heisenberg", "--covector", "0,0,0;1", "--stratum", "heisenberg-z1"], dir.path()), 3);
    assert_eq!(code(&["abnormal", "martinet", "--covector", "0,1,0;1", "--stratum", "martinet-x2zero"], dir.path()), 2);
    assert_eq!(code(&["abnormal", "martinet", "--covector", "0,0,0", "--stratum", "martinet-x2zero"], dir.path()), 2);

    write(dir.path(), "cp.json", r#"{"base": ["0", "0", "0", "0"], "fiber": ["0", "1"]}"#);
    let r = report(&["abnormal", "engel", "--covector", "cp.json", "--stratum", "engel-z2", "--time", "0.5"], dir.path());
    let end = r["results"]["projected_endpoint"].as_array().unwrap();
    assert!((end[1].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn abnormal_with_a_stratum_file() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "s.json",
        r#"{"name": "line", "ambient": "Z1", "level": 2, "equations": ["x2"], "inequations": ["a"], "coframe_selection": [0]}"#,
    );
    let r = report(&["abnormal", "martinet", "--covector", "2,0,1;3", "--stratum", "s.json", "--time", "0.25"], dir.path());
    let end = r["results"]["projected_endpoint"].as_array().unwrap();
    assert!((end[0].as_f64().unwrap() - 2.25).abs() < 1e-9);
}

#[test]
fn jet_lift_and_checks() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&["jet", "lift", "heisenberg", "--controls", "t,t", "--order", "2", "--out", "j.json"], dir.path());
    assert_eq!(r["results"]["coordinate_series"]["y"], serde_json::json!(["0", "0", "1/2"]));
    assert_eq!(r["results"]["horizontal"], true);
    // The check accepts both the bare jet and the report that contains it.
    std::fs::write(dir.path().join("report.json"), serde_json::to_vec(&r).unwrap()).unwrap();
    for f in ["j.json", "report.json"] {
        let c = report(&["jet", "check", "heisenberg", "--jet", f], dir.path());
        assert_eq!(c["results"]["horizontal"], true);
    }
    write(
        dir.path(),
        "bad.json",
        r#"{"ambient": "M", "order": 1, "base": ["0", "0", "0"], "taylor": [["1", "1", "1"]]}"#,
    );
    assert_eq!(report(&["jet", "check", "heisenberg", "--jet", "bad.json"], dir.path())["results"]["horizontal"], false);

    write(
        dir.path(),
        "zero.json",
        r#"{"ambient": "Z1", "order": 1, "base": ["0", "0", "0", "0"], "taylor": [["1", "0", "0", "0"]]}"#,
    );
    assert_eq!(code(&["jet", "characteristic", "martinet", "--jet", "zero.json"], dir.path()), 2);
    write(
        dir.path(),
        "char.json",
        r#"{"ambient": "Z1", "order": 2, "base": ["0", "0", "0", "1"], "taylor": [["1", "0", "0", "0"], ["0", "0", "0", "0"]]}"#,
    );
    let c = report(&["jet", "characteristic", "martinet", "--jet", "char.json"], dir.path());
    assert_eq!(c["results"]["characteristic"], true);
    assert_eq!(c["results"]["kernel_rank_at_base"], 2);
}

#[test]
fn tangency_membership_via_cli() {
    let dir = tempfile::tempdir().unwrap();
    // The abnormal line of the Martinet model is in the tangency family of {x2 = 0}.
    report(&["jet", "lift", "martinet", "--controls", "t,0", "--order", "3", "--out", "line.json"], dir.path());
    let c = report(&["jet", "check", "martinet", "--jet", "line.json"], dir.path());
    let members: Vec<(String, bool)> = c["results"]["memberships"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| (m["stratum"].as_str().unwrap().to_string(), m["member"].as_bool().unwrap()))
        .collect();
    assert!(members.contains(&("martinet-x2zero".to_string(), true)));
    assert_eq!(c["results"]["microregular"], false);
    report(&["jet", "lift", "martinet", "--controls", "t,1+t", "--order", "3", "--out", "off.json"], dir.path());
    let c = report(&["jet", "check", "martinet", "--jet", "off.json"], dir.path());
    assert_eq!(c["results"]["microregular"], true);
}

#[test]
fn audit_tables() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&["audit", "martinet", "--orders", "2..12"], dir.path());
    let rows = r["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    for row in rows {
        let order = row["r"].as_u64().unwrap();
        assert_eq!(row["dim_horizontal"].as_u64().unwrap(), 2 * order + 3);
    }
    let r = report(&["audit", "engel", "--orders", "2..12"], dir.path());
    for row in r["results"]["rows"].as_array().unwrap() {
        assert_eq!(row["dim_horizontal"].as_u64().unwrap(), 2 * row["r"].as_u64().unwrap() + 4);
    }
    assert_eq!(code(&["audit", "martinet", "--orders", "5..2"], dir.path()), 2);
    assert_eq!(code(&["audit", "martinet", "--orders", "0..2"], dir.path()), 2);
}

#[test]
fn strata_partitions() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&["strata", "martinet", "--matrix", "flag", "--grid", "x2={-1,-1/2,0,1/2,1}", "--minors", "3"], dir.path());
    let res = &r["results"];
    assert_eq!(res["matrix"]["level"], 2);
    assert_eq!(res["partition"]["histogram"], serde_json::json!({"2": 1, "3": 4}));
    assert_eq!(res["partition"]["grid_maximal_rank"], 3);
    assert_eq!(res["partition"]["locus_fixed_coordinates"], serde_json::json!({"x2": "0"}));
    assert_eq!(res["minors"], serde_json::json!(["-2*x2"]));
    let r = report(&["strata", "engel", "--grid", "x1=-1:1:3; x2=-2:2:3; y1={0,1}"], dir.path());
    assert_eq!(r["results"]["partition"]["histogram"], serde_json::json!({"4": 18}));
    assert_eq!(code(&["strata", "engel", "--grid", ""], dir.path()), 2);
    assert_eq!(code(&["strata", "engel", "--grid", "q=1"], dir.path()), 2);

    write(dir.path(), "m.json", r#"{"rows": [["x1", "x2"], ["x2", "x1"]]}"#);
    let r = report(&["strata", "heisenberg", "--matrix", "custom", "--matrix-file", "m.json", "--grid", "x1=-1:1:3; x2=-1:1:3"], dir.path());
    assert_eq!(r["results"]["partition"]["histogram"], serde_json::json!({"0": 1, "1": 4, "2": 4}));
    let out = run(&["strata", "martinet", "--float", "--grid", "x2={-1,0,1}", "--out", "rep.json"], dir.path());
    assert!(out.status.success() && out.stdout.is_empty());
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    assert_eq!(saved["exactness"], "float");
}

#[test]
fn model_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "cartan.json",
        r#"{"name": "cartan", "dim": 5, "rank": 2, "coords": ["x1", "x2", "y1", "y2", "y3"],
            "frame": [["1", "0", "0", "0", "0"], ["0", "1", "x1", "x1^2", "x1*x2"]]}"#,
    );
    let r = report(&["dist", "info", "cartan.json"], dir.path());
    assert_eq!(ints(&r["results"]["growth_vector"]), [2, 3, 5]);
    write(dir.path(), "broken.json", r#"{"name": "b", "dim": 2, "rank": 1, "coords": ["u", "v"], "frame": [["0", "1"]]}"#);
    assert_eq!(code(&["dist", "info", "broken.json"], dir.path()), 2);
}
