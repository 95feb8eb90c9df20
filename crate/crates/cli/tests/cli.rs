use std::path::PathBuf;
use std::process::{Command, Output};

fn holonomy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy")).args(args).current_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_report(args: &[&str]) -> (i32, serde_json::Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = holonomy(&all);
    (o.status.code().unwrap(), serde_json::from_slice(&o.stdout).expect("json report"))
}

#[test]
fn singular_set_of_ex31() {
    let o = holonomy(&["orbifold", "analyze", "configs/ex31.toml"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("12 x (T^3 x C^2/{±1})"), "{}", stdout(&o));
}

#[test]
fn shipped_config_by_name_and_json_shape() {
    let (code, v) = json_report(&["orbifold", "analyze", "ex31"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["singular_set"]["components"].as_array().unwrap().len(), 12);
    for key in ["tool_version", "command", "checks", "timing_ms"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn json_is_deterministic_apart_from_timing() {
    let strip = |mut v: serde_json::Value| {
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    let args = ["comass", "--form", "g2-phi", "--restarts", "8", "--seed", "5"];
    assert_eq!(strip(json_report(&args).1), strip(json_report(&args).1));
}

#[test]
fn index_exit_codes() {
    let o = holonomy(&["pde", "index", "--tau", "0", "--chi", "0", "--self-int", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, v) = json_report(&["pde", "index", "--tau", "-16", "--chi", "24", "--self-int", "0"]);
    assert_eq!(v["data"]["index"], -28);
    let o = holonomy(&["pde", "index", "--tau", "0", "--chi", "3", "--self-int", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("odd"));
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(holonomy(&["--bogus"]).status.code(), Some(2));
    assert_eq!(holonomy(&["comass", "--form", "nope"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "dim = 3\n[[generator]]\nname = \"g\"\nmatrix = [[1, 0], [0, 1]]\n").unwrap();
    let o = holonomy(&["orbifold", "betti", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("generator[0].matrix"));
}

#[test]
fn structures_and_wps_pass() {
    assert_eq!(holonomy(&["verify", "structures"]).status.code(), Some(0));
    assert_eq!(holonomy(&["wps", "check-example"]).status.code(), Some(0));
    assert_eq!(holonomy(&["wps", "check-example", "--conductor", "4"]).status.code(), Some(2));
}

#[test]
fn betti_and_fixed_sets() {
    let (code, v) = json_report(&["orbifold", "betti", "configs/ex31.toml"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["betti"], serde_json::json!([1, 0, 0, 7, 7, 0, 0, 1]));
    let o = holonomy(&["orbifold", "fixed", "configs/ex31.toml", "--element", "a"]);
    assert!(stdout(&o).contains("16 x T^3"));
    let o = holonomy(&["orbifold", "fixed", "configs/ex31.toml", "--element", "abc"]);
    assert!(stdout(&o).contains("empty"));
}

#[test]
fn plane_classification_and_residual() {
    let dir = tempfile::tempdir().unwrap();
    let frame = dir.path().join("u.txt");
    std::fs::write(&frame, "1 0 0\n0 1 0\n0 0 1\n0 0 0\n0 0 0\n0 0 0\n0 0 0\n").unwrap();
    let (code, v) = json_report(&["plane", "classify", "--frame", frame.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["kind"], "ASSOCIATIVE");

    let jet = dir.path().join("jet.json");
    std::fs::write(&jet, r#"{"value": [0,0,0,0], "partials": [[0,0.1,0,0],[0,0,0,0],[0,0,0,0]]}"#).unwrap();
    let (code, v) = json_report(&["pde", "residual", "--kind", "assoc", "--jet", jet.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["calibrated"], false);
    std::fs::write(&jet, r#"{"partials": [[0,0,0,0]]}"#).unwrap();
    assert_eq!(holonomy(&["pde", "residual", "--kind", "cayley", "--jet", jet.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn solve_writes_trace_and_reports_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let o = holonomy(&["pde", "solve", "--grid", "8", "--eps", "1e-2", "--trace", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("iteration,residual,step,gmres_iterations\n"));
    assert!(csv.lines().count() >= 2);
    let o = holonomy(&["pde", "solve", "--grid", "8", "--eps", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("diverged") || stdout(&o).contains("did not converge"), "{}", stdout(&o));
}

#[test]
fn mclean_sweep() {
    let (code, v) = json_report(&["pde", "mclean", "--grid", "6", "--fields", "1", "--eps-sweep", "1e-2:1e-4"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"][0]["eps"].as_array().unwrap().len(), 3);
    assert_eq!(holonomy(&["pde", "mclean", "--eps-sweep", "x:1"]).status.code(), Some(2));
}
