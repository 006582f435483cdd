use std::process::{Command, Output};

const SQUARE: &str = r#"{"type":"polytope","vertices":[[0,0],[1,0],[1,1],[0,1]]}"#;
const DISC: &str = r#"{"type":"ball","center":[0,0],"radius":1}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ulamfloat"))
        .args(args)
        .env_remove("ULAMFLOAT_THREADS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn cut_of_the_square() {
    let out = run(&["cut", "--body", SQUARE, "--theta", "1,0", "--delta", "0.1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["d"].as_f64().unwrap() - 0.9).abs() < 1e-12);
    let b: Vec<f64> = serde_json::from_value(v["barycenter"].clone()).unwrap();
    assert!((b[0] - 0.95).abs() < 1e-12 && (b[1] - 0.5).abs() < 1e-12);
    assert_eq!(v["seed"], 7);
    assert!(v["version"].is_string() && v["config"]["cut"]["delta"] == 0.1);
}

#[test]
fn body_spec_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sq.json");
    std::fs::write(&path, SQUARE).unwrap();
    let out = run(&["body", "--body", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!((json(&out)["volume"].as_f64().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn bad_input_exits_with_two_and_names_the_field() {
    let out = run(&["cut", "--body", r#"{"type":"ball","center":[0,0],"radius":-1}"#, "--theta", "1,0", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius"));
    let out = run(&["cut", "--body", SQUARE, "--theta", "1,0,0", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta"));
    let out = run(&["body", "--body", "/nonexistent/body.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_env_overrides_the_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_ulamfloat"))
        .args(["--threads", "2", "body", "--body", SQUARE])
        .env("ULAMFLOAT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ULAMFLOAT_THREADS"));
}

#[test]
fn limit_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = run(&["--threads", threads, "limit", "--body", DISC, "--steps", "3", "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(path).unwrap()
    };
    let a = read("a.csv", "1");
    let b = read("b.csv", "4");
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "k,delta,ratio_lo,ratio_hi,extrapolated,reference");
    assert_eq!(lines.len(), 4);
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells[0], "0");
    assert_eq!(cells[1], "1.0000000000000000e-2");
    assert!(a.contains("# seed: 7") && a.contains("# config:"));
}

#[test]
fn check_exit_codes() {
    let out = run(&["check", "sandwich", "--body", SQUARE, "--delta", "0.02", "--dirs", "64"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["holds"], true);
    // symmetric identity holds on the normalized square
    let out = run(&["check", "symmetry", "--body", SQUARE, "--delta", "0.2", "--dirs", "16"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn grad_check_reports_deviation() {
    let out = run(&["grad-check", "--body", DISC, "--samples", "5"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("max FD deviation"));
    assert_eq!(json(&out)["checks"].as_array().unwrap().len(), 5);
}

#[test]
fn float2d_disc_and_square() {
    let out = run(&["float2d", "--body", DISC, "--rho", "0.3", "--angles", "256"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["floats-in-every-position"], true);
    let out = run(&["float2d", "--body", SQUARE, "--rho", "0.5", "--angles", "1024"]);
    let v = json(&out);
    assert_eq!(v["floats-in-every-position"], false);
    assert_eq!(v["count"], 8);
}

#[test]
fn asa_of_the_disc() {
    let out = run(&["asa", "--body", DISC, "--p", "1"]);
    let v = json(&out);
    assert!((v["as_p"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-9);
}
