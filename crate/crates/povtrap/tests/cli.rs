use std::path::PathBuf;
use std::process::{Command, Output};

fn povtrap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_povtrap")).args(args).env_remove("POVTRAP_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("povtrap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(line: &str) -> serde_json::Value {
    serde_json::from_str(line).unwrap()
}

#[test]
fn trap_single_point_is_one_json_record() {
    let o = povtrap(&["trap", "--x", "1.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    let v = json(out.trim());
    assert_eq!(v["x"], 1.5);
    assert!((v["value"].as_f64().unwrap() - 0.9179565382050622).abs() < 1e-11);
}

#[test]
fn csv_grid_header() {
    let o = povtrap(&["ep", "--omega-const", "0.02", "--x-grid", "0.5:1.5:0.5", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x,value,trap_bound,bounded"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn exit_codes() {
    let invalid = povtrap(&["trap", "--x", "1.5", "--ct", "1.44"]);
    assert_eq!(invalid.status.code(), Some(2));
    assert!(stderr(&invalid).contains("c_t"));
    assert_eq!(povtrap(&["trap"]).status.code(), Some(2));
    assert_eq!(povtrap(&["trap", "--x", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(povtrap(&["trap", "--x", "1.5", "--loss-table", "t.csv"]).status.code(), Some(2));
    assert_eq!(povtrap(&["simulate", "--trapping", "--x", "1.5"]).status.code(), Some(2));
    let missing = povtrap(&["trap", "--x", "1", "--config", "/nonexistent/povtrap.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(povtrap(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_and_single_source() {
    let cfg = scratch("params.json");
    std::fs::write(&cfg, r#"{"a": 0.1, "b": 4, "c_s": 0.4, "alpha": 0.8, "x": 1.5, "format": "csv"}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = povtrap(&["trap", "--config", cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("x,value,note\n1.50000000000,0.917956538205,"));

    let both = povtrap(&["trap", "--config", cfg, "--alpha", "0.9"]);
    assert_eq!(both.status.code(), Some(2));
    assert!(stderr(&both).contains("alpha"));

    let typo = scratch("typo.json");
    std::fs::write(&typo, r#"{"lamda": 1}"#).unwrap();
    let o = povtrap(&["trap", "--x", "1", "--config", typo.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lamda"));
}

#[test]
fn output_file_matches_stdout() {
    let path = scratch("trap.csv");
    let args = ["trap", "--x-grid", "1:3:1", "--format", "csv"];
    let direct = stdout(&povtrap(&args));
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    assert!(povtrap(&with_file).status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
}

#[test]
fn simulate_with_loss_table_and_trace() {
    let table = scratch("losses.csv");
    // Quantiles of Beta(1, 1): uniform losses.
    std::fs::write(&table, "u,z\n0,0.000001\n1,1\n").unwrap();
    let trace = scratch("trace.csv");
    let o = povtrap(&[
        "simulate",
        "--trapping",
        "--x",
        "1.5",
        "--n",
        "2000",
        "--seed",
        "1",
        "--workers",
        "2",
        "--loss-table",
        table.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
        "--trace-paths",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(stdout(&o).trim());
    let (lo, hi) = (v["ci_low"].as_f64().unwrap(), v["ci_high"].as_f64().unwrap());
    assert!(lo <= v["value"].as_f64().unwrap() && v["value"].as_f64().unwrap() <= hi);
    assert_eq!(v["n"], 2000);
    assert!(v["horizon_clean"].is_boolean());
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("x0,path,time,capital,event\n"));
    assert_eq!(text.lines().filter(|l| l.ends_with(",start")).count(), 3);

    std::fs::write(&table, "u,z\n0,0.5\n1,0.4\n").unwrap();
    let bad = povtrap(&["simulate", "--trapping", "--x", "1.5", "--seed", "1", "--loss-table", table.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn frontier_marks_unattainable_points() {
    let o = povtrap(&["frontier", "--kind", "trapping", "--target", "0.01", "--alpha", "1.25", "--x", "2", "--b-grid", "40:60:10", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "barrier,c_t,value,abs_error,status");
    assert_eq!(lines[1], "40.0000000000,NA,NA,NA,unattainable");
    assert!(lines[2].ends_with(",ok") && lines[3].ends_with(",ok"));

    let ep = povtrap(&["frontier", "--kind", "ep-const", "--omega", "0.09", "--target", "0.01", "--alpha", "1.25", "--x", "2", "--b-grid", "2:3:1"]);
    assert!(ep.status.success(), "{}", stderr(&ep));
    assert_eq!(stdout(&ep).lines().count(), 2);
}

#[test]
fn check_passes_on_reference_household() {
    let o = povtrap(&["check", "--n", "5000", "--workers", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn workers_from_environment() {
    let args = ["simulate", "--omega-exp", "0.02", "--x", "0.5", "--n", "1000", "--seed", "9", "--no-horizon-check"];
    let a = Command::new(env!("CARGO_BIN_EXE_povtrap")).args(args).env("POVTRAP_WORKERS", "1").output().unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_povtrap")).args(args).env("POVTRAP_WORKERS", "3").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("\"value_2h\":\"NA\""));
    let zero = Command::new(env!("CARGO_BIN_EXE_povtrap")).args(args).env("POVTRAP_WORKERS", "0").output().unwrap();
    assert_eq!(zero.status.code(), Some(2));
}
