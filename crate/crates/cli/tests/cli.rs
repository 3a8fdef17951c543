use std::fs;
use std::path::Path as FsPath;
use std::process::{Command, Output};

use slideplan::bench::read_csv;
use slideplan::planner::{Path, PlanResult, PlanStatus};
use slideplan::Scenario;

fn slideplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slideplan"))
        .args(args)
        .env_remove("SLIDEPLAN_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn arg(p: &FsPath) -> &str {
    p.to_str().unwrap()
}

#[test]
fn info_reports_graph() {
    let out = slideplan(&["info", "--builtin", "rect2dof"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("dof          2"));
    assert!(text.contains("9 states, 12 edges"));
}

#[test]
fn source_is_required_and_exclusive() {
    assert_eq!(code(&slideplan(&["info"])), 2);
    assert_eq!(code(&slideplan(&["info", "--builtin", "rect2dof", "--scenario", "x.json"])), 2);
    assert_eq!(code(&slideplan(&["info", "--builtin", "nope"])), 2);
    assert_eq!(code(&slideplan(&["info", "--scenario", "/nonexistent/s.json"])), 2);
}

#[test]
fn bad_numbers_are_usage_errors() {
    assert_eq!(code(&slideplan(&["bench", "--builtin", "rect2dof", "--runs", "0"])), 2);
    assert_eq!(code(&slideplan(&["solve", "--builtin", "rect2dof", "--time", "-1"])), 2);
    assert_eq!(code(&slideplan(&["solve", "--builtin", "rect2dof", "--planner", "astar"])), 2);
}

#[test]
fn solve_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("path.json");
    let out = slideplan(&["solve", "--builtin", "rect2dof", "--seed", "3", "--time", "10", "--out", arg(&file)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("rrt (default)"));
    assert_eq!(code(&slideplan(&["validate", "--builtin", "rect2dof", "--path", arg(&file)])), 0);

    // wrong scenario
    assert_eq!(code(&slideplan(&["validate", "--builtin", "rect7dof", "--path", arg(&file)])), 1);

    // a waypoint pushed far off its constraints
    let mut result: PlanResult = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(result.seed, 3);
    let path = result.path.as_mut().unwrap();
    let mid = path.waypoints.len() / 2;
    path.waypoints[mid].q.as_mut_slice()[0] += 0.6;
    fs::write(&file, serde_json::to_string(&result).unwrap()).unwrap();
    let out = slideplan(&["validate", "--builtin", "rect2dof", "--path", arg(&file)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("invalid"));
}

#[test]
fn malformed_path_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("path.json");
    fs::write(&file, "{\"path\": [1, 2").unwrap();
    assert_eq!(code(&slideplan(&["validate", "--builtin", "rect2dof", "--path", arg(&file)])), 2);
}

#[test]
fn empty_path_when_start_is_goal() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&Scenario::builtin("rect2dof").unwrap().to_json()).unwrap();
    doc["problem"]["q_goal"] = doc["problem"]["q_start"].clone();
    doc["problem"]["goal_modes"] = doc["problem"]["start_modes"].clone();
    let scenario = dir.path().join("still.json");
    fs::write(&scenario, doc.to_string()).unwrap();

    let result = PlanResult {
        scenario: "rect2dof".into(),
        planner: "rrt".into(),
        seed: 0,
        status: PlanStatus::Solved,
        time_s: 0.0,
        iterations: 0,
        graph_size: 1,
        path: Some(Path::default()),
    };
    let file = dir.path().join("empty.json");
    fs::write(&file, serde_json::to_string(&result).unwrap()).unwrap();
    assert_eq!(code(&slideplan(&["validate", "--scenario", arg(&scenario), "--path", arg(&file)])), 0);
    // the same empty path does not solve the real task
    assert_eq!(code(&slideplan(&["validate", "--builtin", "rect2dof", "--path", arg(&file)])), 1);
}

#[test]
fn timeout_exit_code() {
    let out = slideplan(&["solve", "--builtin", "sphere3dof", "--planner", "prm", "--time", "1e-9"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn bench_csv_on_stdout_table_on_stderr() {
    let out = slideplan(&["bench", "--builtin", "firstJointSliding", "--planners", "rrt", "--runs", "2", "--time", "5"]);
    assert_eq!(code(&out), 0);
    let records = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records.iter().map(|r| r.seed).collect::<Vec<_>>(), [0, 1]);
    let table = String::from_utf8(out.stderr).unwrap();
    assert!(table.starts_with("scenario"));
}

#[test]
fn bench_csv_file_and_env_seed() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("runs.csv");
    let summary = dir.path().join("summary.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_slideplan"))
        .args(["bench", "--builtin", "firstJointSliding", "--runs", "2", "--time", "5", "--parallel", "2"])
        .args(["--csv", arg(&csv), "--summary-csv", arg(&summary)])
        .env("SLIDEPLAN_SEED", "40")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("firstJointSliding"));
    let records = read_csv(fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| r.seed == 40 + r.run as u64));
    let summary = fs::read_to_string(&summary).unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn bench_rows_and_repeatability() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for i in 0..2 {
        let csv = dir.path().join(format!("run{i}.csv"));
        let args = ["bench", "--builtin", "rect2dof", "--planners", "rrt,prm", "--runs", "10", "--time", "2"];
        let out = slideplan(&[&args[..], &["--csv", arg(&csv)]].concat());
        assert_eq!(code(&out), 0);
        let text = fs::read_to_string(&csv).unwrap();
        assert_eq!(text.lines().count(), 21);
        // wall-clock times differ between invocations; every other column must not
        let body: Vec<Vec<String>> = text
            .lines()
            .map(|l| l.split(',').enumerate().filter(|(k, _)| *k != 5).map(|(_, c)| c.to_string()).collect())
            .collect();
        bodies.push(body);
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn solve_unknown_builtin() {
    assert_eq!(code(&slideplan(&["solve", "--builtin", "nosuch"])), 2);
}
