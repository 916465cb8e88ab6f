use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn handover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_handover"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Default scenario for `seed`, written into `dir`.
fn gen(dir: &TempDir, seed: u64) -> PathBuf {
    let out = dir.path().join(format!("scenario-{seed}.json"));
    let o = handover(&["gen", "--seed", &seed.to_string(), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key}= line in {text}"))
        .to_string()
}

#[test]
fn gen_defaults_and_determinism() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let o = handover(&["gen", "--seed", "7", "--out", p(&a)]);
    assert_eq!(code(&o), 0);
    let err = stderr(&o);
    assert_eq!(field(&err, "M"), "20");
    assert_eq!(field(&err, "region_m"), "10000");
    assert!(err.contains("class=large count=1 radius_m=7943.0"), "{err}");
    assert!(err.contains("class=medium count=2 radius_m=2482.0"), "{err}");
    assert!(err.contains("class=small count=17 radius_m=1300.9"), "{err}");
    handover(&["gen", "--seed", "7", "--out", p(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn gen_rejects_empty_mix() {
    let o = handover(&["gen", "--large", "0", "--medium", "0", "--small", "0"]);
    assert_eq!(code(&o), 3);
    let o = handover(&["gen", "--region-m", "-5"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(code(&handover(&["frobnicate"])), 3);
    assert_eq!(code(&handover(&["plan", "/no/such/file.json"])), 3);
    assert_eq!(code(&handover(&["--help"])), 0);
}

#[test]
fn plan_then_validate() {
    let dir = TempDir::new().unwrap();
    let scenario = gen(&dir, 3);
    for method in ["proposed", "shortest-time", "genetic"] {
        let plan = dir.path().join(format!("{method}.json"));
        let o = handover(&["plan", p(&scenario), "--method", method, "--out", p(&plan)]);
        assert_eq!(code(&o), 0, "{method}: {}", stderr(&o));
        let err = stderr(&o);
        let n: u32 = field(&err, "handovers").parse().unwrap();
        let t: f64 = field(&err, "time_s").parse().unwrap();
        assert!(t > 0.0 && t <= 270.0 + 1e-3);

        let trace = dir.path().join(format!("{method}-trace.json"));
        let o = handover(&["validate", p(&scenario), p(&plan), "--out", p(&trace)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
        assert_eq!(v["feasible"], true);
        assert_eq!(v["handover_events"].as_array().unwrap().len() as u32, n);
    }
}

#[test]
fn zero_budget_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let scenario = gen(&dir, 3);
    let o = handover(&["plan", p(&scenario), "--t-max", "0"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("infeasible"));
}

#[test]
fn tampered_plan_names_coverage() {
    let dir = TempDir::new().unwrap();
    let scenario = gen(&dir, 3);
    let plan = dir.path().join("plan.json");
    assert_eq!(code(&handover(&["plan", p(&scenario), "--out", p(&plan)])), 0);
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&plan).unwrap()).unwrap();
    let wps = v["waypoints"].as_array_mut().unwrap();
    assert!(wps.len() >= 2);
    wps[1]["xy_m"] = serde_json::json!([1.0e6, 1.0e6]);
    std::fs::write(&plan, v.to_string()).unwrap();
    let o = handover(&["validate", p(&scenario), p(&plan)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("coverage violated"), "{}", stderr(&o));
    let trace: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(trace["feasible"], false);
    assert_eq!(trace["violation"]["constraint"], "coverage");
}

#[test]
fn plan_for_another_scenario_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let big = gen(&dir, 3);
    let small = dir.path().join("small.json");
    assert_eq!(
        code(&handover(&["gen", "--small", "2", "--region-m", "100", "--out", p(&small)])),
        0
    );
    let plan = dir.path().join("plan.json");
    let o = handover(&["plan", p(&big), "--out", p(&plan)]);
    assert_eq!(code(&o), 0);
    let ids: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&plan).unwrap()).unwrap();
    if ids["association"].as_array().unwrap().iter().any(|id| id.as_u64().unwrap() > 2) {
        assert_eq!(code(&handover(&["validate", p(&small), p(&plan)])), 3);
    }
    std::fs::write(&plan, "{\"association\": 1}").unwrap();
    assert_eq!(code(&handover(&["validate", p(&big), p(&plan)])), 3);
}

#[test]
fn config_file_is_applied() {
    let dir = TempDir::new().unwrap();
    let scenario = gen(&dir, 3);
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"solver": {"k_candidates": 0}}"#).unwrap();
    assert_eq!(code(&handover(&["--config", p(&cfg), "plan", p(&scenario)])), 3);
    std::fs::write(&cfg, r#"{"solvr": {}}"#).unwrap();
    assert_eq!(code(&handover(&["--config", p(&cfg), "plan", p(&scenario)])), 3);
    std::fs::write(
        &cfg,
        r#"{"solver": {"k_candidates": 5, "step_rule": {"rule": "constant", "s0": 0.001}},
            "genetic": {"population_size": 10, "generations": 5}}"#,
    )
    .unwrap();
    let o = handover(&["--config", p(&cfg), "plan", p(&scenario)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let plan: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(plan["solver_meta"]["candidates_examined"].as_u64().unwrap() <= 6);
}

#[test]
fn genetic_seed_flag_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let scenario = gen(&dir, 11);
    let run = || handover(&["--seed", "4", "plan", p(&scenario), "--method", "genetic"]).stdout;
    assert_eq!(run(), run());
}

#[derive(Debug, serde::Deserialize)]
struct Row {
    axis_value: f64,
    method: String,
    handovers: Option<u32>,
    time_s: Option<f64>,
    feasible: bool,
}

fn read_rows(path: &Path) -> Vec<Row> {
    csv::Reader::from_path(path)
        .unwrap()
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap()
}

#[test]
fn single_value_sweep() {
    let dir = TempDir::new().unwrap();
    let scenario = gen(&dir, 3);
    let out = dir.path().join("sweep.csv");
    let o = handover(&[
        "sweep",
        "--scenario",
        p(&scenario),
        "--axis",
        "t_max",
        "--values",
        "270",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 3);
    let methods: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(methods, ["proposed", "shortest_time", "genetic"]);
    assert!(rows.iter().all(|r| r.axis_value == 270.0));
    let svg = std::fs::read_to_string(out.with_extension("svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("</svg>"));
}

#[test]
fn sweep_spec_file_with_blank_cells() {
    let dir = TempDir::new().unwrap();
    let scenario = gen(&dir, 3);
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        format!(
            r#"{{"axis": "t_max", "values": [0, 270, 400], "base_scenario": "{}", "methods": ["proposed", "shortest_time"]}}"#,
            scenario.file_name().unwrap().to_str().unwrap()
        ),
    )
    .unwrap();
    let out = dir.path().join("rows.csv");
    let svg = dir.path().join("chart.svg");
    let o = handover(&["sweep", p(&spec), "--out", p(&out), "--svg", p(&svg)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 6);
    assert!(rows[..2].iter().all(|r| !r.feasible && r.handovers.is_none() && r.time_s.is_none()));
    assert!(rows[2..].iter().all(|r| r.handovers.is_some()));
    assert!(svg.exists());

    std::fs::write(
        &spec,
        format!(
            r#"{{"axis": "t_max", "values": [270, 100], "base_scenario": "{}", "methods": []}}"#,
            p(&scenario)
        ),
    )
    .unwrap();
    assert_eq!(code(&handover(&["sweep", p(&spec)])), 3);
}

#[test]
fn plan_csv_format() {
    let dir = TempDir::new().unwrap();
    let scenario = gen(&dir, 3);
    let o = handover(&["--format", "csv", "plan", p(&scenario)]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("t_s,x_m,y_m,serving_gbs\n"));
}
