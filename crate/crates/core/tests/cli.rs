use std::process::{Command, Output};

use fqgroups::cli::{run_experiment, ExperimentConfig, OutputFormat, Status};
use proptest::prelude::*;
use serde_json::Value;

fn fqgroups(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqgroups")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn default_config_round_trips() {
    let config = ExperimentConfig::default();
    let back: ExperimentConfig = serde_json::from_str(&config.to_json()).unwrap();
    assert_eq!(back, config);
    assert!(config.validate().is_ok());
}

#[test]
fn partial_config_takes_defaults() {
    let config: ExperimentConfig = serde_json::from_str(r#"{"seed": 7, "e8": {"n_max": 2}}"#).unwrap();
    assert_eq!(config.seed, 7);
    assert_eq!(config.e8.n_max, 2);
    assert_eq!(config.e8.p, vec![2, 3]);
    assert_eq!(config.e1, ExperimentConfig::default().e1);
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(serde_json::from_str::<ExperimentConfig>(r#"{"sede": 1}"#).is_err());
    let mut config = ExperimentConfig::default();
    config.e4.q.clear();
    assert!(config.validate().is_err());
    let mut config = ExperimentConfig::default();
    config.bounds.group_order = 0;
    assert!(config.validate().is_err());
    let mut config = ExperimentConfig::default();
    config.e7.p_min = 40;
    assert!(run_experiment("E7", &config).is_err());
    assert!(run_experiment("E9", &ExperimentConfig::default()).is_err());
}

proptest! {
    #[test]
    fn config_round_trips(
        seed in any::<u64>(),
        group_order in 1usize..1_000_000,
        s_search in proptest::option::of(1usize..100),
        q in proptest::collection::vec(2u64..50, 1..5),
        n_max in 1usize..8,
        csv in any::<bool>(),
    ) {
        let mut config = ExperimentConfig { seed, ..ExperimentConfig::default() };
        config.bounds.group_order = group_order;
        config.bounds.s_search = s_search;
        config.e1.q = q.clone();
        config.e6.q = q;
        config.e4.n_max = n_max;
        config.output.format = if csv { OutputFormat::Csv } else { OutputFormat::Both };
        let back: ExperimentConfig = serde_json::from_str(&config.to_json()).unwrap();
        prop_assert_eq!(back, config);
    }
}

#[test]
fn small_grid_is_bounded_and_labelled() {
    let mut config = ExperimentConfig::default();
    config.bounds.group_order = 50;
    let records = run_experiment("E8", &config).unwrap();
    let skipped: Vec<_> = records.iter().filter(|r| r.status == Status::Skipped).collect();
    assert_eq!(skipped.len(), 1, "only Ga(F_81) exceeds 50");
    assert_eq!((skipped[0].q, skipped[0].n), (3, 4));
    assert!(skipped[0].note.as_deref().unwrap().contains("group_order"));
    assert!(records.iter().all(|r| r.status != Status::Fail));
}

#[test]
fn image_subcommand() {
    let out = fqgroups(&["image", "--isogeny", "pow:3", "--group", "Gm", "--q", "7", "--n", "2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["index"], 3);
    assert_eq!(v["equal"], true);
}

#[test]
fn order_and_points_subcommands() {
    let out = fqgroups(&["order", "--group", "SL", "--q", "5"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["bn_order"], "120");
    assert_eq!(v["enumerated_center"], 2);
    let out = fqgroups(&["points", "--group", "NormTorus", "--q", "7"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["order"], 36);
}

#[test]
fn kernel_and_cokernel_subcommands() {
    let out = fqgroups(&["kernel", "--isogeny", "pow:3", "--group", "Gm", "--q", "2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!((v["order"].as_u64(), v["minimal_degree"].as_u64()), (Some(3), Some(2)));
    let out = fqgroups(&["cokernel", "--isogeny", "normcover", "--group", "NormTorus", "--q", "7"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["isomorphic"], true);
    assert_eq!(v["cokernel_invariants"], serde_json::json!([2]));
    assert_eq!(v["mu"]["surjective"], true);
}

#[test]
fn census_subcommand_with_reach() {
    let out = fqgroups(&["census", "--group", "NormTorus", "--q", "13", "--k", "2", "--reach", "normcover"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["count"], 3);
    let reached: Vec<Vec<String>> = serde_json::from_value(v["reached_by"].clone()).unwrap();
    assert_eq!(reached.iter().filter(|r| !r.is_empty()).count(), 1);
}

#[test]
fn errors_exit_with_two() {
    let out = fqgroups(&["experiment", "E9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fqgroups(&["image", "--isogeny", "pow:2", "--group", "Gm", "--q", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_writes_reports_and_honours_config() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, r#"{"seed": 3, "output": {"format": "both"}, "e8": {"p": [2], "n_max": 3}}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_fqgroups"))
        .args(["experiment", "e8", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<Value> = std::fs::read_to_string(out_dir.join("E8.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[2]["count"], 7);
    let csv = std::fs::read_to_string(out_dir.join("E8.csv")).unwrap();
    assert!(csv.starts_with("experiment,spec,isogeny,q,n,k,order,count,status,note,flags"));
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["all_passed"], true);
    assert_eq!(summary["experiments"][0]["passed"], 3);
}
