//! End-to-end tests of the CLI: exit codes, file outputs, schema
//! stability and byte-level reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pilotwave"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&read(path)).expect("valid JSON")
}

#[test]
fn deutsch_bell_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "deutsch",
        "--model",
        "bell",
        "--oracle",
        "f0",
        "-n",
        "20",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["outcome"], "constant");
    assert_eq!(summary["model"], "bell");
    assert!((summary["displacement"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(summary["invariants"]["unanimous"], true);
    // all three files exist with headers
    assert!(read(&dir.path().join("trajectories.csv")).starts_with("t,trajectory_id,y"));
    assert!(read(&dir.path().join("density.csv")).starts_with("coord,era,bin_left"));
}

#[test]
fn deutsch_well_balanced() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "deutsch",
        "--model",
        "well",
        "--oracle",
        "f1",
        "--mass",
        "1",
        "-n",
        "20",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["outcome"], "balanced");
    let d = summary["displacement"].as_f64().unwrap();
    let want = 0.05 * 4.0 * std::f64::consts::PI.powi(2);
    assert!((d - want).abs() < 1e-9, "displacement {d}");
    assert!(read(&dir.path().join("trajectories.csv")).starts_with("t,trajectory_id,x,y,z"));
}

#[test]
fn unknown_oracle_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "deutsch",
        "--model",
        "well",
        "--oracle",
        "f9",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ambiguous_readout_is_physics_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "deutsch",
        "--model",
        "bell",
        "--oracle",
        "f0",
        "--sigma",
        "0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ambiguous"));
}

#[test]
fn gate_unavailable_in_bell_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "gate",
        "--gate",
        "hadamard",
        "--model",
        "bell",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gate_runs_emit_figure_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "gate",
        "--gate",
        "hadamard",
        "--mass",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&dir.path().join("summary.json"));
    // figure default: 20 trajectories from |1⟩
    assert_eq!(summary["config"]["n"], 20);
    assert_eq!(summary["initial"], "1");
    // final-density block integrates |sin(πx) - sin(2πx)|² masses
    let density = read(&dir.path().join("density.csv"));
    let total: f64 = density
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("x,final"))
        .map(|l| l.split(',').nth(5).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9, "final masses sum to {total}");
}

#[test]
fn t_gate_from_basis_state_is_static() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "gate", "--gate", "t", "--from", "0", "--mass", "1", "-n", "5",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = read(&dir.path().join("trajectories.csv"));
    // every trajectory's x stays where it started
    let mut first: Vec<(usize, f64)> = Vec::new();
    for line in body.lines().skip(1) {
        let mut cols = line.split(',');
        let _t = cols.next().unwrap();
        let id: usize = cols.next().unwrap().parse().unwrap();
        let x: f64 = cols.next().unwrap().parse().unwrap();
        match first.iter().find(|(i, _)| *i == id) {
            None => first.push((id, x)),
            Some((_, x0)) => assert!((x - x0).abs() < 1e-10, "trajectory {id} moved"),
        }
    }
}

#[test]
fn verify_default_ok_and_coarse_fails() {
    let out = run(&["verify"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("deltaV matrix residual"));

    let out = run(&["verify", "--panels", "4", "--points", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compile_deutsch_both_models() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("circuit.json");
    std::fs::write(
        &circuit,
        r#"{"initial":"01","gates":[{"name":"H","target":"d"},{"name":"H","target":"a"},{"name":"f2","target":"da"},{"name":"H","target":"d"}],"measure":{"qubit":"d"}}"#,
    )
    .unwrap();

    let bell_dir = dir.path().join("bell");
    let out = run(&[
        "compile",
        "--circuit",
        circuit.to_str().unwrap(),
        "--model",
        "bell",
        "--out",
        bell_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let dump = json(&bell_dir.join("schedule.json"));
    assert_eq!(dump["segments"].as_array().unwrap().len(), 4);
    assert_eq!(dump["measure"]["qubit"], "d");
    assert!(dump["residual"].as_f64().unwrap() < 1e-10);

    let well_dir = dir.path().join("well");
    let out = run(&[
        "compile",
        "--circuit",
        circuit.to_str().unwrap(),
        "--model",
        "well",
        "--mass",
        "1",
        "--out",
        well_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let dump = json(&well_dir.join("schedule.json"));
    assert!(dump["residual"].as_f64().unwrap() < 1e-9);
    // waits + pulses for three Hadamards plus the coupling
    assert!(dump["segments"].as_array().unwrap().len() >= 10);
    let labels: Vec<&str> = dump["segments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["label"].as_str().unwrap())
        .collect();
    assert!(labels.iter().any(|l| l.contains("oracle coupling")));
    assert!(labels.iter().any(|l| l.contains("xdrive")));
}

#[test]
fn compile_empty_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("empty.json");
    std::fs::write(&circuit, r#"{"initial":"01","gates":[]}"#).unwrap();
    let out = run(&[
        "compile",
        "--circuit",
        circuit.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let dump = json(&dir.path().join("schedule.json"));
    assert_eq!(dump["segments"].as_array().unwrap().len(), 0);
    assert_eq!(dump["residual"].as_f64().unwrap(), 0.0);
}

#[test]
fn compile_parse_error_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("bad.json");
    std::fs::write(&circuit, r#"{"initial":"01","gates":[{"name":"Q","target":"d"}]}"#).unwrap();
    let out = run(&[
        "compile",
        "--circuit",
        circuit.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = run(&[
            "deutsch",
            "--model",
            "well",
            "--oracle",
            "f2",
            "--mass",
            "1",
            "-n",
            "25",
            "--seed",
            "99",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = read(&dir_a.path().join("trajectories.csv"));
    let b = read(&dir_b.path().join("trajectories.csv"));
    assert_eq!(a, b, "CSV bodies must be byte-identical across reruns");
    let da = read(&dir_a.path().join("density.csv"));
    let db = read(&dir_b.path().join("density.csv"));
    assert_eq!(da, db);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"model":"bell","oracle":"f0","n":10,"seed":3,"sigma":0.02,"out":"{}"}}"#,
            dir.path().join("from_config").display()
        ),
    )
    .unwrap();
    // flag overrides the config's n
    let out = run(&[
        "deutsch",
        "--oracle",
        "f0",
        "--config",
        config.to_str().unwrap(),
        "-n",
        "5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&dir.path().join("from_config/summary.json"));
    assert_eq!(summary["config"]["n"], 5);
    assert_eq!(summary["config"]["sigma"], 0.02);

    // unknown keys in the config are rejected
    std::fs::write(&config, r#"{"model":"bell","bogus":1}"#).unwrap();
    let out = run(&["deutsch", "--oracle", "f0", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_dir_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["deutsch", "--model", "bell", "--oracle", "f3", "-n", "5"])
        .env("PILOTWAVE_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn custom_sampler_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sampler = dir.path().join("density.json");
    // uniform box over x in [0.2, 0.4], y in [0.6, 0.8]
    std::fs::write(
        &sampler,
        r#"{"edges":[[0.2,0.3,0.4],[0.6,0.7,0.8]],"probs":[0.25,0.25,0.25,0.25]}"#,
    )
    .unwrap();
    let out = run(&[
        "sample",
        "--state",
        "01",
        "-n",
        "200",
        "--sampler",
        sampler.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = read(&dir.path().join("samples.csv"));
    for line in body.lines().skip(1) {
        let mut cols = line.split(',');
        let _ = cols.next();
        let x: f64 = cols.next().unwrap().parse().unwrap();
        let y: f64 = cols.next().unwrap().parse().unwrap();
        assert!((0.2..=0.4).contains(&x) && (0.6..=0.8).contains(&y));
    }

    // non-equilibrium deutsch run driven by the same density file
    let run_dir = dir.path().join("noneq");
    let out = run(&[
        "deutsch",
        "--model",
        "well",
        "--oracle",
        "f0",
        "--mass",
        "1",
        "-n",
        "20",
        "--sampler",
        sampler.to_str().unwrap(),
        "--out",
        run_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&run_dir.join("summary.json"));
    assert_eq!(summary["outcome"], "constant");
}

#[test]
fn summary_schema_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "deutsch", "--model", "bell", "--oracle", "f2", "-n", "5",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary = json(&dir.path().join("summary.json"));
    for key in [
        "schema",
        "version",
        "command",
        "model",
        "oracle",
        "outcome",
        "displacement",
        "classification_margin",
        "invariants",
        "seed",
        "schedule_hash",
        "config",
    ] {
        assert!(summary.get(key).is_some(), "summary missing `{key}`");
    }
    assert_eq!(summary["schema"], 1);
}
