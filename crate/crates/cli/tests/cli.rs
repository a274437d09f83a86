//! End-to-end tests of the compiled binary: exit codes, artifact layout,
//! determinism across seeds and thread counts, and byte-exact replay.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracshe"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

const SIM_CONFIG: &str = r#"{
  "model": {"alpha": 1.5, "gamma": 0.5, "dim": 1},
  "grid": {"extent": 16.0, "n": 64},
  "solver": {"dt": 0.0625, "t_end": 0.5, "record_times": [0.25, 0.5]},
  "ensemble": {"members": 6, "seed": 11}
}"#;

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn constants_table_and_json() {
    let out = bin()
        .args([
            "constants",
            "--alpha",
            "1.5",
            "--gamma",
            "0.5",
            "--dim",
            "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("c_agd"), "{text}");
    assert!(text.contains("hurst"), "{text}");

    let out = bin()
        .args([
            "constants",
            "--alpha",
            "1.5",
            "--gamma",
            "0.5",
            "--dim",
            "1",
            "--json",
        ])
        .output()
        .unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((parsed["c_agd"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
    assert!((parsed["c14"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((parsed["hurst"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn constants_rejects_inadmissible_parameters() {
    // γ ≤ (d−α)₊ violates admissibility → exit 2 with a machine-readable error
    let out = bin()
        .args([
            "constants",
            "--alpha",
            "1.2",
            "--gamma",
            "0.5",
            "--dim",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error"), "{err}");
}

#[test]
fn kernel_csv_shape() {
    let out = bin()
        .args([
            "kernel", "--alpha", "2", "--t", "1", "--n", "64", "--extent", "16",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,g");
    assert_eq!(text.lines().count(), 65);
    // resolution guard failure → exit 3
    let out = bin()
        .args([
            "kernel", "--alpha", "1.5", "--t", "0.00001", "--n", "8", "--extent", "32",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fbm_paths_and_summary() {
    let out = bin()
        .args(["fbm", "--hurst", "0.75", "--n", "64", "--samples", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("sample,x,value\n"));
    assert_eq!(text.lines().count(), 1 + 3 * 65);
    // every path starts at zero
    for m in 0..3 {
        assert!(text.lines().any(|l| l == format!("{m},0,0")), "{text}");
    }

    let out = bin()
        .args([
            "--seed",
            "5",
            "fbm",
            "--hurst",
            "0.5",
            "--n",
            "256",
            "--samples",
            "50",
            "--summary",
        ])
        .output()
        .unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let v = parsed["variation_mean"].as_f64().unwrap();
    assert!((v - 1.0).abs() < 0.1, "quadratic variation mean {v}");
}

#[test]
fn simulate_writes_artifacts_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sim.json", SIM_CONFIG);
    let runs = tmp.path().join("runs");
    let out = bin()
        .arg("--output-dir")
        .arg(&runs)
        .args(["simulate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run_dirs: Vec<_> = fs::read_dir(&runs).unwrap().collect();
    assert_eq!(run_dirs.len(), 1);
    let dir = run_dirs[0].as_ref().unwrap().path();
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    // every artifact referenced by the manifest exists; nothing else is there
    let listed: Vec<String> = manifest["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["path"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(listed.len(), 2);
    for name in &listed {
        assert!(dir.join(name).exists(), "missing artifact {name}");
    }
    let mut on_disk: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    on_disk.retain(|n| n != "manifest.json");
    on_disk.sort();
    let mut expect = listed.clone();
    expect.sort();
    assert_eq!(on_disk, expect, "orphan outputs");
    // CSV header as documented
    let csv = fs::read_to_string(dir.join(&listed[0])).unwrap();
    assert!(csv.starts_with("site,x,value,member\n"));
    assert_eq!(csv.lines().count(), 1 + 6 * 64);
}

#[test]
fn identical_seeds_identical_runs_and_replay() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sim.json", SIM_CONFIG);
    let runs_a = tmp.path().join("a");
    let runs_b = tmp.path().join("b");
    for (runs, threads) in [(&runs_a, "1"), (&runs_b, "4")] {
        let out = bin()
            .arg("--output-dir")
            .arg(runs)
            .args(["--threads", threads, "simulate", "--config"])
            .arg(&cfg)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    // identical run ids and bitwise-identical artifacts across thread counts
    let id_a = fs::read_dir(&runs_a)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .file_name();
    let id_b = fs::read_dir(&runs_b)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .file_name();
    assert_eq!(id_a, id_b);
    let dir_a = runs_a.join(&id_a);
    let dir_b = runs_b.join(&id_b);
    for name in ["t_0p25.csv", "t_0p5.csv"] {
        let a = fs::read(dir_a.join(name)).unwrap();
        let b = fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "artifact {name} differs across thread counts");
    }

    // replay in place: byte-identical
    let out = bin()
        .arg("--output-dir")
        .arg(&runs_a)
        .args(["replay", id_a.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("byte-identical"));

    // config edit → different id → replay refused for the old id after swap
    let edited = SIM_CONFIG.replace("\"seed\": 11", "\"seed\": 12");
    let cfg2 = write_config(tmp.path(), "sim2.json", &edited);
    let out = bin()
        .arg("--output-dir")
        .arg(&runs_a)
        .args(["simulate", "--config"])
        .arg(&cfg2)
        .output()
        .unwrap();
    assert!(out.status.success());
    let ids: Vec<_> = fs::read_dir(&runs_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(
        ids.len(),
        2,
        "seed change must produce a fresh run id: {ids:?}"
    );
}

#[test]
fn replay_refuses_edited_manifest_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sim.json", SIM_CONFIG);
    let runs = tmp.path().join("runs");
    bin()
        .arg("--output-dir")
        .arg(&runs)
        .args(["simulate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    let id = fs::read_dir(&runs)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .file_name();
    let manifest_path = runs.join(&id).join("manifest.json");
    let text = fs::read_to_string(&manifest_path).unwrap();
    fs::write(&manifest_path, text.replace("\"seed\": 11", "\"seed\": 13")).unwrap();
    let out = bin()
        .arg("--output-dir")
        .arg(&runs)
        .args(["replay", id.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn verify_minimal_clt_run() {
    // tiny grid, tiny ensemble: exercises the wiring (verdict JSON + levels
    // CSV + exit code), not the statistics
    let tmp = tempfile::tempdir().unwrap();
    let cfg_text = r#"{
      "model": {"alpha": 1.5, "gamma": 0.5, "dim": 1},
      "grid": {"extent": 16.0, "n": 256},
      "solver": {"dt": 0.015625, "t_end": 0.5},
      "ensemble": {"members": 200, "seed": 3},
      "estimator": {"eps_cells": [4, 8, 16]},
      "experiment": {"ks_threshold": 0.2}
    }"#;
    let cfg = write_config(tmp.path(), "clt.json", cfg_text);
    let runs = tmp.path().join("runs");
    let out = bin()
        .arg("--output-dir")
        .arg(&runs)
        .args(["verify", "clt", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(
        out.status.success(),
        "stdout: {text} stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let verdict: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(verdict["experiment"], "clt");
    assert_eq!(verdict["pass"], true);
    let id = fs::read_dir(&runs)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .file_name();
    let dir = runs.join(&id);
    assert!(dir.join("clt_levels.csv").exists());
    assert!(dir.join("clt_verdict.json").exists());
}

#[test]
fn verify_variation_localize_holder_wiring() {
    let tmp = tempfile::tempdir().unwrap();
    let runs = tmp.path().join("runs");

    // variation: h = 1/256 so levels 6..8 are lattice-aligned over [0, 4]
    let variation = r#"{
      "model": {"alpha": 1.5, "gamma": 0.5, "dim": 1},
      "grid": {"extent": 16.0, "n": 4096},
      "solver": {"dt": 0.0078125, "t_end": 0.5},
      "ensemble": {"members": 24, "seed": 5},
      "estimator": {"eps_cells": [4], "variation_levels": [6, 7, 8], "interval": [0.0, 4.0]},
      "experiment": {"median_rel_err_threshold": 0.5}
    }"#;
    let cfg = write_config(tmp.path(), "variation.json", variation);
    let out = bin()
        .arg("--output-dir")
        .arg(&runs)
        .args(["verify", "variation", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{} {}",
        stdout(&out),
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["experiment"], "variation");

    // localize: ε = 2h, β ≤ 3 keeps the ball inside the torus
    let localize = r#"{
      "model": {"alpha": 1.5, "gamma": 0.5, "dim": 1},
      "grid": {"extent": 16.0, "n": 512},
      "solver": {"dt": 0.00390625, "t_end": 0.5},
      "ensemble": {"members": 40, "seed": 6},
      "localization": {"beta_ladder": [1.5, 2.0, 3.0], "eps_cells": 2}
    }"#;
    let cfg = write_config(tmp.path(), "localize.json", localize);
    let out = bin()
        .arg("--output-dir")
        .arg(&runs)
        .args(["verify", "localize", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    let text = stdout(&out);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["experiment"], "localize", "{text}");
    assert!(v["metrics"]["slope"].as_f64().unwrap() < 0.0, "{text}");

    // holder: temporal cluster recorded below t_end
    let holder = r#"{
      "model": {"alpha": 1.5, "gamma": 0.5, "dim": 1},
      "grid": {"extent": 16.0, "n": 512},
      "solver": {"dt": 0.00390625, "t_end": 0.5,
                 "record_times": [0.375, 0.4375, 0.46875, 0.484375, 0.5]},
      "ensemble": {"members": 60, "seed": 8},
      "estimator": {"eps_cells": [4, 8, 16, 32]},
      "experiment": {"holder_tolerance": 0.25, "tau_steps": [4, 8, 16, 32]}
    }"#;
    let cfg = write_config(tmp.path(), "holder.json", holder);
    let out = bin()
        .arg("--output-dir")
        .arg(&runs)
        .args(["verify", "holder", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    let text = stdout(&out);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["experiment"], "holder", "{text}");
    assert!(v["metrics"]["hurst_space"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_unknown_experiment_is_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sim.json", SIM_CONFIG);
    let out = bin()
        .arg("--output-dir")
        .arg(tmp.path())
        .args(["verify", "nonsense", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_lil_qualitative_label() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_text = r#"{
      "model": {"alpha": 1.5, "gamma": 0.5, "dim": 1},
      "grid": {"extent": 16.0, "n": 8192},
      "solver": {"dt": 0.015625, "t_end": 0.5},
      "ensemble": {"members": 1, "seed": 3},
      "experiment": {"anchors": 64}
    }"#;
    let cfg = write_config(tmp.path(), "lil.json", cfg_text);
    let out = bin()
        .arg("--output-dir")
        .arg(tmp.path())
        .args(["verify", "lil", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    let text = stdout(&out);
    let verdict: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(verdict["label"], "QUALITATIVE", "{text}");
}

#[test]
fn env_seed_override_changes_run_id() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sim.json", SIM_CONFIG);
    let runs = tmp.path().join("runs");
    for seed in ["101", "102"] {
        let out = bin()
            .env("FRACSHE_SEED", seed)
            .arg("--output-dir")
            .arg(&runs)
            .args(["simulate", "--config"])
            .arg(&cfg)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    assert_eq!(fs::read_dir(&runs).unwrap().count(), 2);
}
