use std::fs;
use std::process::Command;

fn longwave() -> Command {
    Command::new(env!("CARGO_BIN_EXE_longwave"))
}

#[test]
fn simulate_from_config_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("step.json");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        format!(
            r#"{{"scenario": "step", "epsilon": 0.2, "final_time": 1.0, "snapshot_times": [0.5, 1.0], "output_dir": {:?}}}"#,
            out
        ),
    )
    .unwrap();
    let status = longwave().args(["simulate", "--config"]).arg(&cfg).output().unwrap().status;
    assert_eq!(status.code(), Some(0));
    for name in ["snapshot_t0.5.csv", "snapshot_t1.csv", "errors.csv", "meta.json"] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let header = fs::read_to_string(out.join("errors.csv")).unwrap();
    assert!(header.starts_with("t,err_kdv,err_kdv_topo,refl_b,refl_kdv,refl_topo,l2_drift,h1eps_drift\n"));
}

#[test]
fn exit_codes_follow_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"scenario": "step", "epsilon": 0.2, "colour": "blue"}"#).unwrap();
    let code = |args: &[&str]| longwave().args(args).output().unwrap().status.code();
    assert_eq!(code(&["simulate", "--config", bad.to_str().unwrap(), "--out", "x"]), Some(2));
    assert_eq!(code(&["simulate", "--scenario", "step", "--epsilon", "1.5", "--out", "x"]), Some(2));
    assert_eq!(code(&["simulate", "--scenario", "validate", "--epsilon", "0.1", "--overtime", "--out", "x"]), Some(2));
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&["simulate", "--config", missing.to_str().unwrap(), "--out", "x"]), Some(4));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("sub");
    assert_eq!(
        code(&["growth", "--scenario", "step", "--epsilon", "0.2", "--out", out.to_str().unwrap()]),
        Some(4)
    );
}

#[test]
fn growth_writes_series_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let status = longwave()
        .args(["growth", "--scenario", "step", "--epsilon", "0.2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let fit: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert!(fit["fit"]["r_squared"].as_f64().unwrap() > 0.95);
    let csv = fs::read_to_string(dir.path().join("growth.csv")).unwrap();
    assert!(csv.starts_with("t,norm,quadratic_difference,"));
}

#[test]
fn convergence_rejects_single_level() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("conv.json");
    fs::write(&cfg, r#"{"scenario": "convergence", "epsilon": 0.1, "refinement_levels": 1}"#).unwrap();
    let status = longwave().args(["convergence", "--config"]).arg(&cfg).output().unwrap().status;
    assert_eq!(status.code(), Some(2));
}
