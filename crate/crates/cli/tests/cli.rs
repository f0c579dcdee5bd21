use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qdd_cli::{parse_experiment_config, CliError};
use qdd_core::catalog;
use qdd_core::decouple::{averaged_generator, pauli_group};
use qdd_core::semigroup::{generator_superop, Picture, SuperOperator};
use qdd_core::serial::parse_model;

fn experiments() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../experiments")
}

fn qdd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_shipped(name: &str, out: &Path) -> Output {
    let cfg = experiments().join(name);
    qdd(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn every_shipped_experiment_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut count = 0;
    for entry in std::fs::read_dir(experiments()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let name = path.file_name().unwrap().to_str().unwrap().to_string();
            let o = run_shipped(&name, dir.path());
            assert!(o.status.success(), "{name}: {}", stderr(&o));
            count += 1;
        }
    }
    assert_eq!(count, 8);
}

#[test]
fn generator_reports_unchanged_dephasing() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_shipped("generator_dephasing.json", dir.path()).status.success());
    let csv = std::fs::read_to_string(dir.path().join("generator_dephasing.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    assert_eq!(fields[0], "difference_max_norm");
    assert!(fields[3].parse::<f64>().unwrap() <= 1e-12);
}

#[test]
fn generator_reports_symmetrized_damping() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_shipped("generator_damping.json", dir.path()).status.success());
    let text = std::fs::read_to_string(dir.path().join("generator_damping.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let lbar = qdd_core::serial::parse_superop(v["averaged_generator"].to_string().as_bytes()).unwrap();
    let damp = generator_superop(&catalog::damping(1.0), Picture::Heisenberg).unwrap();
    let pump = generator_superop(&catalog::pumping(1.0), Picture::Heisenberg).unwrap();
    let half = SuperOperator::from_matrix(
        (damp.matrix() + pump.matrix()) * qdd_core::opalg::c(0.5, 0.0),
        Picture::Heisenberg,
    )
    .unwrap();
    assert!(lbar.max_dist(&half) <= 1e-12);
    assert_eq!(v["decoupling_set"], true);
}

#[test]
fn emitted_model_reingests_identically() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_shipped("dd_average_damping.json", dir.path()).status.success());
    let text = std::fs::read_to_string(dir.path().join("dd_average_damping.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let model = parse_model(v["model"].to_string().as_bytes()).unwrap();
    let expected = averaged_generator(&catalog::damping(1.0), &pauli_group())
        .unwrap()
        .model;
    assert_eq!(model, expected);
}

#[test]
fn config_round_trips() {
    for entry in std::fs::read_dir(experiments()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let cfg = parse_experiment_config(&std::fs::read(&path).unwrap()).unwrap();
            let again = parse_experiment_config(&serde_json::to_vec(&cfg).unwrap()).unwrap();
            assert_eq!(cfg, again, "{}", path.display());
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for name in ["collision_damping_pauli.json", "contrast.json", "pocket_qubit.json"] {
        assert!(run_shipped(name, a.path()).status.success());
        assert!(run_shipped(name, b.path()).status.success());
    }
    for file in ["collision_damping_pauli.csv", "contrast.csv", "pocket_qubit.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
}

#[test]
fn contrast_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_shipped("contrast.json", dir.path()).status.success());
    let csv = std::fs::read_to_string(dir.path().join("contrast.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[4], "not-decoupled");
    assert_eq!(row[7], "decoupled");
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn empty_model_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("model.json"), "").unwrap();
    let flip = experiments().join("models/flip.json");
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"kind": "generator", "model": "model.json", "scheme": {:?}}}"#,
            flip.to_str().unwrap()
        ),
    );
    let o = qdd(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("model ("), "{}", stderr(&o));
}

#[test]
fn malformed_fields_are_named() {
    let dir = tempfile::tempdir().unwrap();
    for (body, needle) in [
        (r#"{"kind": "generator", "modle": {}}"#, "unknown field `modle`"),
        (r#"{"kind": "teleport"}"#, "config.kind"),
        (
            r#"{"kind": "generator", "model": {"H": [[[1, 0]]], "Ls": [[[1, 0]]]}}"#,
            "model.Ls[0]",
        ),
        (r#"{"kind": "generator", "model": {"Ls": []}}"#, "missing field `H`"),
        (r#"{"kind": "contrast", "taus": [0.01]}"#, "requires field `taus`"),
        (
            r#"{"kind": "contrast", "taus": [0.01, 0.02]}"#,
            "taus: must be strictly descending",
        ),
        (
            r#"{"kind": "generator", "model": {"H": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}, "scheme": {"V": [[[[1, 0]]]], "order": "cyclic", "tau": 0.1}}"#,
            "scheme: dimension 1 does not match model dimension 2",
        ),
    ] {
        let cfg = write_config(dir.path(), body);
        let o = qdd(&["run", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{body}");
        assert!(stderr(&o).contains(needle), "{body}: {}", stderr(&o));
    }
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"kind": "contrast", "taus": [0.02, 0.01], "output": {"path": "/nonexistent-dir/out.csv"}}"#,
    );
    let o = qdd(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot write"));
}

#[test]
fn without_output_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"kind": "contrast", "taus": [0.02, 0.01]}"#);
    let o = qdd(&["run", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("gamma,T,semigroup_gap"));
}

#[test]
fn print_schema_needs_no_config() {
    let o = qdd(&["run", "--print-schema"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["properties"]["kind"]["enum"].as_array().unwrap().len() == 7);
}

#[test]
fn exit_codes() {
    assert_eq!(CliError::Config(String::new()).exit_code(), 1);
    assert_eq!(CliError::Io(String::new()).exit_code(), 1);
    assert_eq!(CliError::Numerical(String::new()).exit_code(), 2);
}

#[test]
fn out_dir_is_created() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"kind": "contrast", "taus": [0.02, 0.01], "output": {"path": "contrast.csv"}}"#,
    );
    let out = dir.path().join("nested/results");
    let o = qdd(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("contrast.csv").is_file());
}
