//! End-to-end runs of the `zpinch` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use zpinch_cli::artifacts::{read_csv, SpectrumRow, SPECTRUM_CSV, SUMMARY_JSON};
use zpinch_cli::error::{EXIT_CONFIG, EXIT_NONCONVERGED};
use zpinch_cli::{StudyConfig, Summary};

fn zpinch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zpinch"))
        .args(args)
        .env("ZPINCH_THREADS", "1")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, cfg: &StudyConfig) -> String {
    let path = dir.join("study.json");
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn minimal_sweep_finds_four_unstable_sausage_modes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let first = zpinch(&["sweep", "--out", out.to_str().unwrap()]);
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let rows: Vec<SpectrumRow> = read_csv(&out.join(SPECTRUM_CSV)).unwrap();
    assert_eq!(rows.len(), 4);
    for (row, k) in rows.iter().zip(1..) {
        assert_eq!((row.m, row.k), (0, k));
        assert!(row.lambda < 0.0 && row.mu.unwrap() > 0.0);
    }
    let summary: Summary =
        serde_json::from_slice(&fs::read(out.join(SUMMARY_JSON)).unwrap()).unwrap();
    assert!(summary.verdicts.m0_instability_found);
    assert_eq!(summary.verdicts.unstable_modes, 4);

    // A second run reproduces the summary byte for byte.
    let bytes = fs::read(out.join(SUMMARY_JSON)).unwrap();
    let second = zpinch(&["sweep", "--out", out.to_str().unwrap()]);
    assert!(second.status.success());
    assert_eq!(bytes, fs::read(out.join(SUMMARY_JSON)).unwrap());

    // So does a run driven by the configuration recorded in the summary.
    let config = write_config(tmp.path(), &summary.config);
    let third = zpinch(&["--config", &config, "sweep"]);
    assert!(third.status.success());
    assert_eq!(bytes, fs::read(out.join(SUMMARY_JSON)).unwrap());
}

#[test]
fn empty_mode_range_is_a_configuration_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = StudyConfig::minimal();
    cfg.modes.k_min = 5;
    cfg.modes.k_max = 4;
    cfg.output.directory = tmp.path().join("out");
    let path = write_config(tmp.path(), &cfg);
    let out = zpinch(&["--config", &path, "sweep"]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty mode range"));
}

#[test]
fn unknown_configuration_fields_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let mut value = serde_json::to_value(StudyConfig::minimal()).unwrap();
    value["modes"]["n_max"] = 3.into();
    let path = tmp.path().join("study.json");
    fs::write(&path, value.to_string()).unwrap();
    let out = zpinch(&["--config", path.to_str().unwrap(), "sweep"]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn single_mode_solve_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let dir = out.to_str().unwrap();
    let solve = zpinch(&["solve", "--m", "0", "--k", "-3", "--out", dir]);
    assert!(
        solve.status.success(),
        "{}",
        String::from_utf8_lossy(&solve.stderr)
    );
    let rows: Vec<SpectrumRow> = read_csv(&out.join(SPECTRUM_CSV)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].m, rows[0].k), (0, -3));
    assert!(rows[0].lambda < 0.0);
    let report = zpinch(&["report", "--out", dir]);
    assert!(report.status.success());
    assert!(out.join("mu_map.dat").exists());
}

#[test]
fn kink_mode_under_default_tolerance_reports_nonconvergence() {
    // The m = ±1 eigenvalue converges only at first order in the mesh
    // width, so the default refinement budget cannot reach the tolerance.
    let tmp = tempfile::tempdir().unwrap();
    let out = zpinch(&[
        "solve",
        "--m",
        "1",
        "--k",
        "2",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_NONCONVERGED));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not converged"));
}

#[test]
fn report_without_spectrum_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = zpinch(&["report", "--out", tmp.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing artifact"));
}
