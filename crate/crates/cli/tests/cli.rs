use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lambda_mixer_core::design::DesignReport;
use lambda_mixer_core::record::{Payload, RunRecord};
use lambda_mixer_core::scan::count_peaks;
use lambda_mixer_core::scenario::shipped_source;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lambda-mixer"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("LAMBDA_MIXER_SCENARIO_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn column(csv: &str, i: usize) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn fig4_low_depth_csv_has_401_multi_peaked_rows() {
    let o = run(&["scan-detuning", "--scenario", "fig4_dabs_0.83"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "delta_mhz,probe_transmission,stokes_output,absorber_profile,eit_reference");
    assert_eq!(lines.count(), 401);
    let probe = column(&csv, 1);
    assert!(count_peaks(&probe, 0.01) >= 2);
}

#[test]
fn csv_numbers_are_plain_scientific() {
    let o = run(&["scan-detuning", "--scenario", "fig4_dabs_41.6"]);
    let csv = stdout(&o);
    for field in csv.lines().skip(1).flat_map(|l| l.split(',')) {
        assert!(!field.contains('E'), "{field}");
        assert!(field.chars().all(|c| c.is_ascii_digit() || "-.e".contains(c)), "{field}");
    }
}

#[test]
fn missing_file_is_io_failure_naming_the_path() {
    let o = run(&["scan-detuning", "--scenario", "/no/such/dir/scenario.toml"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("/no/such/dir/scenario.toml"));
}

#[test]
fn negative_gamma_ge_lists_violations() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_source("fig4_dabs_0.83")
        .unwrap()
        .replace("gamma_ge = 300.0", "gamma_ge = -1.0")
        .replace("omega_c = 30.0", "omega_c = -2.0");
    let p = write_scenario(dir.path(), "bad.toml", &text);
    let o = run(&["scan-detuning", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("eit.gamma_ge"), "{err}");
    assert!(err.contains("eit.omega_c"), "{err}");
    assert!(err.contains("line 7"), "{err}");
}

#[test]
fn usage_error_exits_one() {
    assert_eq!(run(&["scan-detuning"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn two_point_depth_sweep_has_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_source("fig2_default").unwrap().replace("points = 60", "points = 2");
    assert_ne!(text, shipped_source("fig2_default").unwrap());
    let p = write_scenario(dir.path(), "two.toml", &text);
    let o = run(&["scan-dabs", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    assert_eq!(csv.lines().next().unwrap(), "d_abs,probe_peak,stokes_peak,eit_reference");
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn fig2_probe_peak_runs_from_gain_to_eit() {
    let o = run(&["scan-dabs", "--scenario", "fig2_default"]);
    assert_eq!(o.status.code(), Some(0));
    let probe = column(&stdout(&o), 1);
    assert_eq!(probe.len(), 60);
    assert!((probe[0] - 2.0).abs() < 0.02, "{}", probe[0]);
    assert!((probe[59] - 0.95).abs() < 0.02, "{}", probe[59]);
}

#[test]
fn worker_count_does_not_change_output() {
    let a = run(&["scan-dabs", "--scenario", "fig2_default", "--workers", "8"]);
    let b = run(&["scan-dabs", "--scenario", "fig2_default", "--workers", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sidecars_are_written_next_to_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spectrum.csv");
    let o = run(&["scan-detuning", "--scenario", "fig4_dabs_4.16", "--out", out.to_str().unwrap(), "--json", "--svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 402);

    let rec = RunRecord::from_json(&std::fs::read_to_string(dir.path().join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(rec.scenario.name, "fig4_dabs_4.16");
    assert!(rec.flagged.is_empty());
    assert!(chrono::DateTime::parse_from_rfc3339(&rec.timestamp).is_ok());
    match &rec.results {
        Payload::DetuningScan { records } => {
            assert_eq!(records.len(), 401);
            assert_eq!(column(&csv, 1), records.iter().map(|r| r.probe_transmission).collect::<Vec<_>>());
        }
        other => panic!("unexpected payload {other:?}"),
    }
    assert_eq!(RunRecord::from_json(&rec.to_json().unwrap()).unwrap(), rec);

    let svg = std::fs::read_to_string(dir.path().join("spectrum.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains(r#"height="1000""#));
    assert!(svg.contains("stroke-dasharray"));
    assert!(svg.contains("(MHz)"));
}

#[test]
fn sidecars_need_an_output_path() {
    let o = run(&["scan-detuning", "--scenario", "fig4_dabs_4.16", "--json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unwritable_output_is_io_failure() {
    let o = run(&["scan-detuning", "--scenario", "fig4_dabs_4.16", "--out", "/no/such/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("/no/such/dir/out.csv"));
}

#[test]
fn scenario_dir_overrides_shipped() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_source("fig4_dabs_0.83").unwrap().replace("points = 401", "points = 5");
    write_scenario(dir.path(), "fig4_dabs_0.83.toml", &text);
    let o = bin()
        .args(["scan-detuning", "--scenario", "fig4_dabs_0.83"])
        .env("LAMBDA_MIXER_SCENARIO_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn proposed_mix_design_table() {
    let o = run(&["design", "--scenario", "sec5_proposed_mix"]);
    let table = stdout(&o);
    assert!(table.contains("fwm_strength             1.48"), "{table}");
    assert!(table.contains("5.4334e-4"), "{table}");
    assert!(table.contains("0.6132"), "{table}");
    // The bandwidth criterion fails for this point, so the verdict is a fail.
    assert_eq!(o.status.code(), Some(4));
    assert!(table.contains("failed: bandwidth"), "{table}");
}

#[test]
fn as_performed_design_fails_rabi_window() {
    let o = run(&["design", "--scenario", "sec5_as_performed"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("rabi_window"));
    let o = run(&["design", "--scenario", "sec5_as_performed", "--json"]);
    let report: DesignReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!report.rabi_window.passed);
    assert!(report.failures().contains(&"rabi_window"));
}

#[test]
fn design_json_matches_in_memory_report() {
    let o = run(&["design", "--scenario", "sec5_proposed_mix", "--json"]);
    let parsed: DesignReport = serde_json::from_slice(&o.stdout).unwrap();
    let scenario = lambda_mixer_core::scenario::shipped("sec5_proposed_mix").unwrap();
    let report = lambda_mixer_core::design::full_report(&scenario).unwrap();
    assert_eq!(parsed, report);
}

#[test]
fn noise_at_the_proposed_point() {
    let o = run(&["noise", "--scenario", "sec5_proposed_mix", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ratio = s["ratio"].as_f64().unwrap();
    assert!((ratio / 5.4e-4 - 1.0).abs() < 0.01, "{ratio}");
    assert_eq!(s["d_abs"].as_f64().unwrap(), 16.5);
}

#[test]
fn noise_with_zero_absorber_depth_is_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_source("fig4_dabs_0.83").unwrap().replace("d_abs = 0.83", "d_abs = 0.0");
    let p = write_scenario(dir.path(), "zero.toml", &text);
    let o = run(&["noise", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("domain error"));
}

#[test]
fn noise_without_medium_is_exactly_zero() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_source("fig4_dabs_0.83").unwrap().replace("depth = 30.0", "depth = 0.0");
    let p = write_scenario(dir.path(), "empty.toml", &text);
    let o = run(&["noise", "--scenario", p.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["n_fwm"].as_f64().unwrap(), 0.0);
    assert_eq!(s["ratio"].as_f64().unwrap(), 0.0);
}
