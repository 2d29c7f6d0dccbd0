use std::process::Command;

use clap::Parser;
use meson_eff_cli::{run, Cli};

fn invoke(args: &[&str]) -> (bool, String) {
    let cli = Cli::try_parse_from(std::iter::once("meson-eff").chain(args.iter().copied())).unwrap();
    let mut out = Vec::new();
    let ok = run(&cli, &mut out).unwrap();
    (ok, String::from_utf8(out).unwrap())
}

fn value(report: &str, key: &str) -> f64 {
    let line = report.lines().find(|l| l.starts_with(&format!("{key}="))).unwrap();
    let rest = &line[key.len() + 1..];
    rest.split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn constants_for_presets() {
    let (_, kaon) = invoke(&["constants", "--system", "kaon"]);
    assert!(kaon.contains("delta=3.322e-3"));
    let (_, b) = invoke(&["constants", "--system", "bmeson"]);
    assert!((value(&b, "gamma_s") - 1.28866).abs() < 1e-5);
    assert_eq!(value(&b, "gamma_s"), value(&b, "gamma_l"));
    let (_, custom) = invoke(&["constants", "--gamma-s", "2", "--gamma-l", "1", "--delta", "0"]);
    assert_eq!(value(&custom, "gamma_s"), 2.0);
    assert_eq!(value(&custom, "gamma_l"), 1.0);
    assert_eq!(value(&custom, "delta"), 0.0);
}

#[test]
fn characteristic_times() {
    let (_, r) = invoke(&["times"]);
    assert!((value(&r, "misid") - 4.8).abs() <= 0.1);
    assert!((value(&r, "complementary") - 11.4).abs() <= 0.2);
    assert!((value(&r, "ratio") - 25.0).abs() <= 5.0);
}

#[test]
fn cp_test_reports_both_readings() {
    let (_, r) = invoke(&["bell", "--cp-test", "--delta", "3.322e-3"]);
    assert!(r.contains("singlet: one variant violates (K_S)"), "{r}");
    assert!(r.contains("witness: both variants violate"), "{r}");
    let (_, r) = invoke(&["bell", "--cp-test", "--delta", "-3.322e-3"]);
    assert!(r.contains("singlet: one variant violates (K_L)"), "{r}");
    let (_, r) = invoke(&["bell", "--cp-test", "--delta", "0"]);
    assert!(r.contains("witness: no variant violates"));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let (ok, a) = invoke(&["verify", "--trials", "100", "--seed", "7"]);
    assert!(ok, "{a}");
    for line in a.lines().filter(|l| l.starts_with("ok")) {
        let dev: f64 = line.split("max deviation ").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
        assert!(dev < 1e-8, "{line}");
    }
    let (_, b) = invoke(&["verify", "--trials", "1"]);
    let (_, c) = invoke(&["verify", "--trials", "1"]);
    assert_eq!(b, c);
}

#[test]
fn verify_reports_literal_generator_breach() {
    let (ok, r) = invoke(&["verify", "--trials", "1", "--literal-bipartite-generator"]);
    assert!(ok);
    let line = r.lines().find(|l| l.contains("literal")).unwrap();
    let dev: f64 = line.split("by ").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
    assert!(dev > 1e-4);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("scan.csv");
    std::fs::write(
        &cfg,
        r#"{"system": "kaon", "grid": {"t_min": 0, "t_max": 1, "steps": 5}, "seed": 7}"#,
    )
    .unwrap();
    let (_, msg) = invoke(&[
        "bell",
        "--config",
        cfg.to_str().unwrap(),
        "--steps",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(msg.starts_with("wrote 3 rows"));
    let csv = std::fs::read_to_string(&out).unwrap();
    let times: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(times, ["0", "0.5", "1"]);
}

#[test]
fn tau_s_time_unit_round_trips() {
    let (_, dm) = invoke(&["uncertainty", "--fig", "2a", "--t-max", "5.42023328763", "--steps", "2"]);
    let (_, tau) = invoke(&[
        "uncertainty",
        "--fig",
        "2a",
        "--time-unit",
        "tau-s",
        "--t-max",
        "11.4427147183",
        "--steps",
        "2",
    ]);
    let last = |s: &str| s.lines().last().unwrap().split(',').map(str::to_string).collect::<Vec<_>>();
    let (a, b) = (last(&dm), last(&tau));
    assert!((b[0].parse::<f64>().unwrap() - 11.4427147183).abs() < 1e-9);
    assert!((a[1].parse::<f64>().unwrap() - b[1].parse::<f64>().unwrap()).abs() < 1e-6);
}

#[test]
fn generic_uncertainty_matches_figure_preset() {
    let (_, fig) = invoke(&["uncertainty", "--fig", "1a", "--steps", "11"]);
    let (_, generic) = invoke(&[
        "uncertainty",
        "--obs1",
        "pi/2,0,0",
        "--obs2",
        "pi/2,0,0",
        "--scan",
        "second",
        "--t-max",
        "12.566370614359172",
        "--steps",
        "11",
    ]);
    assert_eq!(fig, generic);
}

#[test]
fn wrong_command_for_figure_is_an_error() {
    let cli = Cli::try_parse_from(["meson-eff", "uncertainty", "--fig", "4a"]).unwrap();
    assert!(run(&cli, &mut Vec::new()).is_err());
    let cli = Cli::try_parse_from(["meson-eff", "bell", "--fig", "1a"]).unwrap();
    assert!(run(&cli, &mut Vec::new()).is_err());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_meson-eff");
    let ok = Command::new(bin).args(["verify", "--trials", "2"]).output().unwrap();
    assert!(ok.status.success());
    let bad = Command::new(bin).args(["constants", "--system", "charm"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown system"));
    let usage = Command::new(bin).args(["bell", "--policy", "z"]).output().unwrap();
    assert!(!usage.status.success());
}
