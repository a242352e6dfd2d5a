//! Experiment harness, CSV output and the command-line front end.

use std::process::Command;

use fris_core::harness::experiment::{run_trial, ExperimentContext};
use fris_core::harness::{
    format_csv, parse_csv, read_csv, run_experiment, run_sweep, summarize, write_csv, ExperimentConfig, Scheme,
    CSV_HEADER,
};
use fris_core::Error;

fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    for kv in ["grid=4", "m_hat=4", "bits=1", "trials=6", "schemes=fris,ris,aligned", "master_seed=11"] {
        cfg.apply_override(kv).unwrap();
    }
    cfg
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = small_config();
    let a = format_csv(&run_experiment(&cfg).unwrap());
    let b = format_csv(&run_experiment(&cfg).unwrap());
    assert_eq!(a, b);
    assert!(a.starts_with(CSV_HEADER));
    assert_eq!(a.lines().count(), 1 + 6 * 3);
}

#[test]
fn seed_changes_results() {
    let mut cfg = small_config();
    let a = run_experiment(&cfg).unwrap();
    cfg.master_seed = 12;
    let b = run_experiment(&cfg).unwrap();
    assert_ne!(a, b);
}

#[test]
fn schemes_share_the_trial_channel() {
    let mut cfg = small_config();
    cfg.apply_override("schemes=fris,ris,aligned,oracle").unwrap();
    let ctx = ExperimentContext::new(&cfg).unwrap();
    let mut seen = Vec::new();
    for t in 0..cfg.trials {
        let out = run_trial(&ctx, t);
        let first = out.fingerprints[0].1;
        assert!(out.fingerprints.iter().all(|&(_, f)| f == first));
        assert_eq!(out.records.len(), 4);
        seen.push(first);
    }
    seen.sort_unstable();
    seen.dedup();
    assert_eq!(seen.len(), cfg.trials);
}

#[test]
fn csv_round_trip_through_file() {
    let cfg = small_config();
    let records = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    write_csv(&records, &path).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back.len(), records.len());
    for (a, b) in records.iter().zip(&back) {
        assert_eq!((a.trial, a.scheme, a.seed, a.iterations, a.converged), (b.trial, b.scheme, b.seed, b.iterations, b.converged));
        assert!((a.rate_bps_hz.unwrap() - b.rate_bps_hz.unwrap()).abs() <= 5e-7);
    }
    assert_eq!(format_csv(&back), format_csv(&records));
}

#[test]
fn oracle_over_budget_fails_alone() {
    let mut cfg = small_config();
    cfg.apply_override("schemes=fris,oracle").unwrap();
    cfg.apply_override("oracle_budget=10").unwrap();
    cfg.trials = 2;
    let records = run_experiment(&cfg).unwrap();
    for r in &records {
        match r.scheme {
            Scheme::Oracle => {
                assert!(r.rate_bps_hz.is_none());
                assert!(r.failure.as_deref().unwrap().contains("budget"));
            }
            _ => assert!(r.rate_bps_hz.is_some()),
        }
    }
    let summary = summarize(&parse_csv(&format_csv(&records)).unwrap());
    let oracle = summary.groups.iter().find(|g| g.scheme == Scheme::Oracle).unwrap();
    assert_eq!((oracle.count, oracle.failed), (0, 2));
}

#[test]
fn oracle_dominates_optimizer_per_trial() {
    let mut cfg = ExperimentConfig::default();
    for kv in ["grid=3", "m_hat=3", "bits=1", "trials=10", "schemes=fris,oracle"] {
        cfg.apply_override(kv).unwrap();
    }
    let records = run_experiment(&cfg).unwrap();
    for pair in records.chunks(2) {
        assert_eq!(pair[0].trial, pair[1].trial);
        let (f, o) = (pair[0].rate_bps_hz.unwrap(), pair[1].rate_bps_hz.unwrap());
        assert!(o >= f, "trial {}: oracle {o} < fris {f}", pair[0].trial);
    }
}

#[test]
fn summary_statistics() {
    let records = run_experiment(&small_config()).unwrap();
    let summary = summarize(&records);
    let fris: Vec<f64> = records.iter().filter(|r| r.scheme == Scheme::Fris).map(|r| r.rate_bps_hz.unwrap()).collect();
    let g = summary.groups.iter().find(|g| g.scheme == Scheme::Fris).unwrap();
    let mean = fris.iter().sum::<f64>() / fris.len() as f64;
    let sd = (fris.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (fris.len() - 1) as f64).sqrt();
    assert!((g.mean - mean).abs() < 1e-12);
    assert!((g.sd - sd).abs() < 1e-12);
    assert!((g.ci95 - 1.96 * sd / (fris.len() as f64).sqrt()).abs() < 1e-12);
    let ris = summary.groups.iter().find(|g| g.scheme == Scheme::Ris).unwrap();
    assert_eq!(summary.ratios.len(), 1);
    assert!((summary.ratios[0].1 - g.mean / ris.mean).abs() < 1e-12);
}

#[test]
fn sweep_concatenates_points() {
    let mut cfg = small_config();
    cfg.trials = 2;
    let records = run_sweep(&cfg, "m_hat", &["2".into(), "4".into()]).unwrap();
    assert_eq!(records.len(), 2 * 2 * 3);
    assert!(records[..6].iter().all(|r| r.m_hat == 2));
    assert!(records[6..].iter().all(|r| r.m_hat == 4));
    assert!(matches!(run_sweep(&cfg, "bogus", &["1".into()]), Err(Error::Config(_))));
}

#[test]
fn config_text_parsing() {
    let cfg = ExperimentConfig::parse_str("# comment\nmy = 6\nmz=6 # trailing\n\nbits=3\n").unwrap();
    assert_eq!((cfg.my, cfg.mz, cfg.bits), (6, 6, 3));
    assert!(matches!(ExperimentConfig::parse_str("colour = red"), Err(Error::Config(_))));
    let round = ExperimentConfig::parse_str(&cfg.to_config_string()).unwrap();
    assert_eq!(round, cfg);
}

fn fris() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fris"))
}

#[test]
fn cli_run_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let status = fris()
        .args(["run", "--quiet", "--set", "grid=3", "--set", "m_hat=2", "--set", "trials=3", "--seed", "4", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let records = read_csv(&out).unwrap();
    assert_eq!(records.len(), 6);
    assert!(records.iter().all(|r| r.seed != 0));
    assert!(dir.path().join("r.summary.txt").exists());
}

#[test]
fn cli_rejects_bad_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let unknown = fris().args(["run", "--set", "colour=red", "--out"]).arg(&out).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    let rectangular = fris().args(["run", "--set", "my=4", "--set", "mz=5", "--out"]).arg(&out).output().unwrap();
    assert_eq!(rectangular.status.code(), Some(2));
    let cfg_file = dir.path().join("bad.cfg");
    std::fs::write(&cfg_file, "trials = many\n").unwrap();
    let bad_value = fris().args(["run", "--config"]).arg(&cfg_file).output().unwrap();
    assert_eq!(bad_value.status.code(), Some(2));
    let missing = fris().args(["run", "--config"]).arg(dir.path().join("absent.cfg")).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn cli_oracle_over_budget_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fris()
        .args(["oracle", "--quiet", "--set", "grid=4", "--set", "m_hat=3", "--set", "oracle_budget=100", "--out"])
        .arg(dir.path().join("o.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_oracle_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = fris()
        .args(["oracle", "--set", "grid=3", "--set", "m_hat=2", "--set", "bits=1", "--out"])
        .arg(dir.path().join("o.csv"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("trial 0: oracle"));
    let sweep_out = dir.path().join("s.csv");
    let s = fris()
        .args(["sweep", "--quiet", "--set", "trials=2", "--set", "m_hat=4", "--vary", "grid=3,4", "--out"])
        .arg(&sweep_out)
        .status()
        .unwrap();
    assert!(s.success());
    let records = read_csv(&sweep_out).unwrap();
    assert_eq!(records.len(), 2 * 2 * 2);
    assert_eq!(records.iter().filter(|r| r.my == 4).count(), 4);
}
