use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fris_core::harness::experiment::{grid_warning, ExperimentContext};
use fris_core::harness::{run_experiment, run_sweep, summarize, write_csv, ExperimentConfig, ResultRecord, Scheme};
use fris_core::Error;

#[derive(Parser)]
#[command(name = "fris", version, about = "Fluid RIS achievable-rate experiments")]
struct Cli {
    /// Overrides master_seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides out_path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress the summary and warnings on stdout/stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `key=value` override, applied after the config file. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment.
    Run(ConfigArgs),
    /// Compare the exhaustive optimum with CEO on single instances.
    Oracle(ConfigArgs),
    /// Run the experiment once per value of one key.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// `key=v1,v2,...`
        #[arg(long)]
        vary: String,
    },
}

fn load_config(cli: &Cli, args: &ConfigArgs) -> fris_core::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| match e {
            Error::Io { .. } => Error::Config(e.to_string()),
            other => other,
        })?,
        None => ExperimentConfig::default(),
    };
    for s in &args.sets {
        cfg.apply_override(s)?;
    }
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_path.clone_from(out);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.txt")
}

fn persist(cli: &Cli, cfg: &ExperimentConfig, records: &[ResultRecord]) -> fris_core::Result<()> {
    write_csv(records, &cfg.out_path)?;
    let summary = summarize(records);
    let mut text = format!("# noise_dbm = {}\n", cfg.noise_dbm);
    text.push_str(&summary.to_string());
    let path = summary_path(&cfg.out_path);
    std::fs::write(&path, &text).map_err(|source| Error::Io { path, source })?;
    if !cli.quiet {
        for r in records.iter().filter(|r| r.failure.is_some()) {
            eprintln!(
                "warning: trial {} {} failed: {}",
                r.trial,
                r.scheme,
                r.failure.as_deref().unwrap_or("")
            );
        }
        print!("{text}");
        println!("wrote {}", cfg.out_path.display());
    }
    Ok(())
}

fn warn_grid(cli: &Cli, cfg: &ExperimentConfig) -> fris_core::Result<()> {
    if cli.quiet {
        return Ok(());
    }
    let ctx = ExperimentContext::new(cfg)?;
    if let Some(w) = grid_warning(&ctx.grid) {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn execute(cli: &Cli) -> fris_core::Result<()> {
    match &cli.command {
        Command::Run(args) => {
            let cfg = load_config(cli, args)?;
            warn_grid(cli, &cfg)?;
            let records = run_experiment(&cfg)?;
            persist(cli, &cfg, &records)
        }
        Command::Oracle(args) => {
            let mut cfg = load_config(cli, args)?;
            cfg.schemes = vec![Scheme::Fris, Scheme::Oracle];
            if !args.sets.iter().any(|s| s.starts_with("trials")) && args.config.is_none() {
                cfg.trials = 1;
            }
            warn_grid(cli, &cfg)?;
            let records = run_experiment(&cfg)?;
            if let Some(r) = records.iter().find(|r| r.scheme == Scheme::Oracle && r.failure.is_some()) {
                return Err(Error::Config(r.failure.clone().unwrap_or_default()));
            }
            if !cli.quiet {
                let mut matched = 0;
                for t in 0..cfg.trials {
                    let rate = |s: Scheme| {
                        records
                            .iter()
                            .find(|r| r.trial == t && r.scheme == s)
                            .and_then(|r| r.rate_bps_hz)
                    };
                    if let (Some(o), Some(c)) = (rate(Scheme::Oracle), rate(Scheme::Fris)) {
                        let hit = (o - c).abs() <= 1e-9;
                        matched += usize::from(hit);
                        println!("trial {t}: oracle {o:.9} ceo {c:.9} {}", if hit { "match" } else { "gap" });
                    }
                }
                println!("ceo matched the oracle in {matched}/{} trials", cfg.trials);
            }
            persist(cli, &cfg, &records)
        }
        Command::Sweep { config, vary } => {
            let cfg = load_config(cli, config)?;
            let (key, values) = vary
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected --vary key=v1,v2, got {vary:?}")))?;
            let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
            let records = run_sweep(&cfg, key.trim(), &values)?;
            persist(cli, &cfg, &records)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidInput(_) | Error::Infeasible(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
