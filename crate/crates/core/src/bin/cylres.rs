use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cylres::experiments::{failure_summary, run_with_threads, write_outputs, write_summary, Experiment, ExperimentConfig};
use cylres::potential::BUILTINS;

#[derive(Parser, Debug)]
#[command(name = "cylres", about = "Scattering resonances of -Δ+V on ℝ×S¹: named experiments")]
struct Cli {
    /// Experiment name (see --list).
    experiment: Option<String>,
    /// Config JSON path, or `default` for the built-in configuration.
    #[arg(long)]
    config: Option<String>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (overrides the config).
    #[arg(long)]
    threads: Option<usize>,
    /// List experiments and builtin potentials.
    #[arg(long)]
    list: bool,
}

const USAGE: &str = "usage: cylres <experiment> --config <path|default> [--out <dir>] [--threads N] [--list]";

fn list() {
    println!("experiments:");
    for e in Experiment::ALL {
        println!("  {:<20} {}", e.name(), e.description());
    }
    println!("builtin potentials:");
    for b in BUILTINS {
        println!("  {b}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if cli.list {
        list();
        return ExitCode::SUCCESS;
    }
    let Some(name) = cli.experiment else {
        eprintln!("{USAGE}");
        return ExitCode::from(1);
    };
    let experiment: Experiment = match name.parse() {
        Ok(e) => e,
        Err(_) => {
            eprintln!("unknown experiment `{name}`\n{USAGE}");
            eprintln!("run `cylres --list` for the available experiments");
            return ExitCode::from(1);
        }
    };
    let Some(config) = cli.config else {
        eprintln!("missing --config\n{USAGE}");
        return ExitCode::from(1);
    };
    let mut cfg = if config == "default" {
        ExperimentConfig::default_for(experiment)
    } else {
        match ExperimentConfig::from_path(std::path::Path::new(&config)) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {config}: {e}");
                return ExitCode::from(1);
            }
        }
    };
    if cfg.experiment != experiment {
        eprintln!("note: config names `{}`; running `{experiment}`", cfg.experiment);
        cfg.experiment = experiment;
    }
    let out = cli
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("cylres-out").join(experiment.name()));
    let threads = cli.threads.or(cfg.threads).unwrap_or_else(rayon::current_num_threads);
    match run_with_threads(&cfg, threads) {
        Ok(outcome) => {
            if let Err(e) = write_outputs(&out, &outcome) {
                eprintln!("error: writing outputs to {}: {e}", out.display());
                return ExitCode::from(1);
            }
            for c in &outcome.criteria {
                println!("{} {:<22} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("outputs: {}", out.display());
            if outcome.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let _ = write_summary(&out, &failure_summary(experiment.name(), &e.to_string()));
            ExitCode::from(1)
        }
    }
}
