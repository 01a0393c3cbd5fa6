use ckpz::exclusion::SimParams;
use ckpz::harness::{
    cauchy_scan, ledger_identities, martingale_test, oracle_check, remainder_scan, selftest,
    simulate, sobolev_report, write_report, EnsembleSet, ExperimentConfig, Layout, Report,
};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Weakly asymmetric exclusion experiments for the conservative KPZ limit.
///
/// Each subcommand writes `<experiment>.csv` and `<experiment>.manifest.json`
/// into the configured `out_dir`. Exit status 0 means every check passed, 3
/// means the run completed with failing checks, 1 means it could not run.
#[derive(Parser)]
#[command(name = "ckpz", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Flat key = value configuration file; missing keys keep their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, value_name = "K")]
    workers: Option<usize>,
    /// Master seed, overriding `master_seed` from the config.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Field, martingale, nonlinear and remainder means plus the ledger identities.
    Simulate,
    /// Distances between nonlinear terms at successive mollifier scales.
    CauchyScan,
    /// Second moments of the remainder terms against epsilon and N.
    RemainderScan,
    /// Martingale increments, variance growth and Gaussian marginals.
    MartingaleTest,
    /// Negative Sobolev distances in the Dirichlet-Hermite basis.
    SobolevReport,
    /// Compare simulated transition frequencies with exp(tQ) on a small ring.
    OracleCheck {
        #[arg(long, default_value_t = 6)]
        sites: usize,
        /// Defaults to the first entry of epsilon_list.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Microscopic duration of each sampled transition.
        #[arg(long, default_value_t = 0.5)]
        duration: f64,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
    },
    /// Quick end-to-end run on a tiny system.
    Selftest,
}

fn load_config(global: &Global) -> ckpz::Result<ExperimentConfig> {
    let mut config = match &global.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = global.seed {
        config.master_seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> ckpz::Result<bool> {
    let config = load_config(&cli.global)?;
    let workers = cli
        .global
        .workers
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1);
    let full = |c: &ExperimentConfig| -> ckpz::Result<EnsembleSet> {
        EnsembleSet::run(c, Layout::full(c)?, workers)
    };
    let reports: Vec<Report> = match cli.command {
        Command::Simulate => {
            let set = full(&config)?;
            vec![simulate(&set), ledger_identities(&set)]
        }
        Command::CauchyScan => vec![cauchy_scan(&full(&config)?)?],
        Command::RemainderScan => vec![remainder_scan(&full(&config)?)?],
        Command::MartingaleTest => {
            let set = EnsembleSet::run(&config, Layout::martingale_only(&config)?, workers)?;
            vec![martingale_test(&set)?]
        }
        Command::SobolevReport => vec![sobolev_report(&full(&config)?)?],
        Command::OracleCheck {
            sites,
            epsilon,
            duration,
            samples,
        } => {
            let eps = epsilon.unwrap_or(config.epsilon_list[0]);
            let params = SimParams::with_sites(eps, config.gamma, sites, config.horizon)?;
            vec![oracle_check(
                params,
                duration,
                samples,
                config.master_seed,
                workers,
            )?]
        }
        Command::Selftest => vec![selftest(workers)?],
    };
    let mut passed = true;
    for report in &reports {
        for path in write_report(&config.out_dir, report, &config, workers)? {
            println!("wrote {}", path.display());
        }
        for check in &report.checks {
            println!(
                "{} {}: {}",
                if check.passed { "ok  " } else { "FAIL" },
                check.name,
                check.detail
            );
        }
        for cell in &report.marked {
            println!("marked {cell}");
        }
        passed &= report.passed();
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
