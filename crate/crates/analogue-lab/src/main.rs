use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use analogue_lab::harness::{self, ExperimentConfig, HarnessError};

/// Finite-precision analogue-machine experiments.
#[derive(Debug, Parser)]
#[command(name = "analogue-lab", version, about)]
struct Cli {
    /// List available experiments and exit.
    #[arg(long)]
    list: bool,
    /// Experiment to run (overrides the config's `experiment` key).
    #[arg(long)]
    experiment: Option<String>,
    /// Path to the TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the CSV and JSON reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's search/truncation budget.
    #[arg(long)]
    budget: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &HarnessError) -> u8 {
    match err {
        HarnessError::ConfigInvalid(_) => 2,
        HarnessError::Io(_) => 3,
        HarnessError::UnknownExperiment(_) => 4,
        _ => 1,
    }
}

fn real_main(cli: Cli) -> Result<(), HarnessError> {
    if cli.list {
        for (name, description) in harness::list_experiments() {
            println!("{name:20} {description}");
        }
        return Ok(());
    }

    let config_path = cli.config.ok_or_else(|| {
        HarnessError::ConfigInvalid("--config <file> is required (or use --list)".into())
    })?;
    let text = std::fs::read_to_string(&config_path)?;
    let mut config = ExperimentConfig::from_toml(&text)?;
    if let Some(experiment) = cli.experiment {
        config.experiment = experiment;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(budget) = cli.budget {
        config.budget = budget;
    }
    if !harness::is_known_experiment(&config.experiment) {
        return Err(HarnessError::UnknownExperiment(config.experiment.clone()));
    }
    config.validate()?;

    let base_dir = config_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let out_dir = cli
        .out
        .or_else(|| config.output_dir.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    let report = harness::run(&config, &base_dir, &out_dir)?;
    let paths = harness::report_paths(&out_dir, &report.experiment);

    println!(
        "{}: {} cells in {:.1} ms",
        report.experiment,
        report.output.csv_rows.len(),
        report.wall_time.as_secs_f64() * 1e3
    );
    println!("wrote {}", paths.csv.display());
    println!("wrote {}", paths.json.display());
    if let Some(claim) = &report.claim {
        for m in claim.members() {
            let nu = m
                .waiting_time
                .map(|n| n.to_string())
                .unwrap_or_else(|| "?".into());
            match m.threshold_log2 {
                Some(t) => println!(
                    "  j = {:2}  nu = {:>2}  correct from 2^{:.1} up{}",
                    m.j,
                    nu,
                    t,
                    if m.flip { ", wrong below" } else { "" }
                ),
                None => println!("  j = {:2}  nu = {:>2}  never stably correct", m.j, nu),
            }
        }
        println!(
            "  non-members all correct: {}; claim pattern consistent: {}",
            claim.non_members_all_correct, claim.consistent
        );
    }
    Ok(())
}
