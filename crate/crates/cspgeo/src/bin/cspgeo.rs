use clap::{Parser, Subcommand};
use cspgeo::harness::{replay, run_experiment, validate_config, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cspgeo",
    about = "Desk-scale experiments on the solution-space geometry of random CSPs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file.
    Run {
        config: PathBuf,
    },
    /// Validate a config file without running anything.
    Validate {
        config: PathBuf,
    },
    /// Re-run a record's embedded config and byte-compare the outputs.
    Replay {
        record: PathBuf,
        /// Scratch directory for the re-run (default: <record dir>/replay).
        #[arg(long)]
        scratch: Option<PathBuf>,
    },
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ExperimentConfig::from_json(&text).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => {
            let config = match load_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match run_experiment(&config) {
                Ok(record) => {
                    println!(
                        "wrote {} summary file(s) to {}",
                        record.summary_files.len(),
                        config.output_dir.display()
                    );
                    for f in &record.summary_files {
                        println!("  {f}");
                    }
                    if record.failures.is_empty() {
                        ExitCode::SUCCESS
                    } else {
                        eprintln!("{} trial(s) failed:", record.failures.len());
                        for f in &record.failures {
                            eprintln!(
                                "  grid {} trial {} seed {:#x}: {}",
                                f.grid_index, f.trial, f.seed, f.message
                            );
                        }
                        ExitCode::FAILURE
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Validate { config } => {
            let config = match load_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let issues = validate_config(&config);
            if issues.is_empty() {
                println!("ok");
                ExitCode::SUCCESS
            } else {
                for i in &issues {
                    eprintln!("{}: {}", i.field, i.message);
                }
                ExitCode::FAILURE
            }
        }
        Command::Replay { record, scratch } => {
            let scratch = scratch.unwrap_or_else(|| {
                record
                    .parent()
                    .map(|p| p.join("replay"))
                    .unwrap_or_else(|| PathBuf::from("replay"))
            });
            match replay(&record, &scratch) {
                Ok(mismatches) if mismatches.is_empty() => {
                    println!("replay byte-identical");
                    ExitCode::SUCCESS
                }
                Ok(mismatches) => {
                    eprintln!("replay mismatch in: {}", mismatches.join(", "));
                    ExitCode::FAILURE
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
