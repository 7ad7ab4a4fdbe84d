use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use qlan_cli::{cmd_run, cmd_sweep, RunArgs, SweepArgs, EXIT_USAGE};

/// Quantum LAN simulator: engineer client entanglement topologies with
/// Pauli measurements and classical corrections, then verify the result.
#[derive(Parser)]
#[command(name = "qlan", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and verify the final state.
    Run {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Force measurement outcomes, e.g. "+-+".
        #[arg(long = "force-outcomes")]
        force_outcomes: Option<String>,
        /// Write the run report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write initial.dot and final.dot into this directory.
        #[arg(long = "dot-dir")]
        dot_dir: Option<PathBuf>,
        /// Override the verification tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long = "tamper-corrections", hide = true)]
        tamper_corrections: bool,
    },
    /// Run the Cartesian product of outcome vectors (and optionally bases).
    Sweep {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Enumerate all 2^n_o forced-outcome vectors.
        #[arg(long = "all-outcomes", required = true)]
        all_outcomes: bool,
        /// Also enumerate all 3^n_o bases arrays.
        #[arg(long = "all-bases")]
        all_bases: bool,
        /// Write all run reports as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            std::process::exit(code);
        }
    };
    let code = match cli.command {
        Command::Run { scenario, seed, force_outcomes, report, dot_dir, tolerance, tamper_corrections } => {
            cmd_run(&RunArgs {
                scenario,
                seed,
                force_outcomes,
                report,
                dot_dir,
                tolerance,
                tamper_corrections,
            })
        }
        Command::Sweep { scenario, all_outcomes, all_bases, report } => {
            cmd_sweep(&SweepArgs { scenario, all_outcomes, all_bases, report })
        }
    };
    std::process::exit(code);
}
