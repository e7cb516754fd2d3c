use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lr_decoherence::Spin;
use lrdecoh::config::{parse_number, parse_spin};
use lrdecoh::{run, scan_j, verify, Outcome};

/// Exact decoherence factors from Lewis–Riesenfeld invariants.
#[derive(Parser)]
#[command(name = "lrdecoh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every branch and write aux, phase and decoherence CSVs.
    Run {
        config: PathBuf,
        /// Override the configured time step.
        #[arg(long, value_parser = parse_number)]
        step: Option<f64>,
    },
    /// Run the residual and cross-route checks; exit 3 if any fails.
    Verify {
        config: PathBuf,
        #[arg(long, value_parser = parse_number)]
        step: Option<f64>,
    },
    /// Tabulate |F| = |cos(delta/2)|^(2j) for j = 1/2 ... jmax.
    ScanJ {
        config: PathBuf,
        /// Angle between the branch fields, e.g. `pi/3`.
        #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
        delta: Option<f64>,
        #[arg(long, value_parser = parse_spin)]
        jmax: Option<Spin>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, step } => run(&config, step),
        Command::Verify { config, step } => verify(&config, step),
        Command::ScanJ { config, delta, jmax } => scan_j(&config, delta, jmax),
    };
    match result {
        Ok(outcome) => finish(outcome),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn finish(outcome: Outcome) -> ExitCode {
    if !outcome.report.checks.is_empty() {
        println!("{}", outcome.report);
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    ExitCode::from(outcome.exit_code())
}
