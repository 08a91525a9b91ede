use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use valuant::corpus::{exit_code, run_file, summary_json, summary_table, verify_dir, FixtureReport};
use valuant::theorems::CheckOptions;

/// Exact valuation invariants of algebraic elements, from problem files.
#[derive(Parser)]
#[command(name = "valuant", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for the randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on MacLane augmentation steps.
    #[arg(long, global = true, default_value_t = 64)]
    max_iterations: usize,
    /// Random trials for the valuation-basis and key-polynomial checks.
    #[arg(long, global = true, default_value_t = 200)]
    trials: usize,
    /// Print only the JSON lines (no table on standard error).
    #[arg(long, global = true)]
    json_only: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the queries of one problem file.
    Run { file: PathBuf },
    /// Run every `*.problem` fixture in a directory against its sidecar.
    Verify { dir: PathBuf },
}

fn emit(reports: &[FixtureReport], json_only: bool) -> std::io::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for r in reports {
        for line in &r.lines {
            writeln!(out, "{line}")?;
        }
    }
    writeln!(out, "{}", summary_json(reports))?;
    if !json_only {
        eprint!("{}", summary_table(reports));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = CheckOptions { seed: cli.seed, max_iterations: cli.max_iterations, basis_trials: cli.trials };
    let reports = match &cli.command {
        Command::Run { file } => vec![run_file(file, opts)],
        Command::Verify { dir } => match verify_dir(dir, opts) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error[{}]: {e}", e.code());
                return ExitCode::from(2);
            }
        },
    };
    if let Err(e) = emit(&reports, cli.json_only) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(exit_code(&reports) as u8)
}
