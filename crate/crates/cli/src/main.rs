use std::io;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hiercrt_cli::commands::{
    audit, deal, gen_params, inspect, reconstruct, AuditArgs, DealArgs, GenParamsArgs,
    InspectArgs, ReconstructArgs,
};

/// Hierarchical CRT secret sharing.
///
/// Exit codes: 0 ok, 1 I/O, 2 validation, 3 invalid parameters,
/// 4 not authorized, 5 params digest mismatch, 6 missing public value,
/// 7 adversary set is authorized, 8 analysis budget exceeded.
#[derive(Parser)]
#[command(name = "hiercrt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a compact coprime sequence and write a parameter file.
    GenParams(GenParamsArgs),
    /// Split a secret into share files and a public bundle.
    Deal(DealArgs),
    /// Recover the secret from share files.
    Reconstruct(ReconstructArgs),
    /// Measure what an unauthorized coalition learns.
    Audit(AuditArgs),
    /// Pretty-print any hiercrt file.
    Inspect(InspectArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    let result = match &cli.command {
        Command::GenParams(a) => gen_params(a, &mut stdout),
        Command::Deal(a) => deal(a, &mut stdout),
        Command::Reconstruct(a) => reconstruct(a, &mut stdout),
        Command::Audit(a) => audit(a, &mut stdout),
        Command::Inspect(a) => inspect(a, &mut stdout),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
