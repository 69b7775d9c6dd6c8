mod bench;
mod extract;
mod generate;
mod io;
mod manifest;
mod prepare;
mod solve;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "fracflowq",
    version,
    about = "Fracture-flow pressure solves with a simulated HHL pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a problem file and its permeability CSV.
    Generate(generate::GenerateArgs),
    /// Synthesize and verify the right-hand-side preparation circuit.
    Prepare(prepare::PrepareArgs),
    /// Run HHL on a problem and compare against the classical solution.
    Solve(solve::SolveArgs),
    /// Estimate the average pressure over a node region.
    Extract(extract::ExtractArgs),
    /// Gate counts of sparse preparation against the number of wells.
    BenchGates(bench::BenchArgs),
    /// Re-run the command recorded in a manifest.
    Replay { manifest: std::path::PathBuf },
}

/// Failure carrying its process exit code.
#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub message: String,
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

pub const USAGE: u8 = 2;
pub const VERIFICATION: u8 = 3;
pub const RESOURCE: u8 = 4;

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    Exit {
        code: USAGE,
        message: message.into(),
    }
    .into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use fracflowq::Error as E;
    if let Some(e) = err.downcast_ref::<Exit>() {
        return e.code;
    }
    match err.downcast_ref::<E>() {
        Some(E::QubitCap { .. }) => RESOURCE,
        Some(
            E::Verification(_) | E::ClockResidual { .. } | E::Singular { .. } | E::DegenerateHhl(_),
        ) => VERIFICATION,
        Some(E::Io(_)) => 1,
        Some(_) => USAGE,
        None if err.downcast_ref::<std::io::Error>().is_some() => 1,
        None => USAGE,
    }
}

fn dispatch(command: Command, argv: &[String]) -> anyhow::Result<()> {
    match command {
        Command::Generate(a) => generate::run(&a, argv),
        Command::Prepare(a) => prepare::run(&a, argv),
        Command::Solve(a) => solve::run(&a, argv),
        Command::Extract(a) => extract::run(&a, argv),
        Command::BenchGates(a) => bench::run(&a, argv),
        Command::Replay { manifest } => {
            let m = manifest::RunManifest::load(&manifest)?;
            let mut full = vec!["fracflowq".to_string()];
            full.extend(m.args.iter().cloned());
            let cli = Cli::try_parse_from(&full)
                .map_err(|e| usage(format!("manifest arguments do not parse: {e}")))?;
            if matches!(cli.command, Command::Replay { .. }) {
                return Err(usage("a manifest cannot record a replay"));
            }
            dispatch(cli.command, &m.args)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match dispatch(cli.command, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
