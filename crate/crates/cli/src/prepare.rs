use std::path::{Path, PathBuf};

use clap::Args;
use fracflowq::circuit::{circuit_from_jsonl, circuit_to_jsonl, gate_census, Circuit, GateCensus};
use fracflowq::prep::{prep_fidelity, prep_registry, select_prep};
use fracflowq::problem::{LinearSystem, Problem};
use fracflowq::Error;
use serde::Serialize;

use crate::io::{read_text, sibling, write_json, write_text};
use crate::manifest::RunManifest;

pub const MIN_PREP_FIDELITY: f64 = 1.0 - 1e-9;

#[derive(Args, Debug, Serialize)]
pub struct PrepareArgs {
    #[arg(long, default_value = "problem.json")]
    pub problem: PathBuf,
    /// `auto`, `hadamard-ladder` or `sparse`.
    #[arg(long, default_value = "auto")]
    pub strategy: String,
    #[arg(long, default_value = "prep.jsonl")]
    pub out: PathBuf,
    /// Defaults to `<out stem>.report.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct PrepReport {
    strategy: &'static str,
    n_b: usize,
    nonzeros: usize,
    fidelity: f64,
    gates: usize,
    census: GateCensus,
}

pub fn load_system(path: &Path) -> anyhow::Result<LinearSystem> {
    Ok(Problem::from_json(&read_text(path)?)?.assemble()?)
}

/// Reads a preparation circuit, or synthesizes one with `auto` when absent.
pub fn load_or_prepare(circuit: Option<&Path>, sys: &LinearSystem) -> anyhow::Result<Circuit> {
    match circuit {
        Some(p) => Ok(circuit_from_jsonl(&read_text(p)?)?),
        None => {
            let registry = prep_registry();
            Ok(select_prep(&registry, "auto", &sys.rhs)?.prepare(&sys.rhs)?)
        }
    }
}

pub fn run(args: &PrepareArgs, argv: &[String]) -> anyhow::Result<()> {
    let sys = load_system(&args.problem)?;
    let registry = prep_registry();
    let strategy = select_prep(&registry, &args.strategy, &sys.rhs)?;
    let circuit = strategy.prepare(&sys.rhs)?;
    let fidelity = prep_fidelity(&circuit, &sys.rhs)?;
    let report = PrepReport {
        strategy: strategy.name(),
        n_b: sys.n_b,
        nonzeros: sys.rhs.iter().filter(|v| **v != 0.0).count(),
        fidelity,
        gates: circuit.len(),
        census: gate_census(&circuit)?,
    };
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| sibling(&args.out, "report.json"));
    write_text(&args.out, &circuit_to_jsonl(&circuit))?;
    write_json(&report_path, &report)?;
    RunManifest::new("prepare", argv, args)?
        .input(&args.problem)
        .output(&args.out)
        .output(&report_path)
        .write_beside(&args.out)?;
    if fidelity < MIN_PREP_FIDELITY {
        return Err(Error::Verification(format!(
            "{} circuit fidelity {fidelity:.12}",
            strategy.name()
        ))
        .into());
    }
    println!(
        "{}: {} gates, fidelity {fidelity:.12}",
        strategy.name(),
        circuit.len()
    );
    Ok(())
}
