use std::path::PathBuf;

use clap::Args;
use fracflowq::circuit::circuit_to_jsonl;
use fracflowq::hhl::{build_hhl_circuit, HhlConfig, HhlLayout};
use fracflowq::problem::Problem;
use fracflowq::readout::{
    extract_average, overlap_registry, plan_r_registers, ExtractionConfig, ExtractionReport,
    RegionFile, RegionSpec, StateSource,
};
use serde::{Deserialize, Serialize};

use crate::io::{read_text, write_json, write_text};
use crate::manifest::RunManifest;
use crate::prepare::load_or_prepare;
use crate::solve::SolveOutput;

#[derive(Args, Debug, Serialize)]
pub struct ExtractArgs {
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Preparation circuit used for the solve; synthesized when omitted.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Output of `solve` (single clock size).
    #[arg(long, requires = "problem", conflicts_with = "inject_state")]
    pub solution: Option<PathBuf>,
    /// JSON array used directly as the state, bypassing the solver.
    #[arg(long, required_unless_present = "solution")]
    pub inject_state: Option<PathBuf>,
    /// Region file: a JSON list of nodes or a `{kind, params}` shape.
    #[arg(long, conflicts_with = "nodes", required_unless_present = "nodes")]
    pub region: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub nodes: Option<Vec<usize>>,
    /// `hadamard` or `swap`.
    #[arg(long, default_value = "hadamard")]
    pub mode: String,
    /// 0 = exact probabilities.
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Allow swap mode on multi-group regions by taking every group sum as nonnegative.
    #[arg(long)]
    pub assume_nonnegative: bool,
    /// Drop the higher node of every complete pair so one circuit suffices.
    #[arg(long)]
    pub prune: bool,
    /// Directory for the measured test circuits, one JSONL file per group.
    #[arg(long)]
    pub emit_circuits: Option<PathBuf>,
    #[arg(long, default_value = "extraction.json")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExtractOutput {
    region: Vec<usize>,
    pruned_nodes: Vec<usize>,
    #[serde(flatten)]
    report: ExtractionReport,
}

/// Per-node solver error from a state fidelity `f`: the normalized states
/// differ by at most `sqrt(2 (1 - sqrt f))` in 2-norm, spread over `n` nodes.
pub fn eps_hhl_per_node(fidelity: f64, n: usize) -> f64 {
    (2.0 * (1.0 - fidelity.clamp(0.0, 1.0).sqrt())).sqrt() / n as f64
}

pub fn run(args: &ExtractArgs, argv: &[String]) -> anyhow::Result<()> {
    let problem = match &args.problem {
        Some(p) => Some(Problem::from_json(&read_text(p)?)?),
        None => None,
    };
    let region = match (&args.region, &args.nodes) {
        (Some(path), _) => {
            let file: RegionFile = serde_json::from_str(&read_text(path)?)?;
            match (&file, &problem) {
                (RegionFile::Nodes(n), _) => RegionSpec::new(n.clone())?,
                (RegionFile::Shape(_), Some(p)) => file.resolve(&p.grid)?,
                (RegionFile::Shape(_), None) => {
                    return Err(crate::usage("region shapes need --problem for the grid"))
                }
            }
        }
        (None, Some(nodes)) => RegionSpec::new(nodes.clone())?,
        (None, None) => return Err(crate::usage("one of --region or --nodes is required")),
    };
    let (region, pruned_nodes) = if args.prune {
        region.pruned()
    } else {
        (region, Vec::new())
    };

    let (source, n_b, solution_norm, eps_hhl) = match (&args.solution, &args.inject_state) {
        (Some(path), _) => {
            let problem = problem
                .as_ref()
                .ok_or_else(|| crate::usage("--solution needs --problem"))?;
            let solved: SolveOutput = serde_json::from_str(&read_text(path)?)?;
            let sys = problem.assemble()?;
            let prep = load_or_prepare(args.circuit.as_deref(), &sys)?;
            let r = &solved.report;
            let cfg = HhlConfig::new(r.n_w)
                .with_t(r.t)
                .with_c(r.c)
                .resolved(&sys)?;
            let circuit = build_hhl_circuit(&sys, &prep, &cfg)?;
            let source = StateSource::hhl(
                circuit,
                HhlLayout {
                    n_b: sys.n_b,
                    n_w: r.n_w,
                },
            )?;
            let eps = r
                .fidelity_vs_oracle
                .map_or(0.0, |f| eps_hhl_per_node(f, region.len()));
            (source, sys.n_b, r.recovered_norm, eps)
        }
        (None, Some(path)) => {
            let x: Vec<f64> = serde_json::from_str(&read_text(path)?)?;
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let source = StateSource::injected(&x)?;
            let n_b = source.n_data;
            (source, n_b, Some(norm), 0.0)
        }
        (None, None) => {
            return Err(crate::usage(
                "one of --solution or --inject-state is required",
            ))
        }
    };

    let plan = plan_r_registers(&region, n_b)?;
    let registry = overlap_registry();
    let test = registry.get(&args.mode)?;
    if let Some(dir) = &args.emit_circuits {
        for (g, group) in plan.groups.iter().enumerate() {
            let built = test.build(&source, &group.circuit)?;
            write_text(
                &dir.join(format!("group_{g}.jsonl")),
                &circuit_to_jsonl(&built.measured()?),
            )?;
        }
    }
    let cfg = ExtractionConfig {
        shots: args.shots,
        seed: args.seed,
        assume_nonnegative: args.assume_nonnegative,
        solution_norm,
        eps_hhl,
    };
    let report = extract_average(&source, &plan, test, &cfg)?;
    for o in report.overlaps.iter().filter_map(|o| o.warning.as_ref()) {
        eprintln!("warning: {o}");
    }
    println!(
        "average (normalized) {:.9e}, absolute {}",
        report.average_normalized,
        report
            .average_absolute
            .map_or("n/a".to_string(), |a| format!("{a:.9e}"))
    );
    let out = ExtractOutput {
        region: region.nodes().to_vec(),
        pruned_nodes,
        report,
    };
    write_json(&args.out, &out)?;

    let mut m = RunManifest::new("extract", argv, args)?.seed(args.seed);
    for p in [
        &args.problem,
        &args.circuit,
        &args.solution,
        &args.inject_state,
        &args.region,
    ]
    .into_iter()
    .flatten()
    {
        m = m.input(p);
    }
    m.output(&args.out).write_beside(&args.out)?;
    Ok(())
}
