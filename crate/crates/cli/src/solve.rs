use std::path::PathBuf;

use clap::Args;
use fracflowq::circuit::{circuit_to_jsonl, max_qubits};
use fracflowq::hhl::{
    build_hhl_circuit, estimate_solution_norm, run_hhl, HhlConfig, HhlReport,
    DEFAULT_CLOCK_TOLERANCE,
};
use fracflowq::problem::classical_solve;
use serde::{Deserialize, Serialize};

use crate::io::{write_json, write_text};
use crate::manifest::RunManifest;
use crate::prepare::{load_or_prepare, load_system};

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    #[arg(long, default_value = "problem.json")]
    pub problem: PathBuf,
    /// Preparation circuit from `prepare`; synthesized when omitted.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Clock sizes; more than one runs a sweep.
    #[arg(long, value_delimiter = ',', default_value = "8")]
    pub nw: Vec<usize>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Largest clock weight allowed outside |0..0> in the success branch.
    #[arg(long, default_value_t = DEFAULT_CLOCK_TOLERANCE)]
    pub clock_tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "outcome.json")]
    pub out: PathBuf,
    /// Also write the HHL circuit (single clock size only).
    #[arg(long)]
    pub emit_circuit: Option<PathBuf>,
}

/// One solve; `extract` reads this back.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveOutput {
    #[serde(flatten)]
    pub report: HhlReport,
    pub n_b: usize,
    pub classical_norm: f64,
    /// Postselected data register, real parts.
    pub solution: Vec<f64>,
}

pub fn run(args: &SolveArgs, argv: &[String]) -> anyhow::Result<()> {
    if args.nw.is_empty() {
        return Err(crate::usage("--nw needs at least one clock size"));
    }
    if args.emit_circuit.is_some() && args.nw.len() > 1 {
        return Err(crate::usage("--emit-circuit needs a single --nw"));
    }
    let sys = load_system(&args.problem)?;
    let prep = load_or_prepare(args.circuit.as_deref(), &sys)?;
    let cap = max_qubits();
    if let Some(&n_w) = args.nw.iter().find(|&&n_w| sys.n_b + n_w + 2 > cap) {
        let n_qubits = sys.n_b + n_w + 2;
        return Err(crate::Exit {
            code: crate::RESOURCE,
            message: format!(
                "n_b = {} with n_w = {n_w} needs {n_qubits} qubits including readout, above the cap of {cap}; \
                 use a smaller grid or --nw, or raise FRACFLOWQ_MAX_QUBITS",
                sys.n_b
            ),
        }
        .into());
    }
    let x = classical_solve(&sys)?;
    let classical_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut outputs = Vec::with_capacity(args.nw.len());
    for &n_w in &args.nw {
        let mut cfg = HhlConfig::new(n_w)
            .with_clock_tolerance(args.clock_tolerance)
            .with_shots(args.shots, args.seed);
        if let Some(t) = args.t {
            cfg = cfg.with_t(t);
        }
        if let Some(c) = args.c {
            cfg = cfg.with_c(c);
        }
        let cfg = cfg.resolved(&sys)?;
        let circuit = build_hhl_circuit(&sys, &prep, &cfg)?;
        if let Some(path) = &args.emit_circuit {
            write_text(path, &circuit_to_jsonl(&circuit))?;
        }
        let mut out = run_hhl(&circuit, sys.n_b, &cfg)?;
        out.recovered_norm = Some(estimate_solution_norm(&out, sys.rhs_norm()));
        let report = HhlReport::new(&out, Some(&x))?;
        println!(
            "n_w = {n_w}: fidelity {:.9}, success {:.6e}, norm {:.6e} (classical {classical_norm:.6e})",
            report.fidelity_vs_oracle.unwrap_or(f64::NAN),
            report.success_probability,
            report.recovered_norm.unwrap_or(f64::NAN)
        );
        outputs.push(SolveOutput {
            report,
            n_b: sys.n_b,
            classical_norm,
            solution: out.solution_state.real_parts(),
        });
    }
    if outputs.len() == 1 {
        write_json(&args.out, &outputs[0])?;
    } else {
        write_json(&args.out, &outputs)?;
    }
    let mut m = RunManifest::new("solve", argv, args)?
        .seed(args.seed)
        .input(&args.problem);
    if let Some(c) = &args.circuit {
        m = m.input(c);
    }
    m = m.output(&args.out);
    if let Some(c) = &args.emit_circuit {
        m = m.output(c);
    }
    m.write_beside(&args.out)?;
    Ok(())
}
