//! Average-pressure extraction over a node region with swap or Hadamard
//! tests against uniform r-registers.

mod circuits;
mod estimate;
mod plan;
mod region;

pub use circuits::{build_hadamard_test, build_swap_test, OverlapCircuit, StateSource, TestMode};
pub use estimate::{
    combine_average, correct_for_postselection, estimate_overlap, extraction_error, measure_test,
    AncillaStats, OverlapEstimate, TestDistribution,
};
pub use plan::{
    plan_r_registers, uniform_subset_circuit, GroupRole, RGroup, RRegisterPlan, Recipe,
};
pub use region::{RegionFile, RegionShape, RegionSpec};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::Result;
use crate::registry::{Named, Registry};

pub trait OverlapTest: Named + Send + Sync {
    fn mode(&self) -> TestMode;
    fn build(&self, source: &StateSource, r_circuit: &Circuit) -> Result<OverlapCircuit>;
}

pub struct SwapTest;

impl Named for SwapTest {
    fn name(&self) -> &'static str {
        "swap"
    }
}

impl OverlapTest for SwapTest {
    fn mode(&self) -> TestMode {
        TestMode::Swap
    }

    fn build(&self, source: &StateSource, r_circuit: &Circuit) -> Result<OverlapCircuit> {
        build_swap_test(source, r_circuit)
    }
}

pub struct HadamardTest;

impl Named for HadamardTest {
    fn name(&self) -> &'static str {
        "hadamard"
    }
}

impl OverlapTest for HadamardTest {
    fn mode(&self) -> TestMode {
        TestMode::Hadamard
    }

    fn build(&self, source: &StateSource, r_circuit: &Circuit) -> Result<OverlapCircuit> {
        build_hadamard_test(source, r_circuit)
    }
}

pub type OverlapRegistry = Registry<dyn OverlapTest>;

pub fn overlap_registry() -> OverlapRegistry {
    let mut r = OverlapRegistry::default();
    r.register(Box::new(SwapTest));
    r.register(Box::new(HadamardTest));
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionConfig {
    /// 0 = exact probabilities.
    pub shots: u64,
    pub seed: u64,
    pub assume_nonnegative: bool,
    /// `||A^{-1} b||`; absolute averages are reported only when set.
    pub solution_norm: Option<f64>,
    /// Per-node solver error for the budget.
    pub eps_hhl: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            shots: 0,
            seed: 0,
            assume_nonnegative: false,
            solution_norm: None,
            eps_hhl: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub subset: Vec<usize>,
    pub xi: f64,
    pub role: GroupRole,
    pub recipe: Recipe,
    pub extra_qubits: usize,
    /// Probability that the source's success flags fire (1 without flags).
    pub flag_probability: f64,
}

/// Budget on the normalized average: `eps_extract + n * eps_hhl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub eps_extract: f64,
    pub eps_hhl: f64,
    pub n_nodes: usize,
    pub bound_normalized: f64,
    pub bound_absolute: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub mode: TestMode,
    pub shots: u64,
    pub groups: Vec<GroupReport>,
    pub overlaps: Vec<OverlapEstimate>,
    pub average_normalized: f64,
    pub average_absolute: Option<f64>,
    pub error_budget: ErrorBudget,
}

/// Runs one test per group (concurrently, group `g` seeded with
/// `seed + g`) and combines the overlaps.
pub fn extract_average(
    source: &StateSource,
    plan: &RRegisterPlan,
    test: &dyn OverlapTest,
    cfg: &ExtractionConfig,
) -> Result<ExtractionReport> {
    let runs = plan
        .groups
        .par_iter()
        .enumerate()
        .map(|(g, group)| {
            let built = test.build(source, &group.circuit)?;
            let dist = TestDistribution::of(&built)?;
            let seed = cfg.seed.wrapping_add(g as u64);
            let (_, flag_probability) = dist.stats(cfg.shots, seed)?;
            let est = dist.estimate(test.mode(), cfg.shots, seed)?;
            let report = GroupReport {
                subset: group.subset.clone(),
                xi: group.xi,
                role: group.role,
                recipe: group.recipe,
                extra_qubits: built.extra_qubits(source),
                flag_probability,
            };
            Ok((report, est))
        })
        .collect::<Result<Vec<_>>>()?;
    let (groups, overlaps): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let average_normalized = combine_average(&overlaps, plan, 1.0, cfg.assume_nonnegative)?;
    let average_absolute = cfg.solution_norm.map(|n| n * average_normalized);
    let eps_extract = extraction_error(&overlaps, plan);
    let bound_normalized = eps_extract + plan.total_nodes as f64 * cfg.eps_hhl;
    Ok(ExtractionReport {
        mode: test.mode(),
        shots: cfg.shots,
        groups,
        overlaps,
        average_normalized,
        average_absolute,
        error_budget: ErrorBudget {
            eps_extract,
            eps_hhl: cfg.eps_hhl,
            n_nodes: plan.total_nodes,
            bound_normalized,
            bound_absolute: cfg.solution_norm.map(|n| n * bound_normalized),
        },
    })
}

#[cfg(test)]
mod tests;
