use serde::{Deserialize, Serialize};

use super::RegionSpec;
use crate::circuit::{Circuit, Gate};
use crate::error::Result;
use crate::prep::{prep_sparse, SparseStateSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupRole {
    /// Complete pairs `{2k, 2k+1}`.
    Paired,
    /// Nodes whose pair partner is outside the region.
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    /// X gates on fixed-1 bits and H gates on free bits.
    Subcube,
    /// Sparse synthesis with equal amplitudes.
    General,
}

/// One r-register: `<r|x> = xi * sum_{i in subset} x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RGroup {
    pub subset: Vec<usize>,
    pub circuit: Circuit,
    pub xi: f64,
    pub role: GroupRole,
    pub recipe: Recipe,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RRegisterPlan {
    pub groups: Vec<RGroup>,
    pub total_nodes: usize,
    pub n_b: usize,
}

/// Circuit preparing the uniform superposition over `subset`.
pub fn uniform_subset_circuit(subset: &[usize], n_b: usize) -> Result<(Circuit, Recipe)> {
    let all_or = subset.iter().fold(0, |a, &i| a | i);
    let all_and = subset.iter().fold(usize::MAX, |a, &i| a & i);
    let free = all_or & !all_and;
    let mut c = Circuit::new(n_b);
    if subset.len() == 1usize << free.count_ones() {
        for q in 0..n_b {
            if free >> q & 1 == 1 {
                c.push(Gate::H(q))?;
            } else if all_and >> q & 1 == 1 {
                c.push(Gate::X(q))?;
            }
        }
        return Ok((c, Recipe::Subcube));
    }
    let spec = SparseStateSpec::new(n_b, subset.iter().map(|&i| (i, 1.0)).collect())?;
    Ok((prep_sparse(&spec)?, Recipe::General))
}

/// Paired group (complete pairs) and single group (the rest), each with
/// its own r-register circuit.
pub fn plan_r_registers(region: &RegionSpec, n_b: usize) -> Result<RRegisterPlan> {
    region.check_range(n_b)?;
    let nodes = region.nodes();
    let (paired, single): (Vec<usize>, Vec<usize>) =
        nodes.iter().partition(|&&i| nodes.contains(&(i ^ 1)));
    let mut groups = Vec::new();
    for (subset, role) in [(paired, GroupRole::Paired), (single, GroupRole::Single)] {
        if subset.is_empty() {
            continue;
        }
        let (circuit, recipe) = uniform_subset_circuit(&subset, n_b)?;
        let xi = 1.0 / (subset.len() as f64).sqrt();
        groups.push(RGroup {
            subset,
            circuit,
            xi,
            role,
            recipe,
        });
    }
    Ok(RRegisterPlan {
        groups,
        total_nodes: nodes.len(),
        n_b,
    })
}
