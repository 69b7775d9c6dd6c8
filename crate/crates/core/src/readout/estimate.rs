//! Ancilla statistics to overlaps, and overlaps to average pressure.

use serde::{Deserialize, Serialize};

use super::circuits::{OverlapCircuit, TestMode};
use super::plan::RRegisterPlan;
use crate::circuit::{marginal_distribution, sample_distribution, simulate};
use crate::error::{Error, Result};

/// Ancilla statistics: an exact `p(0)` or a shot tally.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AncillaStats {
    Exact(f64),
    Shots { zeros: u64, shots: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapEstimate {
    /// `|<r|x>|^2` in swap mode, `Re<r|x>` in Hadamard mode.
    pub value: f64,
    pub mode: TestMode,
    /// 0 in exact mode.
    pub shots: u64,
    pub standard_error: f64,
    pub p0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

pub fn estimate_overlap(stats: AncillaStats, mode: TestMode) -> Result<OverlapEstimate> {
    let (p0, shots, se) = match stats {
        AncillaStats::Exact(p) => {
            if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(Error::Readout(format!("probability {p} outside [0, 1]")));
            }
            (p.clamp(0.0, 1.0), 0, 0.0)
        }
        AncillaStats::Shots { zeros, shots } => {
            if shots == 0 || zeros > shots {
                return Err(Error::Readout(format!(
                    "{zeros} zeros out of {shots} shots"
                )));
            }
            let p = zeros as f64 / shots as f64;
            (p, shots, 2.0 * (p * (1.0 - p) / shots as f64).sqrt())
        }
    };
    let raw = 2.0 * p0 - 1.0;
    let mut warning = None;
    let value = match mode {
        TestMode::Swap => {
            if p0 < 0.5 - 1.5 * se - 1e-12 {
                warning = Some(format!(
                    "swap-test p(0) = {p0} is below 1/2 by more than 3 standard errors"
                ));
            }
            raw.max(0.0)
        }
        TestMode::Hadamard => raw,
    };
    Ok(OverlapEstimate {
        value,
        mode,
        shots,
        standard_error: se,
        p0,
        warning,
    })
}

/// Joint distribution of a test's ancilla and postselection flags, from
/// one simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct TestDistribution {
    qubits: Vec<usize>,
    dist: Vec<f64>,
    flags: usize,
}

impl TestDistribution {
    pub fn of(test: &OverlapCircuit) -> Result<Self> {
        let state = simulate(&test.circuit, None)?;
        let mut qubits = vec![test.ancilla];
        qubits.extend(test.postselect.iter().map(|&(q, _)| q));
        let dist = marginal_distribution(&state, &qubits)?;
        let flags = test
            .postselect
            .iter()
            .enumerate()
            .filter(|(_, (_, v))| *v)
            .map(|(k, _)| 1 << (k + 1))
            .sum();
        Ok(TestDistribution {
            qubits,
            dist,
            flags,
        })
    }

    /// Ancilla statistics conditioned on the flags (exact when `shots` is
    /// 0), with the flag success probability or frequency.
    pub fn stats(&self, shots: u64, seed: u64) -> Result<(AncillaStats, f64)> {
        let f = self.flags;
        if shots == 0 {
            let (p_zero, p_one) = (self.dist[f], self.dist[f | 1]);
            let post = p_zero + p_one;
            if post <= 0.0 {
                return Err(Error::Readout("postselection has zero probability".into()));
            }
            return Ok((AncillaStats::Exact(p_zero / post), post));
        }
        let counts = sample_distribution(&self.dist, &self.qubits, shots, seed);
        let (zeros, ones) = (counts.histogram[f], counts.histogram[f | 1]);
        if zeros + ones == 0 {
            return Err(Error::Readout(format!(
                "no shot out of {shots} passed postselection"
            )));
        }
        Ok((
            AncillaStats::Shots {
                zeros,
                shots: zeros + ones,
            },
            (zeros + ones) as f64 / shots as f64,
        ))
    }

    /// Overlap estimate, corrected for the source's postselection.
    pub fn estimate(&self, mode: TestMode, shots: u64, seed: u64) -> Result<OverlapEstimate> {
        let (stats, flag_probability) = self.stats(shots, seed)?;
        let mut est = estimate_overlap(stats, mode)?;
        if self.qubits.len() > 1 {
            correct_for_postselection(&mut est, flag_probability)?;
        }
        Ok(est)
    }
}

/// Simulates `test` and returns its conditioned ancilla statistics and the
/// flag success probability.
pub fn measure_test(test: &OverlapCircuit, shots: u64, seed: u64) -> Result<(AncillaStats, f64)> {
    TestDistribution::of(test)?.stats(shots, seed)
}

/// Hadamard test on a postselected source: with `P(flags) = (1 + p) / 2`
/// the conditional value `2p(0) - 1` equals `2 sqrt(p) / (1 + p)` times
/// `Re<r|x>`.
pub fn correct_for_postselection(est: &mut OverlapEstimate, flag_probability: f64) -> Result<()> {
    if est.mode != TestMode::Hadamard {
        return Ok(());
    }
    let p = 2.0 * flag_probability - 1.0;
    if p <= 0.0 {
        return Err(Error::Readout(format!(
            "source success probability {p} is not positive; the flag frequency needs more shots to resolve it"
        )));
    }
    let factor = (1.0 + p) / (2.0 * p.sqrt());
    est.value = (est.value * factor).clamp(-1.0, 1.0);
    est.standard_error *= factor;
    Ok(())
}

/// `norm * sum_g (overlap_g / xi_g) / total_nodes`. Swap-mode overlaps are
/// taken as `+sqrt(value)`, which needs `assume_nonnegative` when there is
/// more than one group.
pub fn combine_average(
    estimates: &[OverlapEstimate],
    plan: &RRegisterPlan,
    solution_norm: f64,
    assume_nonnegative: bool,
) -> Result<f64> {
    if estimates.len() != plan.groups.len() {
        return Err(Error::Readout(format!(
            "{} estimates for {} groups",
            estimates.len(),
            plan.groups.len()
        )));
    }
    let mode = estimates
        .first()
        .map(|e| e.mode)
        .ok_or_else(|| Error::Readout("no groups".into()))?;
    if estimates.iter().any(|e| e.mode != mode) {
        return Err(Error::Readout(
            "estimates mix swap and Hadamard modes".into(),
        ));
    }
    if mode == TestMode::Swap && estimates.len() > 1 && !assume_nonnegative {
        return Err(Error::Readout(
            "swap tests lose the sign of each group sum; use Hadamard mode or assert nonnegative pressures".into(),
        ));
    }
    if !(solution_norm.is_finite() && solution_norm >= 0.0) {
        return Err(Error::Readout(format!("solution norm {solution_norm}")));
    }
    let sum: f64 = estimates
        .iter()
        .zip(&plan.groups)
        .map(|(e, g)| {
            let overlap = match mode {
                TestMode::Swap => e.value.sqrt(),
                TestMode::Hadamard => e.value,
            };
            overlap / g.xi
        })
        .sum();
    Ok(solution_norm * sum / plan.total_nodes as f64)
}

/// Shot-noise part of the error budget on the normalized average:
/// `sum_g 3 se(overlap_g) / (xi_g n)`.
pub fn extraction_error(estimates: &[OverlapEstimate], plan: &RRegisterPlan) -> f64 {
    estimates
        .iter()
        .zip(&plan.groups)
        .map(|(e, g)| {
            let se = match e.mode {
                TestMode::Hadamard => e.standard_error,
                TestMode::Swap if e.value > 0.0 => e.standard_error / (2.0 * e.value.sqrt()),
                TestMode::Swap => e.standard_error.sqrt(),
            };
            3.0 * se / g.xi
        })
        .sum::<f64>()
        / plan.total_nodes as f64
}
