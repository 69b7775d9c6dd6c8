//! Sparse state synthesis by pairwise merging.
//!
//! The circuit is built in reverse: starting from the target state, pairs of
//! live basis indices are merged until one index remains, which is then
//! cleared to `|0..0>` with X gates. Each merge reduces the pair to a single
//! differing bit with CNOTs and then rotates their two amplitudes into one with
//! a multi-controlled Ry whose controls separate the pair from every other
//! live index. The preparation circuit is the adjoint of that sequence.
//!
//! Pair selection evaluates two candidates and keeps the cheaper one:
//! the minimum-Hamming pair with a greedy control cover, and a bit-splitting
//! search that always needs at most `floor(log2 L)` controls for `L` live
//! indices.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Control, Gate};
use crate::error::{Error, Result};

/// Real signed amplitudes on a few basis states of `n_b` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseStateSpec {
    pub n_b: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseStateSpec {
    pub fn new(n_b: usize, entries: Vec<(usize, f64)>) -> Result<Self> {
        let spec = SparseStateSpec { n_b, entries };
        spec.validate()?;
        Ok(spec)
    }

    /// Nonzero entries of a dense vector.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        if values.len() < 2 || !values.len().is_power_of_two() {
            return Err(Error::StateLength(values.len()));
        }
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .collect();
        Self::new(values.len().trailing_zeros() as usize, entries)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_b == 0 || self.n_b >= 63 {
            return Err(Error::InvalidSparseState(format!(
                "qubit count {} out of range",
                self.n_b
            )));
        }
        if self.entries.is_empty() {
            return Err(Error::InvalidSparseState("no entries".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(i, a) in &self.entries {
            if i >> self.n_b != 0 {
                return Err(Error::InvalidSparseState(format!(
                    "index {i} needs more than {} qubits",
                    self.n_b
                )));
            }
            if !seen.insert(i) {
                return Err(Error::InvalidSparseState(format!("duplicate index {i}")));
            }
            if a == 0.0 || !a.is_finite() {
                return Err(Error::InvalidSparseState(format!(
                    "index {i} has amplitude {a}"
                )));
            }
        }
        Ok(())
    }

    pub fn w(&self) -> usize {
        self.entries.len()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, a)| a * a).sum::<f64>().sqrt()
    }

    /// Normalized dense amplitudes.
    pub fn to_dense(&self) -> Vec<f64> {
        let norm = self.norm();
        let mut v = vec![0.0; 1 << self.n_b];
        for &(i, a) in &self.entries {
            v[i] = a / norm;
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRule {
    MinHamming,
    Split,
}

/// One merge, in the coordinates after its CNOTs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    pub kept_index: usize,
    pub absorbed_index: usize,
    pub differing_bit: usize,
    pub control_set: Vec<(usize, bool)>,
    pub rotation_angle: f64,
    /// `(control, target)` pairs applied before the rotation.
    pub pre_cnots: Vec<(usize, usize)>,
    pub rule: PairRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergePlan {
    pub steps: Vec<MergeStep>,
    /// Index left after merging, cleared with X gates.
    pub final_index: usize,
}

struct Candidate {
    x1: usize,
    x2: usize,
    bit: usize,
    controls: Vec<usize>,
    rule: PairRule,
}

impl Candidate {
    fn cost(&self) -> usize {
        let d = (self.x1 ^ self.x2).count_ones() as usize;
        d - 1 + (2 << self.controls.len())
    }
}

fn bit(x: usize, b: usize) -> bool {
    (x >> b) & 1 == 1
}

fn after_cnots(x: usize, p: usize, diff: usize) -> usize {
    if bit(x, p) {
        x ^ (diff & !(1 << p))
    } else {
        x
    }
}

fn min_hamming(live: &[usize], n_b: usize) -> Candidate {
    let mut best = (usize::MAX, 0, 0);
    for (i, &a) in live.iter().enumerate() {
        for &b in &live[i + 1..] {
            let d = (a ^ b).count_ones() as usize;
            if d < best.0 {
                best = (d, a, b);
            }
        }
    }
    let (_, x1, x2) = best;
    let diff = x1 ^ x2;
    let p = diff.trailing_zeros() as usize;
    let lo = after_cnots(x1, p, diff) & !(1 << p);
    let mut pending: Vec<usize> = live
        .iter()
        .filter(|&&y| y != x1 && y != x2)
        .map(|&y| after_cnots(y, p, diff))
        .collect();
    let mut controls = Vec::new();
    while !pending.is_empty() {
        let (c, _) = (0..n_b)
            .filter(|&c| c != p && !controls.contains(&c))
            .map(|c| {
                (
                    c,
                    pending.iter().filter(|&&y| bit(y, c) != bit(lo, c)).count(),
                )
            })
            .fold(
                (usize::MAX, 0),
                |acc, (c, n)| if n > acc.1 { (c, n) } else { acc },
            );
        controls.push(c);
        pending.retain(|&y| bit(y, c) == bit(lo, c));
    }
    controls.sort_unstable();
    Candidate {
        x1,
        x2,
        bit: p,
        controls,
        rule: PairRule::MinHamming,
    }
}

/// Splits `set` on the bit whose smaller nonempty side is smallest, keeping
/// that side. Returns `(bit, kept)`.
fn split_once(set: &[usize], n_b: usize, exclude: &[usize]) -> (usize, Vec<usize>) {
    let mut best: Option<(usize, usize, bool)> = None;
    for b in (0..n_b).filter(|b| !exclude.contains(b)) {
        let ones = set.iter().filter(|&&x| bit(x, b)).count();
        let zeros = set.len() - ones;
        if ones == 0 || zeros == 0 {
            continue;
        }
        let (size, value) = if ones < zeros {
            (ones, true)
        } else {
            (zeros, false)
        };
        if best.is_none_or(|(s, _, _)| size < s) {
            best = Some((size, b, value));
        }
    }
    let (_, b, value) = best.expect("distinct indices always split");
    (
        b,
        set.iter()
            .copied()
            .filter(|&x| bit(x, b) == value)
            .collect(),
    )
}

fn split_based(live: &[usize], n_b: usize) -> Candidate {
    let mut set = live.to_vec();
    let mut bits = Vec::new();
    let mut before_last = set.clone();
    while set.len() > 1 {
        before_last = set.clone();
        let (b, kept) = split_once(&set, n_b, &[]);
        bits.push(b);
        set = kept;
    }
    let x1 = set[0];
    let p = bits.pop().expect("at least two live indices");
    let mut rest: Vec<usize> = before_last.into_iter().filter(|&x| x != x1).collect();
    let mut controls = bits;
    while rest.len() > 1 {
        let mut exclude = controls.clone();
        exclude.push(p);
        let (b, kept) = split_once(&rest, n_b, &exclude);
        controls.push(b);
        rest = kept;
    }
    controls.sort_unstable();
    Candidate {
        x1,
        x2: rest[0],
        bit: p,
        controls,
        rule: PairRule::Split,
    }
}

/// Merge plan and preparation circuit for `spec`.
pub fn sparse_merge_plan(spec: &SparseStateSpec) -> Result<(MergePlan, Circuit)> {
    spec.validate()?;
    let n_b = spec.n_b;
    let mut live: BTreeMap<usize, f64> = spec.entries.iter().copied().collect();
    let mut reverse: Vec<Gate> = Vec::new();
    let mut steps = Vec::new();
    while live.len() > 1 {
        let keys: Vec<usize> = live.keys().copied().collect();
        let a = min_hamming(&keys, n_b);
        let b = split_based(&keys, n_b);
        let limit = (usize::BITS - 1 - keys.len().leading_zeros()) as usize + 1;
        let cand = if b.cost() < a.cost() || a.controls.len() > limit {
            b
        } else {
            a
        };
        let (p, diff) = (cand.bit, cand.x1 ^ cand.x2);

        let pre_cnots: Vec<(usize, usize)> = (0..n_b)
            .filter(|&q| q != p && bit(diff, q))
            .map(|q| (p, q))
            .collect();
        for &(c, t) in &pre_cnots {
            reverse.push(Gate::Cnot {
                control: c,
                target: t,
            });
        }
        live = live
            .into_iter()
            .map(|(x, v)| (after_cnots(x, p, diff), v))
            .collect();
        let (x1, x2) = (after_cnots(cand.x1, p, diff), after_cnots(cand.x2, p, diff));
        let (lo, hi) = if bit(x1, p) { (x2, x1) } else { (x1, x2) };
        debug_assert_eq!(lo ^ hi, 1 << p);

        let control_set: Vec<(usize, bool)> =
            cand.controls.iter().map(|&c| (c, bit(lo, c))).collect();
        for &y in live.keys() {
            if y != lo && y != hi && control_set.iter().all(|&(c, v)| bit(y, c) == v) {
                return Err(Error::InvalidSparseState(format!(
                    "control set {control_set:?} fails to separate {lo}/{hi} from {y}"
                )));
            }
        }

        let (va, vb) = (live[&lo], live[&hi]);
        let phi = 2.0 * vb.atan2(va);
        let controls = control_set
            .iter()
            .map(|&(c, v)| Control {
                qubit: c,
                polarity: v,
            })
            .collect();
        reverse.push(Gate::multi_controlled(controls, Gate::Ry(p, -phi))?);
        live.remove(&hi);
        live.insert(lo, va.hypot(vb));
        steps.push(MergeStep {
            kept_index: lo,
            absorbed_index: hi,
            differing_bit: p,
            control_set,
            rotation_angle: -phi,
            pre_cnots,
            rule: cand.rule,
        });
    }
    let final_index = *live.keys().next().expect("one index remains");
    for q in (0..n_b).filter(|&q| bit(final_index, q)) {
        reverse.push(Gate::X(q));
    }
    let mut circuit = Circuit::new(n_b);
    for g in reverse.iter().rev() {
        circuit.push(g.adjoint()?)?;
    }
    Ok((MergePlan { steps, final_index }, circuit))
}

pub fn prep_sparse(spec: &SparseStateSpec) -> Result<Circuit> {
    Ok(sparse_merge_plan(spec)?.1)
}
