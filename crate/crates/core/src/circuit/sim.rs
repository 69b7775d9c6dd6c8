use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::mat2::{self, Mat2};
use super::{Circuit, Gate};
use crate::error::{Error, Result};

/// Hard cap on simulated register width unless overridden by
/// `FRACFLOWQ_MAX_QUBITS`.
pub const DEFAULT_MAX_QUBITS: usize = 26;

const NORM_TOLERANCE: f64 = 1e-10;
const PARALLEL_THRESHOLD: usize = 1 << 14;

pub fn max_qubits() -> usize {
    std::env::var("FRACFLOWQ_MAX_QUBITS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

/// Dense register state; amplitude index bit `k` is qubit `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::StateLength(amps.len()));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        let s = StateVector { n_qubits, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Normalizes a real vector into a state.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::StateLength(values.len()));
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        let amps = values.iter().map(|v| C64::new(v / norm, 0.0)).collect();
        Ok(StateVector {
            n_qubits: values.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// <self|other>
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |<self|other>|^2
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.re).collect()
    }

    fn apply(&mut self, op: &Op, scratch: &mut Vec<C64>) {
        scratch.resize(self.amps.len(), C64::new(0.0, 0.0));
        let src = &self.amps;
        if src.len() >= PARALLEL_THRESHOLD {
            scratch
                .par_iter_mut()
                .enumerate()
                .for_each(|(i, out)| *out = op.amplitude(i, src));
        } else {
            for (i, out) in scratch.iter_mut().enumerate() {
                *out = op.amplitude(i, src);
            }
        }
        std::mem::swap(&mut self.amps, scratch);
    }
}

enum Kernel {
    One {
        bit: usize,
        m: Mat2,
    },
    Swap {
        a: usize,
        b: usize,
    },
    Dense {
        row_bits: Vec<usize>,
        offsets: Vec<usize>,
        clear: usize,
        dim: usize,
        u: Vec<C64>,
    },
    Ucry {
        control_bits: Vec<usize>,
        bit: usize,
        cos_sin: Vec<(f64, f64)>,
    },
}

struct Op {
    kernel: Kernel,
    mask: usize,
    value: usize,
}

fn gather_bits(i: usize, bits: &[usize]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (j, &b)| acc | (((i >> b) & 1) << j))
}

impl Op {
    fn compile(gate: &Gate) -> Result<Op> {
        let plain = |kernel| {
            Ok(Op {
                kernel,
                mask: 0,
                value: 0,
            })
        };
        if let Some((q, m)) = gate.single_qubit_matrix() {
            return plain(Kernel::One { bit: q, m });
        }
        match gate {
            Gate::Cnot { control, target } => Ok(Op {
                kernel: Kernel::One {
                    bit: *target,
                    m: mat2::pauli_x(),
                },
                mask: 1 << control,
                value: 1 << control,
            }),
            Gate::Swap(a, b) => plain(Kernel::Swap { a: *a, b: *b }),
            Gate::ControlledSwap { control, a, b } => Ok(Op {
                kernel: Kernel::Swap { a: *a, b: *b },
                mask: 1 << control,
                value: 1 << control,
            }),
            Gate::MultiControlled { controls, inner } => {
                let mut op = Op::compile(inner)?;
                for c in controls {
                    op.mask |= 1 << c.qubit;
                    if c.polarity {
                        op.value |= 1 << c.qubit;
                    }
                }
                Ok(op)
            }
            Gate::UniformlyControlledRy {
                controls,
                target,
                angles,
            } => plain(Kernel::Ucry {
                control_bits: controls.clone(),
                bit: *target,
                cos_sin: angles
                    .iter()
                    .map(|a| ((a / 2.0).cos(), (a / 2.0).sin()))
                    .collect(),
            }),
            Gate::Matrix { qubits, unitary } => {
                let dim = unitary.dim();
                let offsets = (0..dim)
                    .map(|c| {
                        qubits
                            .iter()
                            .enumerate()
                            .fold(0, |acc, (j, &q)| acc | (((c >> j) & 1) << q))
                    })
                    .collect();
                let clear = qubits.iter().fold(0, |acc, &q| acc | (1 << q));
                plain(Kernel::Dense {
                    row_bits: qubits.clone(),
                    offsets,
                    clear,
                    dim,
                    u: unitary.data().to_vec(),
                })
            }
            Gate::Measure { .. } => Err(Error::MeasurementInCircuit),
            _ => unreachable!("single-qubit gates handled above"),
        }
    }

    #[inline]
    fn amplitude(&self, i: usize, src: &[C64]) -> C64 {
        if i & self.mask != self.value {
            return src[i];
        }
        match &self.kernel {
            Kernel::One { bit, m } => {
                let b = (i >> bit) & 1;
                let i0 = i & !(1 << bit);
                let i1 = i | (1 << bit);
                m[b][0] * src[i0] + m[b][1] * src[i1]
            }
            Kernel::Swap { a, b } => {
                if ((i >> a) ^ (i >> b)) & 1 == 0 {
                    src[i]
                } else {
                    src[i ^ (1 << a) ^ (1 << b)]
                }
            }
            Kernel::Dense {
                row_bits,
                offsets,
                clear,
                dim,
                u,
            } => {
                let r = gather_bits(i, row_bits);
                let base = i & !clear;
                let row = &u[r * dim..(r + 1) * dim];
                row.iter()
                    .zip(offsets)
                    .map(|(x, &o)| x * src[base | o])
                    .sum()
            }
            Kernel::Ucry {
                control_bits,
                bit,
                cos_sin,
            } => {
                let (c, s) = cos_sin[gather_bits(i, control_bits)];
                let i0 = i & !(1 << bit);
                let i1 = i | (1 << bit);
                if (i >> bit) & 1 == 0 {
                    src[i0] * c - src[i1] * s
                } else {
                    src[i0] * s + src[i1] * c
                }
            }
        }
    }
}

/// Applies the circuit to `initial` (or |0..0>) exactly.
pub fn simulate(circuit: &Circuit, initial: Option<&StateVector>) -> Result<StateVector> {
    let n = circuit.n_qubits();
    let cap = max_qubits();
    if n > cap {
        return Err(Error::QubitCap { n_qubits: n, cap });
    }
    let mut state = match initial {
        Some(s) if s.n_qubits() != n => {
            return Err(Error::RegisterMismatch(format!(
                "initial state has {} qubits, circuit has {n}",
                s.n_qubits()
            )))
        }
        Some(s) => s.clone(),
        None => StateVector::zero(n),
    };
    let ops = circuit
        .gates()
        .iter()
        .map(Op::compile)
        .collect::<Result<Vec<_>>>()?;
    let mut scratch = Vec::with_capacity(state.amps.len());
    for op in &ops {
        state.apply(op, &mut scratch);
    }
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    Ok(state)
}

fn check_qubit(state: &StateVector, qubit: usize) -> Result<()> {
    if qubit >= state.n_qubits() {
        return Err(Error::QubitOutOfRange {
            qubit,
            n_qubits: state.n_qubits(),
        });
    }
    Ok(())
}

/// Exact probability that `qubit` reads `outcome`.
pub fn measure_probability(state: &StateVector, qubit: usize, outcome: u8) -> Result<f64> {
    check_qubit(state, qubit)?;
    let want = usize::from(outcome != 0);
    let p = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| (i >> qubit) & 1 == want)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>();
    Ok(p.clamp(0.0, 1.0))
}

/// Joint outcome distribution of `qubits`; entry bit `j` is `qubits[j]`.
pub fn marginal_distribution(state: &StateVector, qubits: &[usize]) -> Result<Vec<f64>> {
    for &q in qubits {
        check_qubit(state, q)?;
    }
    let mut dist = vec![0.0; 1 << qubits.len()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        dist[gather_bits(i, qubits)] += a.norm_sqr();
    }
    Ok(dist)
}

/// Shot histogram over measured qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct ShotCounts {
    /// Measured qubits; histogram index bit `j` is `qubits[j]`.
    pub qubits: Vec<usize>,
    pub histogram: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
}

impl ShotCounts {
    /// Counts keyed by bit string, `qubits[0]` rightmost.
    pub fn to_map(&self) -> BTreeMap<String, u64> {
        let k = self.qubits.len();
        self.histogram
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(idx, &c)| {
                let s: String = (0..k)
                    .rev()
                    .map(|j| if (idx >> j) & 1 == 1 { '1' } else { '0' })
                    .collect();
                (s, c)
            })
            .collect()
    }

    /// Shots where every `(position, value)` pair matches; positions index
    /// into `qubits`.
    pub fn count_matching(&self, conditions: &[(usize, bool)]) -> u64 {
        self.histogram
            .iter()
            .enumerate()
            .filter(|(idx, _)| {
                conditions
                    .iter()
                    .all(|&(pos, v)| ((idx >> pos) & 1 == 1) == v)
            })
            .map(|(_, &c)| c)
            .sum()
    }
}

/// Draws `shots` i.i.d. samples of the measured qubits from the exact
/// distribution. Deterministic for a given seed.
pub fn sample_shots(
    state: &StateVector,
    measured_qubits: &[usize],
    shots: u64,
    seed: u64,
) -> Result<ShotCounts> {
    let dist = marginal_distribution(state, measured_qubits)?;
    Ok(sample_distribution(&dist, measured_qubits, shots, seed))
}

pub(crate) fn sample_distribution(
    dist: &[f64],
    qubits: &[usize],
    shots: u64,
    seed: u64,
) -> ShotCounts {
    let mut cdf = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for p in dist {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut histogram = vec![0u64; dist.len()];
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(dist.len() - 1);
        histogram[idx] += 1;
    }
    ShotCounts {
        qubits: qubits.to_vec(),
        histogram,
        shots,
        seed,
    }
}
