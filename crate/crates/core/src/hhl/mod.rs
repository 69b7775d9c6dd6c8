//! HHL linear solver on the state-vector simulator.
//!
//! Register layout: data qubits `0..n_b`, clock qubits `n_b..n_b + n_w` (clock
//! bit `k` controls `exp(i A t 2^k)`), then one inversion ancilla. The
//! Hamiltonian evolution is an exact dense matrix from the classical
//! eigendecomposition of `A`.

mod qft;

pub use qft::{inverse_qft, qft};

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::circuit::{sample_shots, simulate, Circuit, Control, Gate, StateVector, Unitary};
use crate::error::{Error, Result};
use crate::problem::LinearSystem;

/// Minimum clock weight on `|0..0>` inside the success branch.
pub const DEFAULT_CLOCK_TOLERANCE: f64 = 1e-2;
const MIN_SUCCESS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HhlConfig {
    pub n_w: usize,
    /// Evolution time; derived from the spectrum when absent.
    pub t: Option<f64>,
    /// Inversion constant; derived from the spectrum when absent.
    pub c: Option<f64>,
    /// 0 for exact mode.
    pub shots: u64,
    pub seed: u64,
    /// Allowed clock weight outside `|0..0>` in the success branch.
    pub clock_tolerance: f64,
}

impl HhlConfig {
    pub fn new(n_w: usize) -> Self {
        HhlConfig {
            n_w,
            t: None,
            c: None,
            shots: 0,
            seed: 0,
            clock_tolerance: DEFAULT_CLOCK_TOLERANCE,
        }
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_clock_tolerance(mut self, tol: f64) -> Self {
        self.clock_tolerance = tol;
        self
    }

    pub fn with_shots(mut self, shots: u64, seed: u64) -> Self {
        self.shots = shots;
        self.seed = seed;
        self
    }

    /// Fills `t = 2 pi (1 - 2^-n_w) / lambda_max` and `C = 0.9 lambda_min`
    /// where unset, then checks `0 < C <= lambda_min` and
    /// `lambda_max t / 2 pi < 1`.
    pub fn resolved(&self, sys: &LinearSystem) -> Result<HhlConfig> {
        if self.n_w == 0 {
            return Err(Error::InvalidHhlConfig(
                "clock register needs at least one qubit".into(),
            ));
        }
        let spec = Spectrum::of(sys)?;
        let (lo, hi) = (spec.min(), spec.max());
        if lo <= 0.0 {
            return Err(Error::InvalidHhlConfig(format!(
                "matrix is not positive definite (lambda_min = {lo:.3e})"
            )));
        }
        let m = (1u64 << self.n_w) as f64;
        let t = self.t.unwrap_or(2.0 * PI * (1.0 - 1.0 / m) / hi);
        let c = self.c.unwrap_or(0.9 * lo);
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidHhlConfig(format!(
                "evolution time {t} must be positive"
            )));
        }
        if hi * t / (2.0 * PI) >= 1.0 {
            return Err(Error::InvalidHhlConfig(format!(
                "lambda_max t / 2 pi = {:.6} must be below 1",
                hi * t / (2.0 * PI)
            )));
        }
        if !(c > 0.0) || c > lo * (1.0 + 1e-12) {
            return Err(Error::InvalidHhlConfig(format!(
                "C = {c:.6e} must lie in (0, lambda_min = {lo:.6e}]"
            )));
        }
        Ok(HhlConfig {
            t: Some(t),
            c: Some(c),
            ..self.clone()
        })
    }

    fn tc(&self) -> Result<(f64, f64)> {
        match (self.t, self.c) {
            (Some(t), Some(c)) => Ok((t, c)),
            _ => Err(Error::InvalidHhlConfig(
                "t and C must be resolved before running".into(),
            )),
        }
    }
}

/// Eigendecomposition of a symmetric system matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Columns are eigenvectors.
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn of(sys: &LinearSystem) -> Result<Spectrum> {
        let a = sys.dense();
        let scale = a.amax().max(f64::MIN_POSITIVE);
        let asym = sys.matrix.max_asymmetry();
        if asym > 1e-12 * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let eig = SymmetricEigen::new(a);
        Ok(Spectrum {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `exp(i A tau)` as a unitary over the data register.
    pub fn evolution(&self, tau: f64) -> Result<Unitary> {
        let n = self.values.len();
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for (k, lam) in self.values.iter().enumerate() {
            let ph = C64::from_polar(1.0, lam * tau);
            for r in 0..n {
                let vr = self.vectors[(r, k)] * ph;
                for c in 0..n {
                    data[r * n + c] += vr * self.vectors[(c, k)];
                }
            }
        }
        Unitary::new(n, data)
    }

    /// `sum_i lambda_i^{-1} (u_i . b) u_i`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut x = vec![0.0; n];
        for (k, lam) in self.values.iter().enumerate() {
            let coef: f64 = (0..n).map(|r| self.vectors[(r, k)] * b[r]).sum::<f64>() / lam;
            for (r, xr) in x.iter_mut().enumerate() {
                *xr += coef * self.vectors[(r, k)];
            }
        }
        x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HhlLayout {
    pub n_b: usize,
    pub n_w: usize,
}

impl HhlLayout {
    pub fn clock(&self) -> Vec<usize> {
        (self.n_b..self.n_b + self.n_w).collect()
    }

    pub fn ancilla(&self) -> usize {
        self.n_b + self.n_w
    }

    pub fn n_qubits(&self) -> usize {
        self.n_b + self.n_w + 1
    }

    /// Qubit/value pairs selecting ancilla = 1 and clock = 0.
    pub fn postselection(&self) -> Vec<(usize, bool)> {
        let mut p = vec![(self.ancilla(), true)];
        p.extend(self.clock().into_iter().map(|q| (q, false)));
        p
    }
}

fn phase_estimation(spec: &Spectrum, layout: HhlLayout, t: f64) -> Result<Vec<Gate>> {
    let data: Vec<usize> = (0..layout.n_b).collect();
    let clock = layout.clock();
    let mut gates: Vec<Gate> = clock.iter().map(|&q| Gate::H(q)).collect();
    for (k, &q) in clock.iter().enumerate() {
        let u = spec.evolution(t * (1u64 << k) as f64)?;
        gates.push(Gate::MultiControlled {
            controls: vec![Control::on(q)],
            inner: Box::new(Gate::Matrix {
                qubits: data.clone(),
                unitary: u,
            }),
        });
    }
    gates.extend(inverse_qft(&clock));
    Ok(gates)
}

/// Ancilla angles `2 asin(min(1, C / lambda~_y))` per clock value `y`, with
/// `lambda~_y = 2 pi y / (2^n_w t)` and no rotation at `y = 0`.
pub fn inversion_angles(n_w: usize, t: f64, c: f64) -> Vec<f64> {
    let m = 1usize << n_w;
    (0..m)
        .map(|y| {
            if y == 0 {
                0.0
            } else {
                let lam = 2.0 * PI * y as f64 / (m as f64 * t);
                2.0 * (c / lam).min(1.0).asin()
            }
        })
        .collect()
}

/// Full HHL circuit; `cfg` is resolved against `sys` first.
pub fn build_hhl_circuit(sys: &LinearSystem, prep: &Circuit, cfg: &HhlConfig) -> Result<Circuit> {
    let cfg = cfg.resolved(sys)?;
    let (t, c) = cfg.tc()?;
    if prep.n_qubits() != sys.n_b {
        return Err(Error::RegisterMismatch(format!(
            "prep acts on {} qubits, system needs {}",
            prep.n_qubits(),
            sys.n_b
        )));
    }
    let layout = HhlLayout {
        n_b: sys.n_b,
        n_w: cfg.n_w,
    };
    let spec = Spectrum::of(sys)?;
    let qpe = phase_estimation(&spec, layout, t)?;
    let mut circuit = Circuit::new(layout.n_qubits());
    circuit.append_offset(prep, 0)?;
    circuit.extend(qpe.iter().cloned())?;
    circuit.push(Gate::UniformlyControlledRy {
        controls: layout.clock(),
        target: layout.ancilla(),
        angles: inversion_angles(cfg.n_w, t, c),
    })?;
    for g in qpe.iter().rev() {
        circuit.push(g.adjoint()?)?;
    }
    Ok(circuit)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HhlOutcome {
    /// Data register after postselecting ancilla = 1 and clock = 0.
    pub solution_state: StateVector,
    /// `P(ancilla = 1)`.
    pub success_probability: f64,
    /// `P(ancilla = 1, clock = 0)`.
    pub postselected_probability: f64,
    /// Clock weight on `|0..0>` within the success branch.
    pub clock_zero_weight: f64,
    pub recovered_norm: Option<f64>,
    pub n_w_used: usize,
    pub t: f64,
    pub c: f64,
    /// Observed success frequency in shot mode.
    pub shot_success_frequency: Option<f64>,
}

/// Simulates an HHL circuit. Set `cfg.clock_tolerance` to 1 to skip the
/// clock check.
pub fn run_hhl(circuit: &Circuit, n_b: usize, cfg: &HhlConfig) -> Result<HhlOutcome> {
    let (t, c) = cfg.tc()?;
    let layout = HhlLayout { n_b, n_w: cfg.n_w };
    if circuit.n_qubits() != layout.n_qubits() {
        return Err(Error::RegisterMismatch(format!(
            "circuit has {} qubits, layout needs {}",
            circuit.n_qubits(),
            layout.n_qubits()
        )));
    }
    let state = simulate(circuit, None)?;
    let amps = state.amplitudes();
    let anc_bit = 1usize << layout.ancilla();
    let success: f64 = amps
        .iter()
        .enumerate()
        .filter(|(i, _)| i & anc_bit != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if success < MIN_SUCCESS {
        return Err(Error::DegenerateHhl(success));
    }
    let branch: Vec<C64> = (0..1usize << n_b).map(|d| amps[anc_bit | d]).collect();
    let post: f64 = branch.iter().map(|a| a.norm_sqr()).sum();
    let weight = post / success;
    if weight < 1.0 - cfg.clock_tolerance {
        return Err(Error::ClockResidual {
            weight,
            required: 1.0 - cfg.clock_tolerance,
        });
    }
    if post < MIN_SUCCESS {
        return Err(Error::DegenerateHhl(post));
    }
    let scale = 1.0 / post.sqrt();
    let solution_state = StateVector::from_amplitudes(branch.iter().map(|a| a * scale).collect())?;
    let shot_success_frequency = if cfg.shots > 0 {
        let counts = sample_shots(&state, &[layout.ancilla()], cfg.shots, cfg.seed)?;
        Some(counts.count_matching(&[(0, true)]) as f64 / cfg.shots as f64)
    } else {
        None
    };
    Ok(HhlOutcome {
        solution_state,
        success_probability: success,
        postselected_probability: post,
        clock_zero_weight: weight,
        recovered_norm: None,
        n_w_used: cfg.n_w,
        t,
        c,
        shot_success_frequency,
    })
}

/// `||A^{-1} b||` from the postselected branch weight:
/// `sqrt(P(ancilla = 1, clock = 0)) / C * ||b||`.
pub fn estimate_solution_norm(outcome: &HhlOutcome, b_norm: f64) -> f64 {
    outcome.postselected_probability.sqrt() / outcome.c * b_norm
}

/// Prepares `b` with `prep`, runs HHL and fills in the recovered norm.
pub fn solve_hhl(sys: &LinearSystem, prep: &Circuit, cfg: &HhlConfig) -> Result<HhlOutcome> {
    let cfg = cfg.resolved(sys)?;
    let circuit = build_hhl_circuit(sys, prep, &cfg)?;
    let mut out = run_hhl(&circuit, sys.n_b, &cfg)?;
    out.recovered_norm = Some(estimate_solution_norm(&out, sys.rhs_norm()));
    Ok(out)
}

/// Serializable summary of a solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HhlReport {
    pub success_probability: f64,
    pub postselected_probability: f64,
    pub clock_zero_weight: f64,
    pub recovered_norm: Option<f64>,
    pub fidelity_vs_oracle: Option<f64>,
    pub n_w: usize,
    pub t: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shot_success_frequency: Option<f64>,
}

impl HhlReport {
    pub fn new(outcome: &HhlOutcome, oracle: Option<&[f64]>) -> Result<Self> {
        let fidelity_vs_oracle = match oracle {
            Some(x) => Some(outcome.solution_state.fidelity(&StateVector::from_real(x)?)),
            None => None,
        };
        Ok(HhlReport {
            success_probability: outcome.success_probability,
            postselected_probability: outcome.postselected_probability,
            clock_zero_weight: outcome.clock_zero_weight,
            recovered_norm: outcome.recovered_norm,
            fidelity_vs_oracle,
            n_w: outcome.n_w_used,
            t: outcome.t,
            c: outcome.c,
            shot_success_frequency: outcome.shot_success_frequency,
        })
    }
}

#[cfg(test)]
mod tests;
