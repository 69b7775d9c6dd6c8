//! Swap-test and Hadamard-test circuits.
//!
//! Qubit layout: the state source occupies `0..s` (its data register is
//! `0..n_b`), the r-register `s..s + n_b`, and the test ancilla `s + n_b`.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Control, Gate};
use crate::error::{Error, Result};
use crate::hhl::HhlLayout;
use crate::prep::{prep_registry, select_prep};

/// Circuit producing `|x>` on its low `n_data` qubits, possibly only after
/// postselecting other qubits (e.g. an HHL ancilla and clock).
#[derive(Clone, Debug, PartialEq)]
pub struct StateSource {
    pub circuit: Circuit,
    pub n_data: usize,
    /// `(qubit, value)` conditions that flag success.
    pub postselect: Vec<(usize, bool)>,
}

impl StateSource {
    pub fn plain(circuit: Circuit) -> Self {
        let n_data = circuit.n_qubits();
        StateSource {
            circuit,
            n_data,
            postselect: Vec::new(),
        }
    }

    /// HHL circuit with its ancilla = 1, clock = 0 success flags.
    pub fn hhl(circuit: Circuit, layout: HhlLayout) -> Result<Self> {
        if circuit.n_qubits() != layout.n_qubits() {
            return Err(Error::RegisterMismatch(format!(
                "circuit has {} qubits, layout needs {}",
                circuit.n_qubits(),
                layout.n_qubits()
            )));
        }
        Ok(StateSource {
            circuit,
            n_data: layout.n_b,
            postselect: layout.postselection(),
        })
    }

    /// Prepares a given real vector directly, bypassing the solver.
    pub fn injected(x: &[f64]) -> Result<Self> {
        let registry = prep_registry();
        let circuit = select_prep(&registry, "auto", x)?.prepare(x)?;
        Ok(StateSource::plain(circuit))
    }

    fn check(&self, r: &Circuit) -> Result<()> {
        if r.n_qubits() != self.n_data {
            return Err(Error::RegisterMismatch(format!(
                "r-register has {} qubits, x-register {}",
                r.n_qubits(),
                self.n_data
            )));
        }
        if let Some(&(q, _)) = self.postselect.iter().find(|(q, _)| *q < self.n_data) {
            return Err(Error::RegisterMismatch(format!(
                "postselected qubit {q} lies in the data register"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMode {
    Swap,
    Hadamard,
}

/// A built overlap test.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapCircuit {
    /// Unitary part, without the final measurements.
    pub circuit: Circuit,
    pub ancilla: usize,
    pub postselect: Vec<(usize, bool)>,
    pub mode: TestMode,
}

impl OverlapCircuit {
    /// Qubits added on top of the source circuit.
    pub fn extra_qubits(&self, source: &StateSource) -> usize {
        self.circuit.n_qubits() - source.circuit.n_qubits()
    }

    /// The circuit with the ancilla and postselection flags measured.
    pub fn measured(&self) -> Result<Circuit> {
        let mut c = self.circuit.clone();
        c.push(Gate::Measure {
            qubit: self.ancilla,
            clbit: 0,
        })?;
        for (k, &(q, _)) in self.postselect.iter().enumerate() {
            c.push(Gate::Measure {
                qubit: q,
                clbit: k + 1,
            })?;
        }
        Ok(c)
    }
}

fn layout(source: &StateSource) -> (usize, usize, usize) {
    let s = source.circuit.n_qubits();
    let n_b = source.n_data;
    (s, s + n_b, s + n_b + 1)
}

/// H, controlled swaps of the x and r registers, H. With `|r>` fixed,
/// `P(ancilla = 0 | postselected) = (1 + |<r|x>|^2) / 2`.
pub fn build_swap_test(source: &StateSource, r_circuit: &Circuit) -> Result<OverlapCircuit> {
    source.check(r_circuit)?;
    let (r0, anc, n) = layout(source);
    let mut c = Circuit::new(n);
    c.append_offset(&source.circuit, 0)?;
    c.append_offset(r_circuit, r0)?;
    c.push(Gate::H(anc))?;
    for j in 0..source.n_data {
        c.push(Gate::ControlledSwap {
            control: anc,
            a: j,
            b: r0 + j,
        })?;
    }
    c.push(Gate::H(anc))?;
    Ok(OverlapCircuit {
        circuit: c,
        ancilla: anc,
        postselect: source.postselect.clone(),
        mode: TestMode::Swap,
    })
}

/// Hadamard test for `Re<r|x>`.
///
/// The ancilla-1 branch runs the source and swaps its data into the
/// r-register; the ancilla-0 branch prepares `|r>` there (negative control)
/// and raises any success flags so both branches share the same flag state.
/// Without postselection `P(ancilla = 0) = (1 + Re<r|x>) / 2`.
pub fn build_hadamard_test(source: &StateSource, r_circuit: &Circuit) -> Result<OverlapCircuit> {
    source.check(r_circuit)?;
    let (r0, anc, n) = layout(source);
    let mut c = Circuit::new(n);
    c.push(Gate::H(anc))?;
    for g in source.circuit.gates() {
        c.push(g.controlled_by(Control::on(anc))?)?;
    }
    for j in 0..source.n_data {
        c.push(Gate::ControlledSwap {
            control: anc,
            a: j,
            b: r0 + j,
        })?;
    }
    for g in r_circuit.gates() {
        let shifted = g.remap(&|q| q + r0);
        let controlled = shifted.controlled_by(Control::off(anc)).map_err(|_| {
            Error::NotControllable(format!(
                "r-register gate {} cannot take a control",
                g.name()
            ))
        })?;
        c.push(controlled)?;
    }
    for &(q, value) in &source.postselect {
        if value {
            c.push(Gate::X(q).controlled_by(Control::off(anc))?)?;
        }
    }
    c.push(Gate::H(anc))?;
    Ok(OverlapCircuit {
        circuit: c,
        ancilla: anc,
        postselect: source.postselect.clone(),
        mode: TestMode::Hadamard,
    })
}
