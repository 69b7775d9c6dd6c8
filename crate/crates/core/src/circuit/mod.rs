//! Circuit representation, exact state-vector simulation, shot sampling and
//! gate accounting.

mod census;
mod decompose;
mod gate;
mod io;
pub mod mat2;
mod sim;

pub use census::{gate_census, GateCensus};
pub use decompose::{decompose_circuit, decompose_gate, decompose_multicontrolled};
pub use gate::{Control, Gate, Unitary};
pub use io::{circuit_from_jsonl, circuit_to_jsonl};
pub(crate) use sim::sample_distribution;
pub use sim::{
    marginal_distribution, max_qubits, measure_probability, sample_shots, simulate, ShotCounts,
    StateVector, DEFAULT_MAX_QUBITS,
};

use crate::error::{Error, Result};

/// Ordered gate list over `n_qubits` qubits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_classical_bits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            n_classical_bits: 0,
            gates: Vec::new(),
        }
    }

    pub fn with_classical_bits(n_qubits: usize, n_classical_bits: usize) -> Self {
        Circuit {
            n_qubits,
            n_classical_bits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_classical_bits(&self) -> usize {
        self.n_classical_bits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate after checking its qubit indices.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        if let Gate::Measure { qubit, clbit } = gate {
            if clbit >= self.n_classical_bits {
                self.n_classical_bits = clbit + 1;
            }
            if self
                .gates
                .iter()
                .any(|g| matches!(g, Gate::Measure { qubit: q, .. } if *q == qubit))
            {
                return Err(Error::Format(format!("qubit {qubit} measured twice")));
            }
        } else if self
            .measured_qubits()
            .iter()
            .any(|q| gate.qubits().contains(q))
        {
            return Err(Error::Format(
                "gate acts on an already measured qubit".into(),
            ));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Appends `other`, mapping its qubit `j` onto `mapping[j]`.
    pub fn append_mapped(&mut self, other: &Circuit, mapping: &[usize]) -> Result<()> {
        if mapping.len() < other.n_qubits {
            return Err(Error::RegisterMismatch(format!(
                "mapping covers {} qubits, circuit has {}",
                mapping.len(),
                other.n_qubits
            )));
        }
        let map = |q: usize| mapping[q];
        for g in &other.gates {
            self.push(g.remap(&map))?;
        }
        Ok(())
    }

    /// Appends `other` with its qubits shifted up by `offset`.
    pub fn append_offset(&mut self, other: &Circuit, offset: usize) -> Result<()> {
        let mapping: Vec<usize> = (0..other.n_qubits).map(|q| q + offset).collect();
        self.append_mapped(other, &mapping)
    }

    pub fn measured_qubits(&self) -> Vec<usize> {
        self.gates
            .iter()
            .filter_map(|g| match g {
                Gate::Measure { qubit, .. } => Some(*qubit),
                _ => None,
            })
            .collect()
    }

    pub fn has_measurements(&self) -> bool {
        self.gates.iter().any(|g| matches!(g, Gate::Measure { .. }))
    }

    /// Gate-reversed, individually inverted circuit.
    pub fn adjoint(&self) -> Result<Circuit> {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(Gate::adjoint)
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            n_qubits: self.n_qubits,
            n_classical_bits: 0,
            gates,
        })
    }

    /// Every gate promoted with one extra control. The control qubit must be
    /// idle in `self`.
    pub fn controlled(&self, control: Control) -> Result<Circuit> {
        let mut out = Circuit::new(self.n_qubits.max(control.qubit + 1));
        for g in &self.gates {
            out.push(g.controlled_by(control)?)?;
        }
        Ok(out)
    }

    /// Same gates on a wider register.
    pub fn widened(&self, n_qubits: usize) -> Result<Circuit> {
        if n_qubits < self.n_qubits {
            return Err(Error::RegisterMismatch(format!(
                "cannot narrow a {}-qubit circuit to {n_qubits}",
                self.n_qubits
            )));
        }
        Ok(Circuit {
            n_qubits,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_checks_measurement_order() {
        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Measure { qubit: 0, clbit: 0 }).unwrap();
        assert_eq!(c.n_classical_bits(), 1);
        assert!(c.push(Gate::X(0)).is_err());
        assert!(c.push(Gate::Measure { qubit: 0, clbit: 1 }).is_err());
        c.push(Gate::X(1)).unwrap();
    }

    #[test]
    fn adjoint_reverses() {
        let mut c = Circuit::new(2);
        c.extend([
            Gate::T(0),
            Gate::Ry(1, 0.3),
            Gate::Cnot {
                control: 0,
                target: 1,
            },
        ])
        .unwrap();
        let a = c.adjoint().unwrap();
        assert_eq!(
            a.gates(),
            &[
                Gate::Cnot {
                    control: 0,
                    target: 1
                },
                Gate::Ry(1, -0.3),
                Gate::Tdg(0)
            ]
        );
    }
}
