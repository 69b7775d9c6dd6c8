//! JSON-lines circuit format.
//!
//! The first line is a header `{"n_qubits": n, "n_classical_bits": m}`; every
//! following line is one gate `{"name", "qubits", "params"}`. Multi-controlled
//! gates add `"controls": [[qubit, polarity], ...]` and an `"inner"` gate
//! record. Dense matrices store `params` as interleaved real/imaginary parts in
//! row-major order.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{Circuit, Control, Gate, Unitary};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Header {
    n_qubits: usize,
    n_classical_bits: usize,
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    name: String,
    qubits: Vec<usize>,
    #[serde(default)]
    params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    controls: Option<Vec<(usize, bool)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner: Option<Box<GateRecord>>,
}

impl GateRecord {
    fn plain(name: &str, qubits: Vec<usize>, params: Vec<f64>) -> Self {
        GateRecord {
            name: name.to_string(),
            qubits,
            params,
            controls: None,
            inner: None,
        }
    }

    fn from_gate(g: &Gate) -> Self {
        let name = g.name();
        match g {
            Gate::Ry(_, a) | Gate::Rz(_, a) | Gate::Phase(_, a) => {
                GateRecord::plain(name, g.qubits(), vec![*a])
            }
            Gate::MultiControlled { controls, inner } => GateRecord {
                name: name.to_string(),
                qubits: vec![],
                params: vec![],
                controls: Some(controls.iter().map(|c| (c.qubit, c.polarity)).collect()),
                inner: Some(Box::new(GateRecord::from_gate(inner))),
            },
            Gate::UniformlyControlledRy { angles, .. } => {
                GateRecord::plain(name, g.qubits(), angles.clone())
            }
            Gate::Matrix { qubits, unitary } => GateRecord::plain(
                name,
                qubits.clone(),
                unitary.data().iter().flat_map(|c| [c.re, c.im]).collect(),
            ),
            Gate::Measure { qubit, clbit } => {
                GateRecord::plain(name, vec![*qubit], vec![*clbit as f64])
            }
            _ => GateRecord::plain(name, g.qubits(), vec![]),
        }
    }

    fn into_gate(self) -> Result<Gate> {
        let q = &self.qubits;
        let need = |n: usize| -> Result<()> {
            if q.len() == n {
                Ok(())
            } else {
                Err(Error::Format(format!(
                    "'{}' expects {n} qubits, got {}",
                    self.name,
                    q.len()
                )))
            }
        };
        let param = |i: usize| -> Result<f64> {
            self.params
                .get(i)
                .copied()
                .ok_or_else(|| Error::Format(format!("'{}' is missing parameter {i}", self.name)))
        };
        Ok(match self.name.as_str() {
            "x" => {
                need(1)?;
                Gate::X(q[0])
            }
            "h" => {
                need(1)?;
                Gate::H(q[0])
            }
            "t" => {
                need(1)?;
                Gate::T(q[0])
            }
            "tdg" => {
                need(1)?;
                Gate::Tdg(q[0])
            }
            "ry" => {
                need(1)?;
                Gate::Ry(q[0], param(0)?)
            }
            "rz" => {
                need(1)?;
                Gate::Rz(q[0], param(0)?)
            }
            "p" => {
                need(1)?;
                Gate::Phase(q[0], param(0)?)
            }
            "cx" => {
                need(2)?;
                Gate::Cnot {
                    control: q[0],
                    target: q[1],
                }
            }
            "swap" => {
                need(2)?;
                Gate::Swap(q[0], q[1])
            }
            "cswap" => {
                need(3)?;
                Gate::ControlledSwap {
                    control: q[0],
                    a: q[1],
                    b: q[2],
                }
            }
            "measure" => {
                need(1)?;
                Gate::Measure {
                    qubit: q[0],
                    clbit: param(0)? as usize,
                }
            }
            "ucry" => {
                if q.is_empty() {
                    return Err(Error::Format("'ucry' needs a target".into()));
                }
                let (controls, target) = q.split_at(q.len() - 1);
                Gate::UniformlyControlledRy {
                    controls: controls.to_vec(),
                    target: target[0],
                    angles: self.params.clone(),
                }
            }
            "unitary" => {
                let dim = 1usize << q.len();
                if self.params.len() != 2 * dim * dim {
                    return Err(Error::MatrixShape {
                        got: self.params.len() / 2,
                        expected: dim * dim,
                    });
                }
                let data = self
                    .params
                    .chunks(2)
                    .map(|c| C64::new(c[0], c[1]))
                    .collect();
                Gate::Matrix {
                    qubits: q.clone(),
                    unitary: Unitary::new(dim, data)?,
                }
            }
            "mc" => {
                let controls = self
                    .controls
                    .ok_or_else(|| Error::Format("'mc' needs controls".into()))?
                    .into_iter()
                    .map(|(qubit, polarity)| Control { qubit, polarity })
                    .collect();
                let inner = self
                    .inner
                    .ok_or_else(|| Error::Format("'mc' needs an inner gate".into()))?;
                Gate::MultiControlled {
                    controls,
                    inner: Box::new(inner.into_gate()?),
                }
            }
            other => return Err(Error::Format(format!("unknown gate '{other}'"))),
        })
    }
}

pub fn circuit_to_jsonl(circuit: &Circuit) -> String {
    let mut out = String::new();
    let header = Header {
        n_qubits: circuit.n_qubits(),
        n_classical_bits: circuit.n_classical_bits(),
    };
    out.push_str(&serde_json::to_string(&header).expect("header serializes"));
    out.push('\n');
    for g in circuit.gates() {
        out.push_str(&serde_json::to_string(&GateRecord::from_gate(g)).expect("gate serializes"));
        out.push('\n');
    }
    out
}

pub fn circuit_from_jsonl(text: &str) -> Result<Circuit> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Header = serde_json::from_str(
        lines
            .next()
            .ok_or_else(|| Error::Format("empty circuit file".into()))?,
    )?;
    let mut circuit = Circuit::with_classical_bits(header.n_qubits, header.n_classical_bits);
    for line in lines {
        let rec: GateRecord = serde_json::from_str(line)?;
        circuit.push(rec.into_gate()?)?;
    }
    Ok(circuit)
}
