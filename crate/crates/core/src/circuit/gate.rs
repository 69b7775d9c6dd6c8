use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::mat2::{self, Mat2};
use crate::error::{Error, Result};

/// A control qubit and the value it must hold for the gate to fire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Control {
    pub qubit: usize,
    pub polarity: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Control {
            qubit,
            polarity: true,
        }
    }

    pub fn off(qubit: usize) -> Self {
        Control {
            qubit,
            polarity: false,
        }
    }
}

/// Dense unitary acting on an ordered list of qubits.
///
/// Row-major, `dim x dim` with `dim = 2^k`. Local basis index bit `j`
/// corresponds to the `j`-th qubit of the owning gate.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    dim: usize,
    data: Vec<C64>,
}

impl Unitary {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim || !dim.is_power_of_two() {
            return Err(Error::MatrixShape {
                got: data.len(),
                expected: dim * dim,
            });
        }
        let u = Unitary { dim, data };
        let dev = u.unitarity_deviation();
        if dev > Self::TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        Unitary { dim: n, data }
    }

    /// max |U U^dagger - I|
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.data[i * n + k] * self.data[j * n + k].conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    pub fn from_mat2(m: &Mat2) -> Self {
        Unitary {
            dim: 2,
            data: vec![m[0][0], m[0][1], m[1][0], m[1][1]],
        }
    }

    pub fn as_mat2(&self) -> Option<Mat2> {
        (self.dim == 2).then(|| [[self.data[0], self.data[1]], [self.data[2], self.data[3]]])
    }
}

/// Gate library shared by synthesis, HHL and readout.
///
/// Qubit 0 is the least-significant bit of a basis-state index.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    T(usize),
    Tdg(usize),
    Ry(usize, f64),
    Rz(usize, f64),
    /// diag(1, e^{i phi})
    Phase(usize, f64),
    Cnot {
        control: usize,
        target: usize,
    },
    Swap(usize, usize),
    ControlledSwap {
        control: usize,
        a: usize,
        b: usize,
    },
    MultiControlled {
        controls: Vec<Control>,
        inner: Box<Gate>,
    },
    /// Ry on `target` whose angle is `angles[v]`, where `v` packs the control
    /// values with `controls[j]` as bit `j`.
    UniformlyControlledRy {
        controls: Vec<usize>,
        target: usize,
        angles: Vec<f64>,
    },
    Matrix {
        qubits: Vec<usize>,
        unitary: Unitary,
    },
    Measure {
        qubit: usize,
        clbit: usize,
    },
}

impl Gate {
    /// Every qubit the gate touches, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X(q) | Gate::H(q) | Gate::T(q) | Gate::Tdg(q) => vec![*q],
            Gate::Ry(q, _) | Gate::Rz(q, _) | Gate::Phase(q, _) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Swap(a, b) => vec![*a, *b],
            Gate::ControlledSwap { control, a, b } => vec![*control, *a, *b],
            Gate::MultiControlled { controls, inner } => {
                let mut qs: Vec<usize> = controls.iter().map(|c| c.qubit).collect();
                qs.extend(inner.qubits());
                qs
            }
            Gate::UniformlyControlledRy {
                controls, target, ..
            } => {
                let mut qs = controls.clone();
                qs.push(*target);
                qs
            }
            Gate::Matrix { qubits, .. } => qubits.clone(),
            Gate::Measure { qubit, .. } => vec![*qubit],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "x",
            Gate::H(_) => "h",
            Gate::T(_) => "t",
            Gate::Tdg(_) => "tdg",
            Gate::Ry(..) => "ry",
            Gate::Rz(..) => "rz",
            Gate::Phase(..) => "p",
            Gate::Cnot { .. } => "cx",
            Gate::Swap(..) => "swap",
            Gate::ControlledSwap { .. } => "cswap",
            Gate::MultiControlled { .. } => "mc",
            Gate::UniformlyControlledRy { .. } => "ucry",
            Gate::Matrix { .. } => "unitary",
            Gate::Measure { .. } => "measure",
        }
    }

    /// Target qubit and matrix for single-qubit gates.
    pub fn single_qubit_matrix(&self) -> Option<(usize, Mat2)> {
        use std::f64::consts::FRAC_PI_4;
        Some(match self {
            Gate::X(q) => (*q, mat2::pauli_x()),
            Gate::H(q) => (*q, mat2::hadamard()),
            Gate::T(q) => (*q, mat2::phase(FRAC_PI_4)),
            Gate::Tdg(q) => (*q, mat2::phase(-FRAC_PI_4)),
            Gate::Ry(q, th) => (*q, mat2::ry(*th)),
            Gate::Rz(q, th) => (*q, mat2::rz(*th)),
            Gate::Phase(q, phi) => (*q, mat2::phase(*phi)),
            Gate::Matrix { qubits, unitary } if qubits.len() == 1 => {
                (qubits[0], unitary.as_mat2()?)
            }
            _ => return None,
        })
    }

    pub fn is_single_qubit(&self) -> bool {
        self.single_qubit_matrix().is_some()
    }

    pub fn adjoint(&self) -> Result<Gate> {
        Ok(match self {
            Gate::T(q) => Gate::Tdg(*q),
            Gate::Tdg(q) => Gate::T(*q),
            Gate::Ry(q, th) => Gate::Ry(*q, -th),
            Gate::Rz(q, th) => Gate::Rz(*q, -th),
            Gate::Phase(q, phi) => Gate::Phase(*q, -phi),
            Gate::MultiControlled { controls, inner } => Gate::MultiControlled {
                controls: controls.clone(),
                inner: Box::new(inner.adjoint()?),
            },
            Gate::UniformlyControlledRy {
                controls,
                target,
                angles,
            } => Gate::UniformlyControlledRy {
                controls: controls.clone(),
                target: *target,
                angles: angles.iter().map(|a| -a).collect(),
            },
            Gate::Matrix { qubits, unitary } => Gate::Matrix {
                qubits: qubits.clone(),
                unitary: unitary.adjoint(),
            },
            Gate::Measure { .. } => {
                return Err(Error::NotControllable("measurement has no adjoint".into()))
            }
            g => g.clone(),
        })
    }

    /// Builds a multi-controlled gate, flattening nested controls so the inner
    /// gate never carries controls of its own.
    pub fn multi_controlled(controls: Vec<Control>, inner: Gate) -> Result<Gate> {
        let mut controls = controls;
        let inner = match inner {
            Gate::MultiControlled {
                controls: more,
                inner,
            } => {
                controls.extend(more);
                *inner
            }
            Gate::Cnot { control, target } => {
                controls.push(Control::on(control));
                Gate::X(target)
            }
            Gate::ControlledSwap { control, a, b } => {
                controls.push(Control::on(control));
                Gate::Swap(a, b)
            }
            Gate::Measure { .. } => {
                return Err(Error::NotControllable("measurement".into()));
            }
            g => g,
        };
        if controls.is_empty() {
            return Ok(inner);
        }
        if controls.len() == 1 && controls[0].polarity {
            match inner {
                Gate::X(t) => {
                    return Ok(Gate::Cnot {
                        control: controls[0].qubit,
                        target: t,
                    })
                }
                Gate::Swap(a, b) => {
                    return Ok(Gate::ControlledSwap {
                        control: controls[0].qubit,
                        a,
                        b,
                    })
                }
                _ => {}
            }
        }
        Ok(Gate::MultiControlled {
            controls,
            inner: Box::new(inner),
        })
    }

    /// This gate with one extra control.
    pub fn controlled_by(&self, control: Control) -> Result<Gate> {
        Gate::multi_controlled(vec![control], self.clone())
    }

    /// Same gate with every qubit index mapped through `map`.
    pub fn remap(&self, map: &dyn Fn(usize) -> usize) -> Gate {
        match self {
            Gate::X(q) => Gate::X(map(*q)),
            Gate::H(q) => Gate::H(map(*q)),
            Gate::T(q) => Gate::T(map(*q)),
            Gate::Tdg(q) => Gate::Tdg(map(*q)),
            Gate::Ry(q, a) => Gate::Ry(map(*q), *a),
            Gate::Rz(q, a) => Gate::Rz(map(*q), *a),
            Gate::Phase(q, a) => Gate::Phase(map(*q), *a),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: map(*control),
                target: map(*target),
            },
            Gate::Swap(a, b) => Gate::Swap(map(*a), map(*b)),
            Gate::ControlledSwap { control, a, b } => Gate::ControlledSwap {
                control: map(*control),
                a: map(*a),
                b: map(*b),
            },
            Gate::MultiControlled { controls, inner } => Gate::MultiControlled {
                controls: controls
                    .iter()
                    .map(|c| Control {
                        qubit: map(c.qubit),
                        polarity: c.polarity,
                    })
                    .collect(),
                inner: Box::new(inner.remap(map)),
            },
            Gate::UniformlyControlledRy {
                controls,
                target,
                angles,
            } => Gate::UniformlyControlledRy {
                controls: controls.iter().map(|&q| map(q)).collect(),
                target: map(*target),
                angles: angles.clone(),
            },
            Gate::Matrix { qubits, unitary } => Gate::Matrix {
                qubits: qubits.iter().map(|&q| map(q)).collect(),
                unitary: unitary.clone(),
            },
            Gate::Measure { qubit, clbit } => Gate::Measure {
                qubit: map(*qubit),
                clbit: *clbit,
            },
        }
    }

    pub(crate) fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        let mut seen = 0u64;
        for &q in &qs {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
            if q < 64 {
                if seen & (1 << q) != 0 {
                    return Err(Error::DuplicateQubit(q));
                }
                seen |= 1 << q;
            }
        }
        match self {
            Gate::Matrix { qubits, unitary } => {
                if unitary.dim() != 1 << qubits.len() {
                    return Err(Error::MatrixShape {
                        got: unitary.dim(),
                        expected: 1 << qubits.len(),
                    });
                }
            }
            Gate::UniformlyControlledRy {
                controls, angles, ..
            } => {
                if angles.len() != 1 << controls.len() {
                    return Err(Error::MatrixShape {
                        got: angles.len(),
                        expected: 1 << controls.len(),
                    });
                }
            }
            Gate::MultiControlled { inner, .. } => {
                if matches!(**inner, Gate::MultiControlled { .. } | Gate::Measure { .. }) {
                    return Err(Error::NotControllable(format!("nested {}", inner.name())));
                }
                inner.validate(n_qubits)?;
            }
            _ => {}
        }
        Ok(())
    }
}
