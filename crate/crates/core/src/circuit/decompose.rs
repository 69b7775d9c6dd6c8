//! Lowering of composite gates onto the {CNOT, single-qubit} library.
//!
//! Multi-controlled Ry (and any uniformly controlled Ry) uses the Gray-code
//! ladder of alternating Ry and CNOT gates; negative controls are absorbed
//! into the angle table. Other multi-controlled single-qubit gates use the
//! ancilla-free square-root recursion
//! `C^k(U) = C(V) . C^{k-1}X . C(V^dag) . C^{k-1}X . C^{k-1}(V)` with
//! `V^2 = U`, bottoming out in the textbook Toffoli and the ABC
//! decomposition of singly controlled gates.

use super::mat2::{self, Mat2};
use super::{Circuit, Control, Gate};
use crate::error::{Error, Result};

const ANGLE_EPS: f64 = 1e-14;

/// Lowers one gate. Multi-qubit dense matrices (and controlled versions of
/// them) are passed through unchanged.
pub fn decompose_gate(gate: &Gate) -> Result<Vec<Gate>> {
    let mut out = Vec::new();
    lower(gate, &mut out)?;
    Ok(out)
}

/// Lowers a `Gate::MultiControlled`.
pub fn decompose_multicontrolled(gate: &Gate) -> Result<Vec<Gate>> {
    match gate {
        Gate::MultiControlled { .. } => decompose_gate(gate),
        other => Err(Error::Format(format!(
            "expected a multi-controlled gate, got {}",
            other.name()
        ))),
    }
}

pub fn decompose_circuit(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::with_classical_bits(circuit.n_qubits(), circuit.n_classical_bits());
    for g in circuit.gates() {
        out.extend(decompose_gate(g)?)?;
    }
    Ok(out)
}

fn lower(gate: &Gate, out: &mut Vec<Gate>) -> Result<()> {
    match gate {
        Gate::Matrix { qubits, unitary } if qubits.len() == 1 => {
            let m = unitary.as_mat2().expect("1-qubit matrix");
            emit_single(qubits[0], &m, out);
        }
        g if g.is_single_qubit() => out.push(g.clone()),
        Gate::Cnot { .. } | Gate::Measure { .. } | Gate::Matrix { .. } => out.push(gate.clone()),
        Gate::Swap(a, b) => {
            out.push(cx(*a, *b));
            out.push(cx(*b, *a));
            out.push(cx(*a, *b));
        }
        Gate::ControlledSwap { control, a, b } => {
            out.push(cx(*b, *a));
            toffoli(*control, *a, *b, out);
            out.push(cx(*b, *a));
        }
        Gate::UniformlyControlledRy {
            controls,
            target,
            angles,
        } => ucry_gray(controls, *target, angles, out),
        Gate::MultiControlled { controls, inner } => lower_controlled(controls, inner, out)?,
        _ => unreachable!(),
    }
    Ok(())
}

fn lower_controlled(controls: &[Control], inner: &Gate, out: &mut Vec<Gate>) -> Result<()> {
    if controls.is_empty() {
        return lower(inner, out);
    }
    match inner {
        Gate::Ry(t, theta) => {
            let pattern = polarity_pattern(controls);
            let mut angles = vec![0.0; 1 << controls.len()];
            angles[pattern] = *theta;
            let qs: Vec<usize> = controls.iter().map(|c| c.qubit).collect();
            ucry_gray(&qs, *t, &angles, out);
        }
        Gate::UniformlyControlledRy {
            controls: inner_controls,
            target,
            angles,
        } => {
            let pattern = polarity_pattern(controls);
            let low = inner_controls.len();
            let mut merged = vec![0.0; 1 << (low + controls.len())];
            for (j, a) in angles.iter().enumerate() {
                merged[j | (pattern << low)] = *a;
            }
            let mut qs = inner_controls.clone();
            qs.extend(controls.iter().map(|c| c.qubit));
            ucry_gray(&qs, *target, &merged, out);
        }
        Gate::Swap(a, b) => {
            let mut cs = controls.to_vec();
            cs.push(Control::on(*a));
            out.push(cx(*b, *a));
            mc_single(&cs, *b, &mat2::pauli_x(), true, out);
            out.push(cx(*b, *a));
        }
        Gate::Matrix { qubits, .. } if qubits.len() > 1 => out.push(Gate::MultiControlled {
            controls: controls.to_vec(),
            inner: Box::new(inner.clone()),
        }),
        g => match g.single_qubit_matrix() {
            Some((t, m)) => mc_single(controls, t, &m, matches!(g, Gate::X(_)), out),
            None => {
                // Cnot / ControlledSwap inner gates: flatten and retry.
                let flat = Gate::multi_controlled(controls.to_vec(), g.clone())?;
                if let Gate::MultiControlled {
                    controls: c2,
                    inner: i2,
                } = &flat
                {
                    if c2.len() == controls.len() {
                        return Err(Error::NotControllable(g.name().to_string()));
                    }
                    lower_controlled(c2, i2, out)?;
                } else {
                    lower(&flat, out)?;
                }
            }
        },
    }
    Ok(())
}

fn polarity_pattern(controls: &[Control]) -> usize {
    controls
        .iter()
        .enumerate()
        .fold(0, |acc, (j, c)| acc | (usize::from(c.polarity) << j))
}

fn cx(control: usize, target: usize) -> Gate {
    Gate::Cnot { control, target }
}

/// Exact single-qubit emission (global phase kept via a trailing phase gate).
fn emit_single(q: usize, m: &Mat2, out: &mut Vec<Gate>) {
    let z = mat2::zyz(m);
    push_rot(out, Gate::Rz(q, z.delta));
    push_rot(out, Gate::Ry(q, z.gamma));
    push_rot(out, Gate::Rz(q, z.beta - 2.0 * z.alpha));
    push_rot(out, Gate::Phase(q, 2.0 * z.alpha));
}

fn push_rot(out: &mut Vec<Gate>, g: Gate) {
    let angle = match g {
        Gate::Ry(_, a) | Gate::Rz(_, a) | Gate::Phase(_, a) => a,
        _ => 1.0,
    };
    if angle.abs() > ANGLE_EPS {
        out.push(g);
    }
}

fn toffoli(a: usize, b: usize, c: usize, out: &mut Vec<Gate>) {
    out.extend([
        Gate::H(c),
        cx(b, c),
        Gate::Tdg(c),
        cx(a, c),
        Gate::T(c),
        cx(b, c),
        Gate::Tdg(c),
        cx(a, c),
        Gate::T(b),
        Gate::T(c),
        Gate::H(c),
        cx(a, b),
        Gate::T(a),
        Gate::Tdg(b),
        cx(a, b),
    ]);
}

/// Singly controlled U as `Phase(alpha)_c . A X B X C`.
fn controlled_abc(control: usize, target: usize, u: &Mat2, out: &mut Vec<Gate>) {
    let z = mat2::zyz(u);
    push_rot(out, Gate::Rz(target, (z.delta - z.beta) / 2.0));
    out.push(cx(control, target));
    push_rot(out, Gate::Rz(target, -(z.delta + z.beta) / 2.0));
    push_rot(out, Gate::Ry(target, -z.gamma / 2.0));
    out.push(cx(control, target));
    push_rot(out, Gate::Ry(target, z.gamma / 2.0));
    push_rot(out, Gate::Rz(target, z.beta));
    push_rot(out, Gate::Phase(control, z.alpha));
}

fn mc_single(controls: &[Control], target: usize, u: &Mat2, is_x: bool, out: &mut Vec<Gate>) {
    let negatives: Vec<usize> = controls
        .iter()
        .filter(|c| !c.polarity)
        .map(|c| c.qubit)
        .collect();
    out.extend(negatives.iter().map(|&q| Gate::X(q)));
    let qs: Vec<usize> = controls.iter().map(|c| c.qubit).collect();
    mc_positive(&qs, target, u, is_x, out);
    out.extend(negatives.iter().map(|&q| Gate::X(q)));
}

fn mc_positive(qs: &[usize], target: usize, u: &Mat2, is_x: bool, out: &mut Vec<Gate>) {
    match (qs.len(), is_x) {
        (0, true) => out.push(Gate::X(target)),
        (0, false) => emit_single(target, u, out),
        (1, true) => out.push(cx(qs[0], target)),
        (1, false) => controlled_abc(qs[0], target, u, out),
        (2, true) => toffoli(qs[0], qs[1], target, out),
        (k, _) => {
            let v = mat2::sqrt_unitary(u);
            let v_dag = mat2::adjoint(&v);
            let last = qs[k - 1];
            let rest = &qs[..k - 1];
            controlled_abc(last, target, &v, out);
            mc_positive(rest, last, &mat2::pauli_x(), true, out);
            controlled_abc(last, target, &v_dag, out);
            mc_positive(rest, last, &mat2::pauli_x(), true, out);
            mc_positive(rest, target, &v, false, out);
        }
    }
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Uniformly controlled Ry as `2^k` Ry rotations interleaved with `2^k`
/// CNOTs following a Gray-code walk over the controls.
fn ucry_gray(controls: &[usize], target: usize, angles: &[f64], out: &mut Vec<Gate>) {
    let k = controls.len();
    if k == 0 {
        push_rot(out, Gate::Ry(target, angles[0]));
        return;
    }
    let n = 1usize << k;
    let scale = 1.0 / n as f64;
    for i in 0..n {
        let g = gray(i);
        let theta: f64 = angles
            .iter()
            .enumerate()
            .map(|(j, a)| {
                if (j & g).count_ones() % 2 == 0 {
                    *a
                } else {
                    -*a
                }
            })
            .sum::<f64>()
            * scale;
        push_rot(out, Gate::Ry(target, theta));
        let flip = g ^ gray((i + 1) % n);
        out.push(cx(controls[flip.trailing_zeros() as usize], target));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{simulate, StateVector};
    use num_complex::Complex64 as C64;

    /// Column-by-column unitary of a gate list via the simulator.
    fn unitary_of(n: usize, gates: &[Gate]) -> Vec<Vec<C64>> {
        let mut c = Circuit::new(n);
        c.extend(gates.iter().cloned()).unwrap();
        (0..1 << n)
            .map(|col| {
                simulate(&c, Some(&StateVector::basis(n, col)))
                    .unwrap()
                    .into_amplitudes()
            })
            .collect()
    }

    /// Direct definition: U on target when all controls match, identity otherwise.
    fn mc_oracle(n: usize, controls: &[Control], target: usize, u: &Mat2) -> Vec<Vec<C64>> {
        (0..1usize << n)
            .map(|col| {
                let mut v = vec![C64::new(0.0, 0.0); 1 << n];
                let fire = controls
                    .iter()
                    .all(|c| ((col >> c.qubit) & 1 == 1) == c.polarity);
                if !fire {
                    v[col] = C64::new(1.0, 0.0);
                } else {
                    let b = (col >> target) & 1;
                    let base = col & !(1 << target);
                    v[base] += u[0][b];
                    v[base | (1 << target)] += u[1][b];
                }
                v
            })
            .collect()
    }

    fn max_diff(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
        a.iter()
            .zip(b)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max)
    }

    fn assert_library(gates: &[Gate]) {
        for g in gates {
            assert!(
                g.is_single_qubit() || matches!(g, Gate::Cnot { .. }),
                "{g:?}"
            );
        }
    }

    #[test]
    fn toffoli_matches_definition() {
        let mut out = Vec::new();
        toffoli(0, 1, 2, &mut out);
        assert_eq!(
            out.iter()
                .filter(|g| matches!(g, Gate::Cnot { .. }))
                .count(),
            6
        );
        let got = unitary_of(3, &out);
        let want = mc_oracle(3, &[Control::on(0), Control::on(1)], 2, &mat2::pauli_x());
        assert!(max_diff(&got, &want) < 1e-12);
    }

    #[test]
    fn zero_controls_is_inner_gate() {
        let g = Gate::MultiControlled {
            controls: vec![],
            inner: Box::new(Gate::H(1)),
        };
        assert_eq!(decompose_multicontrolled(&g).unwrap(), vec![Gate::H(1)]);
    }

    #[test]
    fn controlled_ry_two_cnot_form() {
        let g = Gate::MultiControlled {
            controls: vec![Control::on(0)],
            inner: Box::new(Gate::Ry(1, 0.8)),
        };
        let gates = decompose_multicontrolled(&g).unwrap();
        assert_eq!(
            gates,
            vec![Gate::Ry(1, 0.4), cx(0, 1), Gate::Ry(1, -0.4), cx(0, 1)]
        );
    }

    #[test]
    fn three_controlled_x_on_five_qubits() {
        let controls = [Control::on(0), Control::on(2), Control::on(4)];
        let g = Gate::MultiControlled {
            controls: controls.to_vec(),
            inner: Box::new(Gate::X(1)),
        };
        let gates = decompose_multicontrolled(&g).unwrap();
        assert_library(&gates);
        let got = unitary_of(5, &gates);
        let want = mc_oracle(5, &controls, 1, &mat2::pauli_x());
        assert!(max_diff(&got, &want) < 1e-10);
    }

    #[test]
    fn mixed_polarity_general_gates() {
        let inners = [
            Gate::H(3),
            Gate::T(3),
            Gate::Ry(3, -1.1),
            Gate::Rz(3, 0.3),
            Gate::Phase(3, 2.0),
            Gate::X(3),
        ];
        let control_sets: Vec<Vec<Control>> = vec![
            vec![Control::off(0)],
            vec![Control::on(0), Control::off(5)],
            vec![Control::off(1), Control::on(2), Control::on(0)],
            vec![
                Control::on(0),
                Control::off(1),
                Control::on(2),
                Control::off(4),
            ],
        ];
        for inner in &inners {
            let (t, m) = inner.single_qubit_matrix().unwrap();
            for cs in &control_sets {
                let g = Gate::MultiControlled {
                    controls: cs.clone(),
                    inner: Box::new(inner.clone()),
                };
                let gates = decompose_multicontrolled(&g).unwrap();
                assert_library(&gates);
                let got = unitary_of(6, &gates);
                let want = mc_oracle(6, cs, t, &m);
                assert!(max_diff(&got, &want) < 1e-10, "{inner:?} {cs:?}");
            }
        }
    }

    #[test]
    fn ucry_gray_code_matches_direct_simulation() {
        let angles = [0.3, -1.2, 2.5, 0.0, 0.7, 1.9, -0.4, 3.0];
        let g = Gate::UniformlyControlledRy {
            controls: vec![3, 0, 1],
            target: 2,
            angles: angles.to_vec(),
        };
        let gates = decompose_gate(&g).unwrap();
        assert_library(&gates);
        assert_eq!(
            gates
                .iter()
                .filter(|g| matches!(g, Gate::Cnot { .. }))
                .count(),
            8
        );
        let got = unitary_of(4, &gates);
        let want = unitary_of(4, &[g]);
        assert!(max_diff(&got, &want) < 1e-12);
    }

    #[test]
    fn swaps_and_controlled_composites() {
        let cases = [
            Gate::Swap(0, 2),
            Gate::ControlledSwap {
                control: 1,
                a: 0,
                b: 3,
            },
            Gate::MultiControlled {
                controls: vec![Control::off(1)],
                inner: Box::new(Gate::Swap(0, 3)),
            },
            Gate::MultiControlled {
                controls: vec![Control::on(3)],
                inner: Box::new(Gate::UniformlyControlledRy {
                    controls: vec![0],
                    target: 2,
                    angles: vec![0.5, -0.9],
                }),
            },
        ];
        for g in &cases {
            let gates = decompose_gate(g).unwrap();
            assert_library(&gates);
            let got = unitary_of(4, &gates);
            let want = unitary_of(4, std::slice::from_ref(g));
            assert!(max_diff(&got, &want) < 1e-10, "{g:?}");
        }
    }

    #[test]
    fn single_qubit_matrix_lowered_exactly() {
        let u = mat2::Zyz {
            alpha: 0.4,
            beta: 1.0,
            gamma: 0.3,
            delta: -0.6,
        }
        .matrix();
        let g = Gate::Matrix {
            qubits: vec![1],
            unitary: crate::circuit::Unitary::from_mat2(&u),
        };
        let gates = decompose_gate(&g).unwrap();
        assert_library(&gates);
        assert!(max_diff(&unitary_of(2, &gates), &unitary_of(2, &[g])) < 1e-12);
    }
}
