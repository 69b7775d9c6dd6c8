use std::f64::consts::PI;

use crate::circuit::{Control, Gate};

/// Quantum Fourier transform on `qubits` (first entry least significant),
/// `|x> -> M^{-1/2} sum_y exp(2 pi i x y / M) |y>`.
pub fn qft(qubits: &[usize]) -> Vec<Gate> {
    let n = qubits.len();
    let mut gates = Vec::new();
    for j in (0..n).rev() {
        gates.push(Gate::H(qubits[j]));
        for k in (0..j).rev() {
            let angle = 2.0 * PI / (1u64 << (j - k + 1)) as f64;
            gates.push(Gate::MultiControlled {
                controls: vec![Control::on(qubits[k])],
                inner: Box::new(Gate::Phase(qubits[j], angle)),
            });
        }
    }
    for i in 0..n / 2 {
        gates.push(Gate::Swap(qubits[i], qubits[n - 1 - i]));
    }
    gates
}

pub fn inverse_qft(qubits: &[usize]) -> Vec<Gate> {
    qft(qubits)
        .iter()
        .rev()
        .map(|g| g.adjoint().expect("qft gates are invertible"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{simulate, Circuit, StateVector};
    use num_complex::Complex64 as C64;

    fn check(n: usize, gates: Vec<Gate>, sign: f64) {
        let m = 1usize << n;
        let mut c = Circuit::new(n);
        c.extend(gates).unwrap();
        for x in 0..m {
            let out = simulate(&c, Some(&StateVector::basis(n, x))).unwrap();
            for (y, a) in out.amplitudes().iter().enumerate() {
                let phase = sign * 2.0 * PI * (x * y) as f64 / m as f64;
                let want = C64::from_polar(1.0 / (m as f64).sqrt(), phase);
                assert!((a - want).norm() < 1e-12, "n={n} x={x} y={y}");
            }
        }
    }

    #[test]
    fn matches_dense_dft() {
        for n in 1..=5 {
            let qs: Vec<usize> = (0..n).collect();
            check(n, qft(&qs), 1.0);
            check(n, inverse_qft(&qs), -1.0);
        }
    }
}
