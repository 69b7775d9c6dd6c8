//! 2x2 complex matrices for single-qubit gates.

use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn hadamard() -> Mat2 {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn phase(phi: f64) -> Mat2 {
    [[ONE, ZERO], [ZERO, C64::from_polar(1.0, phi)]]
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

pub fn rz(theta: f64) -> Mat2 {
    [
        [C64::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, C64::from_polar(1.0, theta / 2.0)],
    ]
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn det(a: &Mat2) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// A square root `V` with `V * V = U` for a 2x2 unitary.
pub fn sqrt_unitary(u: &Mat2) -> Mat2 {
    // For 2x2 matrices sqrt(U) = (U + s I) / sqrt(tr U + 2 s) with s = +-sqrt(det U).
    let s0 = det(u).sqrt();
    for s in [s0, -s0] {
        let denom = (u[0][0] + u[1][1] + 2.0 * s).sqrt();
        if denom.norm() > 1e-8 {
            return [
                [(u[0][0] + s) / denom, u[0][1] / denom],
                [u[1][0] / denom, (u[1][1] + s) / denom],
            ];
        }
    }
    // Only U = -I-like scalar multiples reach here.
    let root = u[0][0].sqrt();
    [[root, ZERO], [ZERO, root]]
}

/// Euler angles with `U = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zyz {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

pub fn zyz(u: &Mat2) -> Zyz {
    let alpha = det(u).arg() / 2.0;
    let g = C64::from_polar(1.0, -alpha);
    let v00 = u[0][0] * g;
    let v10 = u[1][0] * g;
    let (c, s) = (v00.norm(), v10.norm());
    let gamma = 2.0 * s.atan2(c);
    let eps = 1e-12;
    let (sum, diff) = if c > eps && s > eps {
        (-2.0 * v00.arg(), 2.0 * v10.arg())
    } else if s <= eps {
        (-2.0 * v00.arg(), 0.0)
    } else {
        (0.0, 2.0 * v10.arg())
    };
    Zyz {
        alpha,
        beta: (sum + diff) / 2.0,
        gamma,
        delta: (sum - diff) / 2.0,
    }
}

impl Zyz {
    pub fn matrix(&self) -> Mat2 {
        let m = mul(&rz(self.beta), &mul(&ry(self.gamma), &rz(self.delta)));
        let g = C64::from_polar(1.0, self.alpha);
        [[m[0][0] * g, m[0][1] * g], [m[1][0] * g, m[1][1] * g]]
    }
}
