use serde::{Deserialize, Serialize};

use super::{decompose_gate, Circuit, Gate};
use crate::error::Result;

/// Gate counts after lowering onto the {CNOT, single-qubit} library.
///
/// `single` excludes T/T-dagger, which are counted under `t`; `total` is the
/// sum of all categories. Dense multi-qubit matrices cannot be lowered and are
/// counted under `other` with `has_dense_matrix` set. Measurements are not
/// counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCensus {
    pub total: usize,
    pub cx: usize,
    pub t: usize,
    pub single: usize,
    pub other: usize,
    pub has_dense_matrix: bool,
}

impl GateCensus {
    fn record(&mut self, g: &Gate) {
        use std::f64::consts::FRAC_PI_4;
        match g {
            Gate::Measure { .. } => return,
            Gate::Cnot { .. } => self.cx += 1,
            Gate::T(_) | Gate::Tdg(_) => self.t += 1,
            Gate::Phase(_, phi) if ((phi.abs() - FRAC_PI_4).abs()) < 1e-12 => self.t += 1,
            g if g.is_single_qubit() => self.single += 1,
            _ => {
                self.other += 1;
                self.has_dense_matrix = true;
            }
        }
        self.total += 1;
    }

    pub fn csv_header() -> &'static str {
        "total,cx,t,single,other"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.total, self.cx, self.t, self.single, self.other
        )
    }
}

impl std::ops::Sub for GateCensus {
    type Output = GateCensus;

    fn sub(self, rhs: GateCensus) -> GateCensus {
        GateCensus {
            total: self.total.saturating_sub(rhs.total),
            cx: self.cx.saturating_sub(rhs.cx),
            t: self.t.saturating_sub(rhs.t),
            single: self.single.saturating_sub(rhs.single),
            other: self.other.saturating_sub(rhs.other),
            has_dense_matrix: self.has_dense_matrix,
        }
    }
}

pub fn gate_census(circuit: &Circuit) -> Result<GateCensus> {
    let mut census = GateCensus::default();
    for g in circuit.gates() {
        for lowered in decompose_gate(g)? {
            census.record(&lowered);
        }
    }
    Ok(census)
}
