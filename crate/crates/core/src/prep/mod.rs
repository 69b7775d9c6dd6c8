//! Circuits that load a right-hand side `b` into the data register.

mod bench;
mod sparse;

pub use bench::{gate_bench, random_sparse_state, BenchSample};
pub use sparse::{prep_sparse, sparse_merge_plan, MergePlan, MergeStep, PairRule, SparseStateSpec};

use crate::circuit::{simulate, Circuit, Gate, StateVector};
use crate::error::{Error, Result};
use crate::registry::{Named, Registry};

/// Hadamards on the low `n_b / 2` qubits: the uniform state over indices
/// `0..2^(n_b/2)`, which is the normalized left-boundary load of a square grid.
pub fn prep_pressure_gradient(n_b: usize) -> Result<Circuit> {
    if n_b < 2 || n_b % 2 == 1 {
        return Err(Error::OddQubitCount(n_b));
    }
    let mut c = Circuit::new(n_b);
    c.extend((0..n_b / 2).map(Gate::H))?;
    Ok(c)
}

/// A way of preparing a normalized real vector, sign included.
pub trait StatePrepStrategy: Named + Send + Sync {
    /// Whether this strategy can prepare `b` exactly.
    fn applies(&self, b: &[f64]) -> bool;

    fn prepare(&self, b: &[f64]) -> Result<Circuit>;
}

/// Appends `Ry(2 pi) = -I` when `negative`; a global sign is invisible on
/// its own but becomes a relative phase once the circuit is controlled.
fn with_sign(mut c: Circuit, negative: bool) -> Result<Circuit> {
    if negative {
        c.push(Gate::Ry(0, 2.0 * std::f64::consts::PI))?;
    }
    Ok(c)
}

pub struct HadamardLadder;

impl Named for HadamardLadder {
    fn name(&self) -> &'static str {
        "hadamard-ladder"
    }
}

impl StatePrepStrategy for HadamardLadder {
    fn applies(&self, b: &[f64]) -> bool {
        let n = b.len();
        if n < 4 || !n.is_power_of_two() || n.trailing_zeros() % 2 == 1 {
            return false;
        }
        let m = 1usize << (n.trailing_zeros() / 2);
        b[0] != 0.0 && b[..m].iter().all(|v| *v == b[0]) && b[m..].iter().all(|v| *v == 0.0)
    }

    fn prepare(&self, b: &[f64]) -> Result<Circuit> {
        if !self.applies(b) {
            return Err(Error::InvalidSparseState(
                "hadamard-ladder needs a constant load on the first 2^(n_b/2) entries and zeros elsewhere".into(),
            ));
        }
        with_sign(
            prep_pressure_gradient(b.len().trailing_zeros() as usize)?,
            b[0] < 0.0,
        )
    }
}

pub struct SparseMerge;

impl Named for SparseMerge {
    fn name(&self) -> &'static str {
        "sparse"
    }
}

impl StatePrepStrategy for SparseMerge {
    fn applies(&self, b: &[f64]) -> bool {
        SparseStateSpec::from_dense(b).is_ok()
    }

    fn prepare(&self, b: &[f64]) -> Result<Circuit> {
        let spec = SparseStateSpec::from_dense(b)?;
        let negative = spec.w() == 1 && spec.entries[0].1 < 0.0;
        with_sign(prep_sparse(&spec)?, negative)
    }
}

pub type PrepRegistry = Registry<dyn StatePrepStrategy>;

/// Registry holding `hadamard-ladder` then `sparse`.
pub fn prep_registry() -> PrepRegistry {
    let mut r = PrepRegistry::default();
    r.register(Box::new(HadamardLadder));
    r.register(Box::new(SparseMerge));
    r
}

/// Resolves `name`, where `auto` takes the first registered strategy that
/// applies to `b`.
pub fn select_prep<'a>(
    registry: &'a PrepRegistry,
    name: &str,
    b: &[f64],
) -> Result<&'a dyn StatePrepStrategy> {
    if name == "auto" {
        return registry.iter().find(|s| s.applies(b)).ok_or_else(|| {
            Error::InvalidSparseState("no registered preparation applies to this vector".into())
        });
    }
    registry.get(name)
}

/// `|<b/|b| | psi>|^2` for the state `circuit` prepares from `|0>`.
pub fn prep_fidelity(circuit: &Circuit, b: &[f64]) -> Result<f64> {
    if b.len() != 1usize << circuit.n_qubits() {
        return Err(Error::StateLength(b.len()));
    }
    let target = StateVector::from_real(b)?;
    Ok(simulate(circuit, None)?.fidelity(&target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::simulate;

    #[test]
    fn gradient_two_qubits() {
        let c = prep_pressure_gradient(2).unwrap();
        assert_eq!(c.gates(), &[Gate::H(0)]);
        let s = simulate(&c, None).unwrap().real_parts();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s[0] - h).abs() < 1e-15 && (s[1] - h).abs() < 1e-15 && s[2] == 0.0 && s[3] == 0.0);
    }

    #[test]
    fn gradient_eight_and_twelve() {
        for (n_b, gates, nz, amp) in [(8, 4, 16, 0.25), (12, 6, 64, 0.125)] {
            let c = prep_pressure_gradient(n_b).unwrap();
            assert_eq!(c.len(), gates);
            assert!(c.gates().iter().all(|g| matches!(g, Gate::H(_))));
            let s = simulate(&c, None).unwrap().real_parts();
            for (i, v) in s.iter().enumerate() {
                let want = if i < nz { amp } else { 0.0 };
                assert!((v - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn odd_qubit_count_rejected() {
        let err = prep_pressure_gradient(5).unwrap_err();
        assert!(matches!(err, Error::OddQubitCount(5)));
        assert!(err.to_string().contains("pad"));
    }

    #[test]
    fn strategies_keep_the_sign() {
        let r = prep_registry();
        let mut single = vec![0.0; 8];
        single[5] = -2.0;
        let mut ladder = vec![0.0; 16];
        ladder[..4].fill(-1.0);
        let mut pair = vec![0.0; 8];
        pair[1] = -3.0;
        pair[6] = 4.0;
        for b in [single, ladder, pair] {
            let c = select_prep(&r, "auto", &b).unwrap().prepare(&b).unwrap();
            let got = simulate(&c, None).unwrap().real_parts();
            let n = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            for (g, w) in got.iter().zip(&b) {
                assert!((g - w / n).abs() < 1e-12, "{got:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn auto_selection() {
        let r = prep_registry();
        let mut b = vec![0.0; 16];
        b[..4].fill(2.0);
        assert_eq!(
            select_prep(&r, "auto", &b).unwrap().name(),
            "hadamard-ladder"
        );
        b[3] = 1.0;
        assert_eq!(select_prep(&r, "auto", &b).unwrap().name(), "sparse");
        assert_eq!(select_prep(&r, "sparse", &b).unwrap().name(), "sparse");
        assert!(select_prep(&r, "qrom", &b).is_err());
        assert!(r.get("hadamard-ladder").unwrap().prepare(&b).is_err());
    }
}
