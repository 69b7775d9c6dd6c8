//! Gate-count scaling of sparse preparation over random `W`-sparse states.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{prep_fidelity, prep_sparse, SparseStateSpec};
use crate::circuit::{gate_census, GateCensus};
use crate::error::{Error, Result};

/// `w` distinct indices below `2^n_b` with standard-normal amplitudes.
pub fn random_sparse_state(n_b: usize, w: usize, seed: u64) -> Result<SparseStateSpec> {
    let dim = 1usize << n_b;
    if w == 0 || w > dim {
        return Err(Error::InvalidSparseState(format!(
            "cannot place {w} entries in {dim} slots"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = index::sample(&mut rng, dim, w).into_vec();
    cells.sort_unstable();
    let entries = cells
        .into_iter()
        .map(|i| loop {
            let v: f64 = StandardNormal.sample(&mut rng);
            if v != 0.0 {
                break (i, v);
            }
        })
        .collect();
    SparseStateSpec::new(n_b, entries)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSample {
    pub w: usize,
    pub sample: usize,
    pub seed: u64,
    pub fidelity: f64,
    pub census: GateCensus,
}

fn sample_seed(base: u64, w: usize, sample: usize) -> u64 {
    base.wrapping_add(((w as u64) << 32) | sample as u64)
}

/// Synthesizes, verifies and counts `samples` random states for every
/// `W` in `1..=w_max`. Rows come back ordered by `(W, sample)`; a state
/// whose fidelity falls below `min_fidelity` aborts the run.
pub fn gate_bench(
    n_b: usize,
    w_max: usize,
    samples: usize,
    base_seed: u64,
    min_fidelity: f64,
) -> Result<Vec<BenchSample>> {
    let jobs: Vec<(usize, usize)> = (1..=w_max)
        .flat_map(|w| (0..samples).map(move |s| (w, s)))
        .collect();
    jobs.par_iter()
        .map(|&(w, sample)| {
            let seed = sample_seed(base_seed, w, sample);
            let spec = random_sparse_state(n_b, w, seed)?;
            let circuit = prep_sparse(&spec)?;
            let fidelity = prep_fidelity(&circuit, &spec.to_dense())?;
            if fidelity < min_fidelity {
                return Err(Error::Verification(format!(
                    "W = {w}, sample {sample} (seed {seed}): fidelity {fidelity:.12} below {min_fidelity}"
                )));
            }
            Ok(BenchSample { w, sample, seed, fidelity, census: gate_census(&circuit)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states_are_deterministic_and_distinct() {
        let a = random_sparse_state(6, 5, 3).unwrap();
        assert_eq!(a, random_sparse_state(6, 5, 3).unwrap());
        assert_ne!(a, random_sparse_state(6, 5, 4).unwrap());
        assert_eq!(a.w(), 5);
        assert!(random_sparse_state(2, 5, 0).is_err());
    }

    #[test]
    fn small_bench_is_ordered() {
        let rows = gate_bench(5, 4, 3, 1, 1.0 - 1e-9).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.w, r.sample)).collect();
        let want: Vec<_> = (1..=4).flat_map(|w| (0..3).map(move |s| (w, s))).collect();
        assert_eq!(keys, want);
        assert!(rows
            .iter()
            .all(|r| r.census.other == 0 && r.fidelity > 1.0 - 1e-9));
    }

    #[test]
    fn impossible_threshold_names_the_seed() {
        let err = gate_bench(3, 1, 1, 0, 2.0).unwrap_err().to_string();
        assert!(err.contains("seed"), "{err}");
    }
}
