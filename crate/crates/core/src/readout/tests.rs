use super::*;
use crate::circuit::{Gate, StateVector};
use crate::hhl::{build_hhl_circuit, solve_hhl, HhlConfig, HhlLayout};
use crate::problem::{classical_solve, region_average, LinearSystem};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

fn exact_p0(test: &OverlapCircuit) -> f64 {
    match measure_test(test, 0, 0).unwrap().0 {
        AncillaStats::Exact(p) => p,
        AncillaStats::Shots { .. } => unreachable!(),
    }
}

fn r_prep(v: &[f64]) -> Circuit {
    StateSource::injected(v).unwrap().circuit
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn swap_test_hand_state() {
    let source = StateSource::injected(&[0.6, 0.8]).unwrap();
    let test = build_swap_test(&source, &Circuit::new(1)).unwrap();
    assert!((exact_p0(&test) - 0.68).abs() < 1e-12);
    assert_eq!(test.extra_qubits(&source), 2);
}

#[test]
fn swap_test_identity_and_orthogonal() {
    let same = StateSource::injected(&[0.6, 0.8, 0.0, 0.0]).unwrap();
    let test = build_swap_test(&same, &r_prep(&[0.6, 0.8, 0.0, 0.0])).unwrap();
    assert!((exact_p0(&test) - 1.0).abs() < 1e-12);
    let mut r = Circuit::new(2);
    r.push(Gate::X(1)).unwrap();
    let orth = build_swap_test(&StateSource::plain(Circuit::new(2)), &r).unwrap();
    assert!((exact_p0(&orth) - 0.5).abs() < 1e-12);
}

#[test]
fn hadamard_recovers_negative_sign() {
    let source = StateSource::injected(&[-FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
    let had = build_hadamard_test(&source, &Circuit::new(1)).unwrap();
    let p0 = exact_p0(&had);
    assert!((p0 - (1.0 - FRAC_1_SQRT_2) / 2.0).abs() < 1e-12);
    assert!((p0 - 0.1464).abs() < 1e-4);
    let est = estimate_overlap(AncillaStats::Exact(p0), TestMode::Hadamard).unwrap();
    assert!((est.value + FRAC_1_SQRT_2).abs() < 1e-12);
    let swap = build_swap_test(&source, &Circuit::new(1)).unwrap();
    let sq = estimate_overlap(AncillaStats::Exact(exact_p0(&swap)), TestMode::Swap).unwrap();
    assert!((sq.value - 0.5).abs() < 1e-12);
}

#[test]
fn hadamard_unit_overlap() {
    let v = [0.5, -0.5, 0.5, 0.5];
    let had = build_hadamard_test(&StateSource::injected(&v).unwrap(), &r_prep(&v)).unwrap();
    assert!((exact_p0(&had) - 1.0).abs() < 1e-12);
}

#[test]
fn register_width_mismatch() {
    let source = StateSource::plain(Circuit::new(2));
    assert!(matches!(
        build_swap_test(&source, &Circuit::new(3)),
        Err(crate::Error::RegisterMismatch(_))
    ));
    assert!(build_hadamard_test(&source, &Circuit::new(1)).is_err());
}

#[test]
fn estimate_examples() {
    let swap = |p| {
        estimate_overlap(AncillaStats::Exact(p), TestMode::Swap)
            .unwrap()
            .value
    };
    assert!((swap(1.0) - 1.0).abs() < 1e-15);
    assert!((swap(0.68) - 0.36).abs() < 1e-12);
    assert_eq!(
        estimate_overlap(AncillaStats::Exact(0.5), TestMode::Hadamard)
            .unwrap()
            .value,
        0.0
    );
    let shot = estimate_overlap(
        AncillaStats::Shots {
            zeros: 300,
            shots: 1000,
        },
        TestMode::Swap,
    )
    .unwrap();
    assert_eq!(shot.value, 0.0);
    assert!(shot.warning.is_some());
    assert!((shot.standard_error - 2.0 * (0.3f64 * 0.7 / 1000.0).sqrt()).abs() < 1e-15);
    let noisy = estimate_overlap(
        AncillaStats::Shots {
            zeros: 495,
            shots: 1000,
        },
        TestMode::Swap,
    )
    .unwrap();
    assert!(noisy.warning.is_none());
    assert!(estimate_overlap(AncillaStats::Shots { zeros: 5, shots: 0 }, TestMode::Swap).is_err());
    assert!(estimate_overlap(AncillaStats::Exact(1.5), TestMode::Swap).is_err());
}

fn exact(value: f64, mode: TestMode) -> OverlapEstimate {
    OverlapEstimate {
        value,
        mode,
        shots: 0,
        standard_error: 0.0,
        p0: (1.0 + value) / 2.0,
        warning: None,
    }
}

#[test]
fn combine_examples() {
    let paired = plan_r_registers(&RegionSpec::new(vec![0, 1]).unwrap(), 2).unwrap();
    let avg = combine_average(&[exact(0.3, TestMode::Hadamard)], &paired, 2.0, false).unwrap();
    assert!((avg - 2.0 * 2f64.sqrt() * 0.3 / 2.0).abs() < 1e-12);
    let one = plan_r_registers(&RegionSpec::new(vec![3]).unwrap(), 2).unwrap();
    assert!(
        (combine_average(&[exact(-0.4, TestMode::Hadamard)], &one, 5.0, false).unwrap() + 2.0)
            .abs()
            < 1e-12
    );

    let two = plan_r_registers(&RegionSpec::new(vec![0, 1, 3]).unwrap(), 2).unwrap();
    assert_eq!(two.groups.len(), 2);
    let mixed = [exact(0.2, TestMode::Hadamard), exact(0.04, TestMode::Swap)];
    assert!(combine_average(&mixed, &two, 1.0, true).is_err());
    let swaps = [exact(0.04, TestMode::Swap), exact(0.09, TestMode::Swap)];
    assert!(combine_average(&swaps, &two, 1.0, false).is_err());
    let got = combine_average(&swaps, &two, 1.0, true).unwrap();
    assert!((got - (0.2 * 2f64.sqrt() + 0.3) / 3.0).abs() < 1e-12);
    assert!(combine_average(&swaps[..1], &two, 1.0, true).is_err());
}

#[test]
fn injected_extraction_matches_region_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = random_state(16, &mut rng);
    let region = RegionSpec::new(vec![1, 2, 3, 5, 6, 7, 9, 11]).unwrap();
    let plan = plan_r_registers(&region, 4).unwrap();
    let source = StateSource::injected(&x).unwrap();
    let report =
        extract_average(&source, &plan, &HadamardTest, &ExtractionConfig::default()).unwrap();
    let want = region_average(&x, region.nodes()).unwrap();
    assert!((report.average_normalized - want).abs() < 1e-10);
    assert!(report.groups.iter().all(|g| g.extra_qubits == 5));
    assert_eq!(report.error_budget.bound_normalized, 0.0);
    let v = serde_json::to_value(&report).unwrap();
    for key in [
        "groups",
        "overlaps",
        "average_normalized",
        "average_absolute",
        "error_budget",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn shot_extraction_is_seeded() {
    let x = [0.1, 0.2, 0.4, 0.3, 0.5, 0.2, 0.6, 0.2];
    let plan = plan_r_registers(&RegionSpec::new(vec![0, 1, 4]).unwrap(), 3).unwrap();
    let source = StateSource::injected(&x).unwrap();
    let cfg = ExtractionConfig {
        shots: 4000,
        seed: 9,
        ..Default::default()
    };
    let a = extract_average(&source, &plan, &HadamardTest, &cfg).unwrap();
    let b = extract_average(&source, &plan, &HadamardTest, &cfg).unwrap();
    assert_eq!(a, b);
    let norm = dot(&x, &x).sqrt();
    let want = region_average(&x, &[0, 1, 4]).unwrap() / norm;
    assert!((a.average_normalized - want).abs() < a.error_budget.bound_normalized);
}

fn representable_system(seed: u64) -> (LinearSystem, HhlConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_w = 4;
    let values: Vec<f64> = [3usize, 5, 8, 13]
        .iter()
        .map(|y| 2.0 * PI * *y as f64 / 16.0)
        .collect();
    let g = DMatrix::<f64>::from_fn(4, 4, |_, _| StandardNormal.sample(&mut rng));
    let q = g.qr().q();
    let a = &q * DMatrix::from_diagonal(&DVector::from_vec(values)) * q.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let b: Vec<f64> = (0..4).map(|_| StandardNormal.sample(&mut rng)).collect();
    let sys = LinearSystem::from_dense(&a, b).unwrap();
    let cfg = HhlConfig::new(n_w)
        .with_t(1.0)
        .with_clock_tolerance(1e-9)
        .resolved(&sys)
        .unwrap();
    (sys, cfg)
}

#[test]
fn hhl_extraction_exact_identity() {
    for seed in [1, 2, 3] {
        let (sys, cfg) = representable_system(seed);
        let prep = r_prep(&sys.rhs);
        let out = solve_hhl(&sys, &prep, &cfg).unwrap();
        let circuit = build_hhl_circuit(&sys, &prep, &cfg).unwrap();
        let source = StateSource::hhl(
            circuit,
            HhlLayout {
                n_b: 2,
                n_w: cfg.n_w,
            },
        )
        .unwrap();
        let x = classical_solve(&sys).unwrap();
        for nodes in [vec![0, 1, 3], vec![2], vec![0, 1, 2, 3]] {
            let plan = plan_r_registers(&RegionSpec::new(nodes.clone()).unwrap(), 2).unwrap();
            let ecfg = ExtractionConfig {
                solution_norm: out.recovered_norm,
                ..Default::default()
            };
            let report = extract_average(&source, &plan, &HadamardTest, &ecfg).unwrap();
            let want = region_average(&x, &nodes).unwrap();
            assert!(
                (report.average_absolute.unwrap() - want).abs() < 1e-8,
                "seed {seed} {nodes:?}"
            );
            let swap = extract_average(
                &source,
                &plan,
                &SwapTest,
                &ExtractionConfig {
                    assume_nonnegative: true,
                    ..ecfg
                },
            );
            if plan.groups.len() == 1 {
                let got = swap.unwrap().average_absolute.unwrap();
                assert!((got - want.abs()).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn registry_lookup() {
    let r = overlap_registry();
    assert_eq!(r.names(), vec!["swap", "hadamard"]);
    assert_eq!(r.get("hadamard").unwrap().mode(), TestMode::Hadamard);
    assert!(r.get("imaginary").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn swap_and_hadamard_agree(seed in any::<u64>(), n_b in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1usize << n_b;
        let x = random_state(n, &mut rng);
        let r = random_state(n, &mut rng);
        let source = StateSource::injected(&x).unwrap();
        let rc = r_prep(&r);
        let swap = estimate_overlap(AncillaStats::Exact(exact_p0(&build_swap_test(&source, &rc).unwrap())), TestMode::Swap).unwrap();
        let had = estimate_overlap(AncillaStats::Exact(exact_p0(&build_hadamard_test(&source, &rc).unwrap())), TestMode::Hadamard).unwrap();
        let want = dot(&r, &x);
        prop_assert!((had.value - want).abs() < 1e-10);
        prop_assert!((swap.value - want * want).abs() < 1e-10);
        prop_assert!((swap.value - had.value * had.value).abs() < 1e-9);
    }

    #[test]
    fn groups_prepare_uniform_states(nodes in proptest::collection::btree_set(0usize..16, 1..10)) {
        let region = RegionSpec::new(nodes.into_iter().collect()).unwrap();
        let plan = plan_r_registers(&region, 4).unwrap();
        for g in &plan.groups {
            let s = crate::circuit::simulate(&g.circuit, None).unwrap();
            let mut want = vec![0.0; 16];
            for &i in &g.subset {
                want[i] = g.xi;
            }
            prop_assert!(s.fidelity(&StateVector::from_real(&want).unwrap()) > 1.0 - 1e-9);
        }
    }
}
