use super::*;
use crate::prep::{prep_sparse, SparseStateSpec};
use crate::problem::*;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

fn prep_for(b: &[f64]) -> Circuit {
    prep_sparse(&SparseStateSpec::from_dense(b).unwrap()).unwrap()
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn fidelity(out: &HhlOutcome, x: &[f64]) -> f64 {
    out.solution_state
        .fidelity(&StateVector::from_real(x).unwrap())
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    g.qr().q()
}

fn spd_with(values: &[f64], rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let q = random_orthogonal(values.len(), rng);
    let a = &q * DMatrix::from_diagonal(&DVector::from_column_slice(values)) * q.transpose();
    (&a + a.transpose()) * 0.5
}

fn random_b(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn diag_system() -> LinearSystem {
    let a = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.25]));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    LinearSystem::from_dense(&a, vec![h, h]).unwrap()
}

#[test]
fn identity_system() {
    let sys = LinearSystem::from_dense(&DMatrix::identity(2, 2), vec![1.0, 0.0]).unwrap();
    let cfg = HhlConfig::new(1);
    let out = solve_hhl(&sys, &Circuit::new(1), &cfg).unwrap();
    assert!((fidelity(&out, &[1.0, 0.0]) - 1.0).abs() < 1e-12);
    assert!((out.success_probability - out.c * out.c).abs() < 1e-12);
    assert!((out.recovered_norm.unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn diagonal_exact_case() {
    let sys = diag_system();
    let cfg = HhlConfig::new(2).with_t(2.0 * PI);
    let out = solve_hhl(&sys, &prep_for(&sys.rhs), &cfg).unwrap();
    let s5 = 5f64.sqrt();
    let got = out.solution_state.real_parts();
    assert!((got[0] - 1.0 / s5).abs() < 1e-12 && (got[1] - 2.0 / s5).abs() < 1e-12);
    assert!((out.success_probability - 10.0 * out.c * out.c).abs() < 1e-12);
    assert!((out.solution_state.norm() - 1.0).abs() < 1e-10);
    assert!(out.clock_zero_weight >= 1.0 - 1e-12);
    let classical = classical_solve(&sys).unwrap();
    let norm = classical.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((out.recovered_norm.unwrap() - norm).abs() < 1e-12);
    assert!((norm - 10f64.sqrt()).abs() < 1e-12);
}

#[test]
fn garbage_branch_in_exact_case() {
    let sys = diag_system();
    let cfg = HhlConfig::new(2).with_t(2.0 * PI).resolved(&sys).unwrap();
    let c = cfg.c.unwrap();
    let state = simulate(
        &build_hhl_circuit(&sys, &prep_for(&sys.rhs), &cfg).unwrap(),
        None,
    )
    .unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (i, lam) in [0.5, 0.25].iter().enumerate() {
        let want = (1.0 - c * c / (lam * lam)).sqrt() * h;
        assert!((state.amplitudes()[i].norm() - want).abs() < 1e-8);
    }
}

#[test]
fn config_validation() {
    let sys = diag_system();
    assert!(HhlConfig::new(2).with_c(0.3).resolved(&sys).is_err());
    assert!(HhlConfig::new(2).with_t(8.0 * PI).resolved(&sys).is_err());
    assert!(HhlConfig::new(0).resolved(&sys).is_err());
    let resolved = HhlConfig::new(3).resolved(&sys).unwrap();
    assert!((resolved.t.unwrap() - 2.0 * PI * (1.0 - 0.125) / 0.5).abs() < 1e-12);
    assert!((resolved.c.unwrap() - 0.225).abs() < 1e-12);
    let asym = LinearSystem::from_dense(
        &DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]),
        vec![1.0, 0.0],
    )
    .unwrap();
    assert!(matches!(
        HhlConfig::new(2).resolved(&asym),
        Err(Error::NotSymmetric(_))
    ));
    let indefinite = LinearSystem::from_dense(
        &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
        vec![1.0, 0.0],
    )
    .unwrap();
    assert!(HhlConfig::new(2).resolved(&indefinite).is_err());
}

#[test]
fn clock_residual_detected() {
    let g = GridSpec::new(2, 2).unwrap();
    let sys = assemble_system(
        &g,
        &PermeabilityField::uniform(4, 1.0).unwrap(),
        &BoundaryCondition::PressureGradient {
            p_left: 1.0,
            p_right: 0.0,
        },
    )
    .unwrap();
    let cfg = HhlConfig::new(3).with_clock_tolerance(1e-9);
    assert!(matches!(
        solve_hhl(&sys, &prep_for(&sys.rhs), &cfg),
        Err(Error::ClockResidual { .. })
    ));
}

#[test]
fn degenerate_zero_rhs() {
    let sys = diag_system();
    let cfg = HhlConfig::new(2).with_t(2.0 * PI).with_c(1e-9);
    assert!(matches!(
        solve_hhl(&sys, &prep_for(&sys.rhs), &cfg),
        Err(Error::DegenerateHhl(_))
    ));
}

#[test]
fn two_by_two_grid_fidelity() {
    let g = GridSpec::new(2, 2).unwrap();
    let sys = assemble_system(
        &g,
        &PermeabilityField::uniform(4, 1.0).unwrap(),
        &BoundaryCondition::PressureGradient {
            p_left: 1.0,
            p_right: 0.0,
        },
    )
    .unwrap();
    let x = classical_solve(&sys).unwrap();
    let out = solve_hhl(&sys, &prep_for(&sys.rhs), &HhlConfig::new(8)).unwrap();
    assert!(fidelity(&out, &x) >= 0.99);
}

#[test]
fn four_by_four_norm_within_two_percent() {
    let g = GridSpec::new(4, 4).unwrap();
    let bc = BoundaryCondition::Wells {
        sites: vec![(1, -164.0), (12, 113.0)],
    };
    let sys = assemble_system(&g, &PermeabilityField::uniform(16, 1.0).unwrap(), &bc).unwrap();
    let x = classical_solve(&sys).unwrap();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let out = solve_hhl(&sys, &prep_for(&sys.rhs), &HhlConfig::new(10)).unwrap();
    assert!((out.recovered_norm.unwrap() / norm - 1.0).abs() < 0.02);
}

#[test]
fn fidelity_non_decreasing_in_clock_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let dist = Uniform::new(1.0, 10.0).unwrap();
    for _ in 0..3 {
        let values: Vec<f64> = (0..4).map(|_| dist.sample(&mut rng)).collect();
        let sys =
            LinearSystem::from_dense(&spd_with(&values, &mut rng), random_b(4, &mut rng)).unwrap();
        let x = classical_solve(&sys).unwrap();
        let fids: Vec<f64> = [4, 6, 8, 10]
            .iter()
            .map(|&n_w| {
                fidelity(
                    &solve_hhl(
                        &sys,
                        &prep_for(&sys.rhs),
                        &HhlConfig::new(n_w).with_clock_tolerance(1.0),
                    )
                    .unwrap(),
                    &x,
                )
            })
            .collect();
        assert!(fids.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{fids:?}");
        assert!(fids[3] >= 0.99);
    }
}

#[test]
fn spectral_oracle_agrees_with_direct_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sys = LinearSystem::from_dense(
        &spd_with(&[1.0, 2.0, 5.0, 9.0], &mut rng),
        random_b(4, &mut rng),
    )
    .unwrap();
    let a = Spectrum::of(&sys).unwrap().solve(&sys.rhs);
    let b = classical_solve(&sys).unwrap();
    assert!(a.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-10));
}

#[test]
fn shot_mode_reports_frequency() {
    let sys = diag_system();
    let cfg = HhlConfig::new(2).with_t(2.0 * PI).with_shots(20_000, 3);
    let out = solve_hhl(&sys, &prep_for(&sys.rhs), &cfg).unwrap();
    let f = out.shot_success_frequency.unwrap();
    let se = (out.success_probability * (1.0 - out.success_probability) / 20_000.0).sqrt();
    assert!((f - out.success_probability).abs() < 5.0 * se);
}

#[test]
fn report_json_fields() {
    let sys = diag_system();
    let out = solve_hhl(
        &sys,
        &prep_for(&sys.rhs),
        &HhlConfig::new(2).with_t(2.0 * PI),
    )
    .unwrap();
    let report = HhlReport::new(&out, Some(&classical_solve(&sys).unwrap())).unwrap();
    let v: serde_json::Value = serde_json::to_value(&report).unwrap();
    for key in [
        "success_probability",
        "recovered_norm",
        "fidelity_vs_oracle",
        "n_w",
        "t",
        "C",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Eigenvalues on the clock grid make QPE exact.
    #[test]
    fn representable_spectrum_is_exact(seed in any::<u64>(), n_b in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_w = 5;
        let m = 1usize << n_w;
        let n = 1usize << n_b;
        let ys = rand::seq::index::sample(&mut rng, m - 1, n).into_vec();
        let t = 1.0;
        let values: Vec<f64> = ys.iter().map(|y| 2.0 * PI * (y + 1) as f64 / (m as f64 * t)).collect();
        let sys = LinearSystem::from_dense(&spd_with(&values, &mut rng), random_b(n, &mut rng)).unwrap();
        let spectrum = Spectrum::of(&sys).unwrap();
        let cfg = HhlConfig::new(n_w).with_t(t).with_clock_tolerance(1e-6);
        let out = solve_hhl(&sys, &prep_for(&sys.rhs), &cfg).unwrap();
        let oracle = spectrum.solve(&sys.rhs);
        prop_assert!((fidelity(&out, &oracle) - 1.0).abs() < 1e-8);
        let bhat = normalized(&sys.rhs);
        let want: f64 = (0..n)
            .map(|k| {
                let proj: f64 = (0..n).map(|r| spectrum.vectors[(r, k)] * bhat[r]).sum();
                (out.c * proj / spectrum.values[k]).powi(2)
            })
            .sum();
        prop_assert!((out.success_probability - want).abs() < 1e-8);
        let x = classical_solve(&sys).unwrap();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((out.recovered_norm.unwrap() / norm - 1.0).abs() < 1e-8);
    }
}
