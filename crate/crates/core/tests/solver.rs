use nalgebra::{DMatrix, DVector};
use oseen_afem::assembly::{apply_dirichlet, assemble, AssemblyOptions, Convection};
use oseen_afem::bench::problems::problem_oseen_smooth;
use oseen_afem::fem::{Discretization, SpacePair};
use oseen_afem::mesh::build_unit_square;
use oseen_afem::pipeline::oseen_parameters;
use oseen_afem::solver::{solve, SolverConfig};
use oseen_afem::sparse::CsrMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sparse(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for _ in 0..4 {
            row[rng.gen_range(0..n)] += rng.gen_range(-1.0..1.0);
        }
        // nonsymmetric, not diagonally dominant: pivoting matters
        row[i] += rng.gen_range(0.1..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sparse_lu_matches_dense_lu(n in 2usize..60, seed in any::<u64>()) {
        let dense = random_sparse(n, seed);
        let m = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
        prop_assume!(m.clone().svd(false, false).singular_values.min() > 1e-6);
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let expected = m.lu().solve(&DVector::from_vec(rhs.clone())).unwrap();
        let got = solve(&CsrMatrix::from_dense(&dense), &rhs, &SolverConfig { tolerance: 1e-8, ..Default::default() }).unwrap();
        let scale = expected.amax().max(1.0);
        for i in 0..n {
            prop_assert!((got.solution[i] - expected[i]).abs() < 1e-8 * scale);
        }
    }

    #[test]
    fn solve_is_linear(seed in any::<u64>(), alpha in -5.0f64..5.0) {
        let n = 30;
        let dense = random_sparse(n, seed);
        let m = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
        prop_assume!(m.svd(false, false).singular_values.min() > 1e-3);
        let a = CsrMatrix::from_dense(&dense);
        let cfg = SolverConfig { tolerance: 1e-8, ..Default::default() };
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let x = solve(&a, &b, &cfg).unwrap().solution;
        let scaled: Vec<f64> = b.iter().map(|v| alpha * v).collect();
        let y = solve(&a, &scaled, &cfg).unwrap().solution;
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            prop_assert!((y[i] - alpha * x[i]).abs() < 1e-8 * scale * alpha.abs().max(1.0));
        }
    }
}

#[test]
fn recovers_known_vector_on_assembled_systems() {
    for pair in SpacePair::STUDY_PAIRS {
        let disc = Discretization::new(build_unit_square(3), pair).unwrap();
        let data = problem_oseen_smooth(1e-5);
        let params = oseen_parameters(&disc, &data, Default::default()).unwrap();
        let mut sys = assemble(&disc, &data, &params, Convection::Field(&data.b), &AssemblyOptions::default()).unwrap();
        apply_dirichlet(&mut sys, &disc, &data);
        let n = sys.rhs.len();
        let mut x0: Vec<f64> = (0..n).map(|i| ((i * 7919) % 113) as f64 / 113.0 - 0.5).collect();
        if let Some(m) = disc.layout().multiplier_index() {
            // the multiplier of a consistent system is zero once the
            // pressure has zero mean, which the solver enforces
            x0[m] = 0.0;
            let w = disc.pressure_mass_row().unwrap();
            let po = disc.layout().pressure_offset();
            let mean = w.iter().enumerate().map(|(i, w)| w * x0[po + i]).sum::<f64>() / w.iter().sum::<f64>();
            for i in 0..w.len() {
                x0[po + i] -= mean;
            }
        }
        sys.rhs = sys.matrix.mul_vec(&x0);
        let got = sys.solve(&SolverConfig::default()).unwrap();
        let err = got.solution.iter().zip(&x0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-10, "{pair}: {err:e}");
    }
}
