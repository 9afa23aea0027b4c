use std::sync::Arc;

use oseen_afem::assembly::{assemble, interpolate_exact, AssemblyOptions, Convection};
use oseen_afem::bench::problems::problem_oseen_smooth;
use oseen_afem::estimator::spg_error_norm;
use oseen_afem::fem::{Discretization, SpacePair};
use oseen_afem::mesh::{build_unit_square, Mesh, Point};
use oseen_afem::problem::{constant_scalar, ProblemData, VectorField};
use oseen_afem::stabilization::StabilizationParams;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn euler_characteristic(m: &Mesh) -> i64 {
    m.n_vertices() as i64 - m.n_facets() as i64 + m.n_cells() as i64
}

#[test]
fn uniform_meshes_are_consistent() {
    for level in 0..6 {
        let m = build_unit_square(level);
        m.validate().unwrap();
        assert_eq!(euler_characteristic(&m), 1);
        assert!((m.total_area() - 1.0).abs() < 1e-13);
        assert_eq!(m.n_cells(), 2 << (2 * level));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_bisection_keeps_mesh_conforming(seed in any::<u64>(), rounds in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = build_unit_square(1);
        let initial_ratio = m.max_shape_ratio();
        for _ in 0..rounds {
            let marked: Vec<usize> = (0..m.n_cells()).filter(|_| rng.gen_bool(0.2)).collect();
            let n = m.n_cells();
            let next = m.bisect_marked(&marked);
            prop_assert!(next.n_cells() >= n + marked.len());
            m = next;
        }
        prop_assert!(m.validate().is_ok());
        prop_assert_eq!(euler_characteristic(&m), 1);
        prop_assert!((m.total_area() - 1.0).abs() < 1e-12);
        // newest vertex bisection produces finitely many similarity classes
        prop_assert!(m.max_shape_ratio() <= 2.0 * initial_ratio + 1e-12);
    }
}

#[test]
fn convection_is_skew_on_interior_dofs() {
    // divergence free, affine
    let b: VectorField = Arc::new(|x: Point| [0.3 + x[1] - 0.5 * x[0], 0.2 + 0.5 * x[1] + x[0]]);
    let data = ProblemData::homogeneous(0.1, b, constant_scalar(0.0), 0.0);
    for pair in SpacePair::STUDY_PAIRS {
        let disc = Discretization::new(build_unit_square(2), pair).unwrap();
        let params = StabilizationParams::uniform(&disc, 0.0, 0.0);
        let opts = AssemblyOptions::default();
        let with = assemble(&disc, &data, &params, Convection::Field(&data.b), &opts).unwrap().matrix.to_dense();
        let without = assemble(&disc, &data, &params, Convection::Zero, &opts).unwrap().matrix.to_dense();
        let l = disc.layout();
        let boundary = disc.dofs.dirichlet_nodes();
        let interior: Vec<usize> = (0..l.n_velocity).filter(|i| !boundary.contains(i)).collect();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for c in 0..2 {
            let o = l.velocity_offset(c);
            for &i in &interior {
                for &j in &interior {
                    let cij = with[o + i][o + j] - without[o + i][o + j];
                    let cji = with[o + j][o + i] - without[o + j][o + i];
                    worst = worst.max((cij + cji).abs());
                    scale = scale.max(cij.abs());
                }
            }
        }
        assert!(scale > 0.0);
        assert!(worst < 1e-12 * scale, "{pair}: {worst:e}");
    }
}

#[test]
fn interpolation_converges_at_optimal_rate() {
    let data = problem_oseen_smooth(1.0);
    for pair in SpacePair::STUDY_PAIRS {
        let (kv, kp) = (pair.velocity_degree() as f64, pair.pressure_degree() as f64);
        let errs: Vec<(f64, f64)> = (2..=4)
            .map(|level| {
                let disc = Discretization::new(build_unit_square(level), pair).unwrap();
                let params = StabilizationParams::uniform(&disc, 0.0, 0.0);
                let i = interpolate_exact(&disc, &data).unwrap();
                let n = spg_error_norm(&disc, &data, &params, &i, None).unwrap();
                (n.viscous.sqrt(), n.pressure_l2_sq.sqrt())
            })
            .collect();
        let rate = |a: f64, b: f64| (a / b).log2();
        let (h1, l2) = (rate(errs[1].0, errs[2].0), rate(errs[1].1, errs[2].1));
        assert!((h1 - kv).abs() < 0.15, "{pair}: H1 velocity rate {h1}");
        assert!((l2 - (kp + 1.0)).abs() < 0.2, "{pair}: L2 pressure rate {l2}");
    }
}
