use oseen_afem::assembly::{solve_oseen, AssemblyOptions, Convection};
use oseen_afem::bench::problems::{problem_nse_smooth, problem_oseen_smooth};
use oseen_afem::fem::{Discretization, SpacePair};
use oseen_afem::mesh::build_unit_square;
use oseen_afem::navier_stokes::{nse_parameters, picard_solve, PicardConfig};
use oseen_afem::pipeline::oseen_parameters;
use oseen_afem::solver::SolverConfig;

#[test]
fn frozen_picard_is_one_oseen_solve() {
    let data = problem_oseen_smooth(1e-3);
    for pair in SpacePair::STUDY_PAIRS {
        let disc = Discretization::new(build_unit_square(3), pair).unwrap();
        let params = oseen_parameters(&disc, &data, Default::default()).unwrap();
        let opts = AssemblyOptions::default();
        let solver = SolverConfig::default();
        let (oseen, _) = solve_oseen(&disc, &data, &params, Convection::Field(&data.b), &opts, &solver).unwrap();
        let config = PicardConfig {
            frozen_convection: true,
            ..Default::default()
        };
        let picard = picard_solve(&disc, &data, &params, &config, &opts, &solver).unwrap();
        assert!(picard.iterations <= 2, "{pair}: {} iterations", picard.iterations);
        let scale = oseen.velocity.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        for c in 0..2 {
            for (a, b) in picard.solution.velocity[c].iter().zip(&oseen.velocity[c]) {
                assert!((a - b).abs() < 1e-12 * scale, "{pair}: {a} vs {b}");
            }
        }
        for (a, b) in picard.solution.pressure.iter().zip(&oseen.pressure) {
            assert!((a - b).abs() < 1e-10, "{pair}: {a} vs {b}");
        }
    }
}

#[test]
fn picard_converges_for_moderate_viscosity() {
    let data = problem_nse_smooth(0.05);
    let disc = Discretization::new(build_unit_square(3), SpacePair::taylor_hood(2).unwrap()).unwrap();
    let params = nse_parameters(&disc, data.nu, Default::default());
    let r = picard_solve(&disc, &data, &params, &PicardConfig::default(), &AssemblyOptions::default(), &SolverConfig::default()).unwrap();
    assert!(*r.history.last().unwrap() < 1e-10);
    assert!(r.iterations < 40, "{} iterations", r.iterations);
}

#[test]
fn anderson_reaches_the_same_fixed_point() {
    let data = problem_nse_smooth(0.05);
    let disc = Discretization::new(build_unit_square(3), SpacePair::taylor_hood(2).unwrap()).unwrap();
    let params = nse_parameters(&disc, data.nu, Default::default());
    let (opts, solver) = (AssemblyOptions::default(), SolverConfig::default());
    let plain = picard_solve(&disc, &data, &params, &PicardConfig::default(), &opts, &solver).unwrap();
    let config = PicardConfig {
        anderson_depth: 5,
        ..Default::default()
    };
    let acc = picard_solve(&disc, &data, &params, &config, &opts, &solver).unwrap();
    assert!(acc.iterations <= plain.iterations);
    for c in 0..2 {
        for (a, b) in acc.solution.velocity[c].iter().zip(&plain.solution.velocity[c]) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
