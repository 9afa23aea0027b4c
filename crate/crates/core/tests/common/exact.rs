//! Solutions that lie in the discrete space are reproduced by the
//! stabilized method, since every stabilization term is consistent.

use std::sync::Arc;

use oseen_afem::assembly::{interpolate_exact, solve_oseen, AssemblyOptions, Convection};
use oseen_afem::fem::{Discretization, SpacePair};
use oseen_afem::mesh::{build_unit_square, Point};
use oseen_afem::pipeline::oseen_parameters;
use oseen_afem::problem::polynomial::CubicStream;
use oseen_afem::problem::{constant_scalar, ProblemData, VectorField};
use oseen_afem::solver::SolverConfig;

fn stream_for(pair: SpacePair) -> CubicStream {
    if pair.velocity_degree() == 1 {
        // affine velocity
        CubicStream {
            psi: [0.0, 0.0, 0.0, 0.0, 0.4, -0.7, 0.3],
            pressure: [0.2, 1.0, -0.5],
        }
    } else {
        CubicStream {
            psi: [0.3, -1.2, 0.7, 0.5, 0.1, -0.4, 0.9],
            pressure: [0.2, 1.0, -0.5],
        }
    }
}

fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |m, x| m.max(x.abs()))
}

/// Max coefficient error of the discrete solution against the interpolant
/// of a polynomial solution lying in the discrete space; velocity relative
/// to its largest coefficient, pressure absolute.
pub fn exactness_error(pair: SpacePair, nu: f64) -> (f64, f64) {
    let b: VectorField = Arc::new(|x: Point| [0.3 + x[1], -0.5 + x[0]]);
    let disc = Discretization::new(build_unit_square(2), pair).unwrap();
    let data = ProblemData::manufactured(nu, b, constant_scalar(1.5), 1.5, Arc::new(stream_for(pair)));
    let params = oseen_parameters(&disc, &data, Default::default()).unwrap();
    let (sol, _) = solve_oseen(
        &disc,
        &data,
        &params,
        Convection::Field(&data.b),
        &AssemblyOptions::default(),
        &SolverConfig::default(),
    )
    .unwrap();
    let exact = interpolate_exact(&disc, &data).unwrap();
    let scale = max_abs(exact.velocity.iter().flatten().copied());
    let dv = (0..2)
        .map(|c| max_abs(sol.velocity[c].iter().zip(&exact.velocity[c]).map(|(a, b)| a - b)))
        .fold(0.0, f64::max);
    let dp = max_abs(sol.pressure.iter().zip(&exact.pressure).map(|(a, b)| a - b));
    (dv / scale, dp)
}
