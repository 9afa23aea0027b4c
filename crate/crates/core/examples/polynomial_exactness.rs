//! A velocity in the discrete space with an affine pressure is reproduced
//! exactly by every pair, stabilization included.

use std::sync::Arc;

use oseen_afem::assembly::interpolate_exact;
use oseen_afem::pipeline::oseen_parameters;
use oseen_afem::prelude::*;
use oseen_afem::problem::polynomial::CubicStream;
use oseen_afem::problem::{constant_scalar, constant_vector};

fn main() -> Result<()> {
    for pair in SpacePair::STUDY_PAIRS {
        let psi = if pair.velocity_degree() == 1 {
            [0.0, 0.0, 0.0, 0.0, 0.4, -0.7, 0.3]
        } else {
            [0.3, -1.2, 0.7, 0.5, 0.1, -0.4, 0.9]
        };
        let exact = CubicStream { psi, pressure: [0.2, 1.0, -0.5] };
        let data = ProblemData::manufactured(1e-3, constant_vector([1.0, 0.5]), constant_scalar(1.0), 1.0, Arc::new(exact));
        let disc = Discretization::new(build_unit_square(2), pair)?;
        let params = oseen_parameters(&disc, &data, Default::default())?;
        let (sol, report) = solve_oseen(&disc, &data, &params, Convection::Field(&data.b), &Default::default(), &Default::default())?;
        let interp = interpolate_exact(&disc, &data)?;
        let diff = sol
            .to_vector(disc.layout())
            .iter()
            .zip(interp.to_vector(disc.layout()))
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        println!("{pair}: max coefficient error {diff:.2e}, solver residual {:.1e}", report.relative_residual);
    }
    Ok(())
}
