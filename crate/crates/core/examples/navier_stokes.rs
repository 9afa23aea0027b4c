//! Picard iteration for the steady Navier-Stokes equations with a
//! manufactured solution, plain and Anderson accelerated.

use oseen_afem::estimator::spg_nse_norm;
use oseen_afem::navier_stokes::{nse_estimate, nse_parameters};
use oseen_afem::prelude::*;

fn main() -> Result<()> {
    let nu = 0.01;
    let data = problem_nse_smooth(nu);
    let disc = Discretization::new(build_unit_square(3), "P2/P1".parse()?)?;
    let params = nse_parameters(&disc, nu, Default::default());
    for depth in [0, 5] {
        let config = PicardConfig {
            anderson_depth: depth,
            ..Default::default()
        };
        let r = picard_solve(&disc, &data, &params, &config, &Default::default(), &Default::default())?;
        let est = nse_estimate(&disc, &data, &params, &r.solution)?;
        let norm = spg_nse_norm(&disc, &data, &params, &r.solution, None)?;
        println!(
            "anderson depth {depth}: {} iterations, final residual {:.1e}, eta {:.3e}, effectivity {:.2}",
            r.iterations,
            r.history.last().copied().unwrap_or(f64::NAN),
            est.eta,
            effectivity(&est, &norm)?
        );
        for (i, h) in r.history.iter().enumerate().step_by(5) {
            println!("  {i:>3} {h:.3e}");
        }
    }
    Ok(())
}
