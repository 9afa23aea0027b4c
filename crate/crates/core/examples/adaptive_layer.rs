//! Estimator-driven refinement on the boundary layer problem.

use oseen_afem::bench::corner_fraction;
use oseen_afem::prelude::*;

fn main() -> Result<()> {
    let data = problem_oseen_layer(1e-5);
    let config = AdaptiveConfig {
        max_levels: 8,
        ..Default::default()
    };
    let steps = adaptive_loop(build_unit_square(2), "P2/P1".parse()?, &data, &config, &RunOptions::default())?;
    for s in &steps {
        println!(
            "level {}  cells {:>5}  dofs {:>6}  eta {:.3e}  eff {:.2}  near layers {:.3}  marked {}",
            s.level,
            s.disc.n_cells(),
            s.dofs(),
            s.run.estimate.eta,
            s.run.effectivity()?,
            corner_fraction(&s.disc),
            s.marked.len()
        );
    }
    if let Some(last) = steps.last() {
        let path = std::env::temp_dir().join("adaptive_layer.vtk");
        let eta: Vec<f64> = oseen_afem::adaptivity::local_indicators(&last.disc.mesh, &last.run.estimate);
        oseen_afem::io::write_solution_vtk(std::fs::File::create(&path)?, &last.disc, &last.run.solution, &[("eta", &eta)])?;
        println!("final mesh written to {}", path.display());
    }
    Ok(())
}
