//! Uniform refinement on the smooth benchmark and the observed orders.

use oseen_afem::prelude::*;

fn main() -> Result<()> {
    let nu = 1e-5;
    let data = problem_oseen_smooth(nu);
    for pair in ["P1/P1", "P2/P1", "P2/P2"] {
        let pair: SpacePair = pair.parse()?;
        println!("{pair}, nu = {nu:e}");
        let mut prev: Option<f64> = None;
        for level in 1..=5 {
            let disc = Discretization::new(build_unit_square(level), pair)?;
            let run = OseenRun::new(&disc, &data, &RunOptions::default())?;
            let err = run.norm.expect("exact solution").spg;
            let order = prev.map(|p| (p / err).log2());
            println!(
                "  level {level}  dofs {:>6}  err {err:.3e}  order {}",
                disc.layout().n_dofs(),
                order.map_or("-".into(), |o| format!("{o:.2}"))
            );
            prev = Some(err);
        }
    }
    Ok(())
}
