//! The estimator, its components and the effectivity index over a range of
//! viscosities.

use oseen_afem::prelude::*;

fn main() -> Result<()> {
    let pair: SpacePair = std::env::args().nth(1).as_deref().unwrap_or("P2/P1").parse()?;
    let disc = Discretization::new(build_unit_square(4), pair)?;
    println!("{pair} on {} cells", disc.n_cells());
    println!("{:>7} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>6}", "nu", "eta", "res", "div", "F", "delta", "mu", "eff");
    for nu in [1e-3, 1e-4, 1e-5, 1e-6] {
        let run = OseenRun::new(&disc, &problem_oseen_smooth(nu), &RunOptions::default())?;
        let [res, div, f, delta, mu] = run.estimate.component_norms();
        println!(
            "{nu:>7.0e} {:>10.3e} {res:>10.3e} {div:>10.3e} {f:>10.3e} {delta:>10.3e} {mu:>10.3e} {:>6.2}",
            run.estimate.eta,
            run.effectivity()?
        );
    }
    Ok(())
}
