//! The interpolation inequalities behind the upper bound, evaluated on the
//! smooth benchmark with nodal interpolation.

use oseen_afem::prelude::*;

fn main() -> Result<()> {
    let data = problem_oseen_smooth(1e-6);
    let opts = RunOptions {
        hypotheses: true,
        ..Default::default()
    };
    for pair in SpacePair::STUDY_PAIRS {
        println!("{pair}");
        for level in 2..=4 {
            let disc = Discretization::new(build_unit_square(level), pair)?;
            let run = OseenRun::new(&disc, &data, &opts)?;
            let h = run.hypotheses.expect("requested");
            let line: Vec<String> = h
                .checks()
                .iter()
                .map(|c| format!("{} {:.2}{}", c.name, c.lhs / c.rhs, if c.holds() { "" } else { "!" }))
                .collect();
            let eta = run.estimate.eta;
            println!("  level {level}: {}  trailing/eta^2 {:.1e}", line.join("  "), h.trailing / (eta * eta));
        }
    }
    Ok(())
}
