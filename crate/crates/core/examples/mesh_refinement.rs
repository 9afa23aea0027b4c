//! Uniform red refinement and local newest-vertex bisection.

use oseen_afem::prelude::*;

fn main() -> Result<()> {
    for level in 0..5 {
        let m = build_unit_square(level);
        println!(
            "level {level}: {:>5} cells {:>5} vertices  h = {:.4}  shape ratio {:.3}",
            m.n_cells(),
            m.n_vertices(),
            m.max_diameter(),
            m.max_shape_ratio()
        );
    }

    // refine repeatedly towards the corner (1, 1)
    let mut m = build_unit_square(2);
    for round in 0..6 {
        let marked: Vec<usize> = (0..m.n_cells())
            .filter(|&c| m.cell_vertices(c).iter().any(|v| v[0] + v[1] > 1.9))
            .collect();
        m = m.bisect_marked(&marked);
        m.validate()?;
        println!("bisection round {round}: marked {:>3}, now {:>4} cells, area {:.15}", marked.len(), m.n_cells(), m.total_area());
    }
    Ok(())
}
