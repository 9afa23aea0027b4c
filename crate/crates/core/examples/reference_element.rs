//! Lagrange bases on the reference triangle and the quadrature rules.

use oseen_afem::fem::{make_quadrature, ReferenceElement};
use oseen_afem::Result;

fn main() -> Result<()> {
    for k in 1..=3 {
        let el = ReferenceElement::new(k)?;
        let rule = make_quadrature(2 * k + 2)?;
        // partition of unity and vanishing gradient sum at every quadrature point
        let mut worst: f64 = 0.0;
        for &xi in &rule.points {
            let e = el.eval(xi);
            let s: f64 = e.values.iter().sum();
            let g = e.gradients.iter().fold([0.0, 0.0], |a, g| [a[0] + g[0], a[1] + g[1]]);
            worst = worst.max((s - 1.0).abs()).max(g[0].abs()).max(g[1].abs());
        }
        println!("P{k}: {} basis functions, {} interior, unity defect {worst:.1e}", el.n_basis(), el.n_interior());
    }
    for degree in [2, 4, 6, 8, 10] {
        let rule = make_quadrature(degree)?;
        // the integral of x^a y^b over the reference triangle is a! b! / (a + b + 2)!
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        let mut worst: f64 = 0.0;
        for a in 0..=degree as u32 {
            for b in 0..=(degree as u32 - a) {
                let q: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32)).sum();
                worst = worst.max((q - fact(a) * fact(b) / fact(a + b + 2)).abs());
            }
        }
        println!("degree {degree:>2}: {:>3} points, max monomial error {worst:.1e}", rule.len());
    }
    Ok(())
}
