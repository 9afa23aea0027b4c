//! Gauss rules on the reference triangle and the reference edge.
//!
//! Triangle rules are collapsed (Duffy) tensor products of Gauss-Legendre
//! rules, which gives a rule of any requested exactness without tabulated
//! constants.

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 12;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-type initial guess, then Newton on P_n
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        // map [-1, 1] -> [0, 1]
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wi;
        w[n - 1 - i] = 0.5 * wi;
    }
    (x, w)
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    /// Points in the reference triangle `{x, y >= 0, x + y <= 1}`.
    pub points: Vec<[f64; 2]>,
    /// Weights summing to 1/2.
    pub weights: Vec<f64>,
    /// Points on the reference edge `[0, 1]`.
    pub edge_points: Vec<f64>,
    /// Weights summing to 1.
    pub edge_weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A rule exact for polynomials of total degree `degree` on the triangle and
/// degree `degree` on edges.
pub fn make_quadrature(degree: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_DEGREE).contains(&degree) {
        return Err(Error::UnsupportedQuadrature(degree));
    }
    // the collapse adds one power of (1 - s) in the outer direction
    let (s, ws) = gauss_legendre((degree + 2).div_ceil(2));
    let (t, wt) = gauss_legendre((degree + 1).div_ceil(2));
    let mut points = Vec::with_capacity(s.len() * t.len());
    let mut weights = Vec::with_capacity(s.len() * t.len());
    for (&si, &wsi) in s.iter().zip(&ws) {
        for (&tj, &wtj) in t.iter().zip(&wt) {
            points.push([si, (1.0 - si) * tj]);
            weights.push(wsi * wtj * (1.0 - si));
        }
    }
    let (edge_points, edge_weights) = gauss_legendre((degree + 1).div_ceil(2));
    Ok(QuadratureRule {
        points,
        weights,
        edge_points,
        edge_weights,
        degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Integral of x^a y^b over the reference triangle.
    fn monomial_integral(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn basic_integrals() {
        let q = make_quadrature(2).unwrap();
        let one: f64 = q.weights.iter().sum();
        assert!((one - 0.5).abs() < 1e-15);
        let xy: f64 = q.points.iter().zip(&q.weights).map(|(p, w)| w * p[0] * p[1]).sum();
        assert!((xy - 1.0 / 24.0).abs() < 1e-15);

        let q6 = make_quadrature(6).unwrap();
        let v: f64 = q6
            .points
            .iter()
            .zip(&q6.weights)
            .map(|(p, w)| w * p[0].powi(3) * p[1].powi(2))
            .sum();
        assert!((v - 1.0 / 420.0).abs() < 1e-16);
    }

    #[test]
    fn exact_for_all_monomials_up_to_degree() {
        for degree in 1..=MAX_DEGREE {
            let q = make_quadrature(degree).unwrap();
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let v: f64 = q
                        .points
                        .iter()
                        .zip(&q.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = monomial_integral(a, b);
                    assert!((v - exact).abs() < 1e-14, "deg {degree} x^{a} y^{b}: {v} vs {exact}");
                }
            }
            let e: f64 = q.edge_weights.iter().sum();
            assert!((e - 1.0).abs() < 1e-14);
            for a in 0..=degree as i32 {
                let v: f64 = q
                    .edge_points
                    .iter()
                    .zip(&q.edge_weights)
                    .map(|(s, w)| w * s.powi(a))
                    .sum();
                assert!((v - 1.0 / (a as f64 + 1.0)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn unsupported_degree() {
        assert!(make_quadrature(0).is_err());
        assert!(make_quadrature(13).is_err());
    }
}
