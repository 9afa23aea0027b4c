//! Lagrange elements of degree 1 to 3 on the reference triangle.
//!
//! Basis functions are written in barycentric form,
//! `phi(lambda) = prod_m g_{alpha_m}(lambda_m)` with
//! `g_a(t) = prod_{s<a} (k t - s) / (a - s)`, which gives closed-form first
//! and second derivatives.

use crate::error::{Error, Result};

/// Gradients of the barycentric coordinates `lambda_0 = 1 - x - y`,
/// `lambda_1 = x`, `lambda_2 = y` on the reference triangle.
const BARY_GRAD: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// A univariate polynomial stored by ascending coefficients.
#[derive(Clone, Debug)]
struct Poly(Vec<f64>);

impl Poly {
    fn eval3(&self, t: f64) -> [f64; 3] {
        let mut v = [0.0; 3];
        for &c in self.0.iter().rev() {
            v[2] = v[2] * t + 2.0 * v[1];
            v[1] = v[1] * t + v[0];
            v[0] = v[0] * t + c;
        }
        v
    }
}

fn lagrange_factor(degree: usize, a: usize) -> Poly {
    let k = degree as f64;
    let mut coeffs = vec![1.0];
    for s in 0..a {
        let denom = (a - s) as f64;
        // multiply by (k t - s) / (a - s)
        let mut next = vec![0.0; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] -= c * s as f64 / denom;
            next[i + 1] += c * k / denom;
        }
        coeffs = next;
    }
    Poly(coeffs)
}

/// Where a local node sits on the reference triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Vertex(usize),
    /// `(edge, position)`; edge `e` runs from local vertex `(e+1)%3` to
    /// `(e+2)%3` and position counts from 1 at the first endpoint.
    Edge(usize, usize),
    Interior(usize),
}

#[derive(Clone, Debug)]
pub struct ReferenceElement {
    degree: usize,
    multi_indices: Vec<[usize; 3]>,
    kinds: Vec<NodeKind>,
    factors: Vec<[Poly; 3]>,
}

/// Values, reference gradients and reference Hessians of all basis functions
/// at one point.
#[derive(Clone, Debug)]
pub struct BasisEval {
    pub values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
    pub hessians: Vec<[[f64; 2]; 2]>,
}

impl ReferenceElement {
    pub fn new(degree: usize) -> Result<Self> {
        if !(1..=3).contains(&degree) {
            return Err(Error::UnsupportedSpace(format!("polynomial degree {degree}")));
        }
        let k = degree;
        let mut multi_indices = Vec::new();
        let mut kinds = Vec::new();
        for v in 0..3 {
            let mut a = [0; 3];
            a[v] = k;
            multi_indices.push(a);
            kinds.push(NodeKind::Vertex(v));
        }
        for e in 0..3 {
            let (from, to) = ((e + 1) % 3, (e + 2) % 3);
            for t in 1..k {
                let mut a = [0; 3];
                a[from] = k - t;
                a[to] = t;
                multi_indices.push(a);
                kinds.push(NodeKind::Edge(e, t));
            }
        }
        let mut interior = 0;
        for i in 1..k {
            for j in 1..k - i {
                multi_indices.push([k - i - j, i, j]);
                kinds.push(NodeKind::Interior(interior));
                interior += 1;
            }
        }
        let factors = multi_indices
            .iter()
            .map(|a| a.map(|am| lagrange_factor(k, am)))
            .collect();
        Ok(Self {
            degree,
            multi_indices,
            kinds,
            factors,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_basis(&self) -> usize {
        self.multi_indices.len()
    }

    pub fn n_interior(&self) -> usize {
        self.kinds
            .iter()
            .filter(|k| matches!(k, NodeKind::Interior(_)))
            .count()
    }

    pub fn node_kind(&self, i: usize) -> NodeKind {
        self.kinds[i]
    }

    /// Lattice node of basis function `i` in reference coordinates.
    pub fn node(&self, i: usize) -> [f64; 2] {
        let a = self.multi_indices[i];
        let k = self.degree as f64;
        [a[1] as f64 / k, a[2] as f64 / k]
    }

    pub fn nodes(&self) -> Vec<[f64; 2]> {
        (0..self.n_basis()).map(|i| self.node(i)).collect()
    }

    pub fn eval(&self, xi: [f64; 2]) -> BasisEval {
        let lambda = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
        let n = self.n_basis();
        let mut out = BasisEval {
            values: Vec::with_capacity(n),
            gradients: Vec::with_capacity(n),
            hessians: Vec::with_capacity(n),
        };
        for f in &self.factors {
            let g: [[f64; 3]; 3] = [f[0].eval3(lambda[0]), f[1].eval3(lambda[1]), f[2].eval3(lambda[2])];
            let value = g[0][0] * g[1][0] * g[2][0];
            let mut grad = [0.0; 2];
            let mut hess = [[0.0; 2]; 2];
            for m in 0..3 {
                let others: f64 = (0..3).filter(|&o| o != m).map(|o| g[o][0]).product();
                let dm = g[m][1] * others;
                for r in 0..2 {
                    grad[r] += dm * BARY_GRAD[m][r];
                }
                for l in 0..3 {
                    let coeff = if l == m {
                        g[m][2] * others
                    } else {
                        let rest = 3 - m - l;
                        g[m][1] * g[l][1] * g[rest][0]
                    };
                    for r in 0..2 {
                        for c in 0..2 {
                            hess[r][c] += coeff * BARY_GRAD[m][r] * BARY_GRAD[l][c];
                        }
                    }
                }
            }
            out.values.push(value);
            out.gradients.push(grad);
            out.hessians.push(hess);
        }
        out
    }

    /// Evaluate at every point of a rule.
    pub fn tabulate(&self, points: &[[f64; 2]]) -> Vec<BasisEval> {
        points.iter().map(|&p| self.eval(p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_barycenter() {
        let e = ReferenceElement::new(1).unwrap();
        let b = e.eval([1.0 / 3.0, 1.0 / 3.0]);
        for v in b.values {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        for h in b.hessians {
            assert_eq!(h, [[0.0; 2]; 2]);
        }
    }

    #[test]
    fn kronecker_property() {
        for k in 1..=3 {
            let e = ReferenceElement::new(k).unwrap();
            assert_eq!(e.n_basis(), (k + 1) * (k + 2) / 2);
            for j in 0..e.n_basis() {
                let b = e.eval(e.node(j));
                for (i, v) in b.values.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-13, "k={k} i={i} j={j}: {v}");
                }
            }
        }
    }

    #[test]
    fn p2_edge_midpoint_node() {
        let e = ReferenceElement::new(2).unwrap();
        let i = (0..e.n_basis())
            .find(|&i| e.node_kind(i) == NodeKind::Edge(0, 1))
            .unwrap();
        assert_eq!(e.node(i), [0.5, 0.5]);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let step = 1e-5;
        for k in 1..=3 {
            let e = ReferenceElement::new(k).unwrap();
            let x = [0.21, 0.37];
            let b = e.eval(x);
            let bx = (e.eval([x[0] + step, x[1]]), e.eval([x[0] - step, x[1]]));
            let by = (e.eval([x[0], x[1] + step]), e.eval([x[0], x[1] - step]));
            for i in 0..e.n_basis() {
                let gx = (bx.0.values[i] - bx.1.values[i]) / (2.0 * step);
                let gy = (by.0.values[i] - by.1.values[i]) / (2.0 * step);
                assert!((gx - b.gradients[i][0]).abs() < 1e-8);
                assert!((gy - b.gradients[i][1]).abs() < 1e-8);
                let hxx = (bx.0.gradients[i][0] - bx.1.gradients[i][0]) / (2.0 * step);
                let hxy = (by.0.gradients[i][0] - by.1.gradients[i][0]) / (2.0 * step);
                let hyy = (by.0.gradients[i][1] - by.1.gradients[i][1]) / (2.0 * step);
                assert!((hxx - b.hessians[i][0][0]).abs() < 1e-7);
                assert!((hxy - b.hessians[i][0][1]).abs() < 1e-7);
                assert!((hxy - b.hessians[i][1][0]).abs() < 1e-7);
                assert!((hyy - b.hessians[i][1][1]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn unsupported_degree() {
        assert!(ReferenceElement::new(0).is_err());
        assert!(ReferenceElement::new(4).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn partition_of_unity(x in 0.0f64..1.0, t in 0.0f64..1.0, k in 1usize..=3) {
                let p = [x, (1.0 - x) * t];
                let b = ReferenceElement::new(k).unwrap().eval(p);
                let s: f64 = b.values.iter().sum();
                let gx: f64 = b.gradients.iter().map(|g| g[0]).sum();
                let gy: f64 = b.gradients.iter().map(|g| g[1]).sum();
                prop_assert!((s - 1.0).abs() < 1e-13);
                prop_assert!(gx.abs() < 1e-12 && gy.abs() < 1e-12);
            }
        }
    }
}
