use crate::fem::reference::ReferenceElement;
use crate::fem::QuadratureRule;
use crate::mesh::{CellGeometry, Point};

/// `J^{-T} g` for a reference gradient `g`.
#[inline]
pub fn physical_gradient(geo: &CellGeometry, g: [f64; 2]) -> [f64; 2] {
    let k = &geo.inverse_jacobian;
    [k[0][0] * g[0] + k[1][0] * g[1], k[0][1] * g[0] + k[1][1] * g[1]]
}

/// Trace of `J^{-T} H J^{-1}` for a reference Hessian `H`.
#[inline]
pub fn physical_laplacian(geo: &CellGeometry, h: [[f64; 2]; 2]) -> f64 {
    let k = &geo.inverse_jacobian;
    let mut lap = 0.0;
    for r in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                lap += k[a][r] * h[a][b] * k[b][r];
            }
        }
    }
    lap
}

/// Reference basis values, gradients and Hessians on every point of a rule,
/// stored point-major.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub n_basis: usize,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    values: Vec<f64>,
    gradients: Vec<[f64; 2]>,
    hessians: Vec<[[f64; 2]; 2]>,
}

impl Tabulation {
    pub fn new(element: &ReferenceElement, rule: &QuadratureRule) -> Self {
        let n_basis = element.n_basis();
        let mut values = Vec::with_capacity(n_basis * rule.len());
        let mut gradients = Vec::with_capacity(n_basis * rule.len());
        let mut hessians = Vec::with_capacity(n_basis * rule.len());
        for &p in &rule.points {
            let e = element.eval(p);
            values.extend(e.values);
            gradients.extend(e.gradients);
            hessians.extend(e.hessians);
        }
        Self {
            n_basis,
            points: rule.points.clone(),
            weights: rule.weights.clone(),
            values,
            gradients,
            hessians,
        }
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_basis..(q + 1) * self.n_basis]
    }
}

/// Basis functions of one element mapped to a physical cell, reused across
/// cells to avoid reallocation.
#[derive(Clone, Debug)]
pub struct CellBasis {
    pub n_basis: usize,
    /// Physical quadrature points.
    pub points: Vec<Point>,
    /// Quadrature weight times `|det J|`.
    pub jxw: Vec<f64>,
    values: Vec<f64>,
    gradients: Vec<[f64; 2]>,
    laplacians: Vec<f64>,
}

impl CellBasis {
    pub fn new(tab: &Tabulation) -> Self {
        let n = tab.n_basis * tab.n_points();
        Self {
            n_basis: tab.n_basis,
            points: vec![[0.0; 2]; tab.n_points()],
            jxw: vec![0.0; tab.n_points()],
            values: tab.values.clone(),
            gradients: vec![[0.0; 2]; n],
            laplacians: vec![0.0; n],
        }
    }

    pub fn reinit(&mut self, tab: &Tabulation, geo: &CellGeometry) {
        let det = geo.det();
        for q in 0..tab.n_points() {
            self.points[q] = geo.map(tab.points[q]);
            self.jxw[q] = tab.weights[q] * det;
        }
        for (i, (g, h)) in tab.gradients.iter().zip(&tab.hessians).enumerate() {
            self.gradients[i] = physical_gradient(geo, *g);
            self.laplacians[i] = physical_laplacian(geo, *h);
        }
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_basis..(q + 1) * self.n_basis]
    }

    pub fn gradients(&self, q: usize) -> &[[f64; 2]] {
        &self.gradients[q * self.n_basis..(q + 1) * self.n_basis]
    }

    pub fn laplacians(&self, q: usize) -> &[f64] {
        &self.laplacians[q * self.n_basis..(q + 1) * self.n_basis]
    }

    /// Value, gradient and Laplacian at point `q` of the finite element
    /// function with the given local coefficients.
    pub fn evaluate(&self, q: usize, coeffs: impl Iterator<Item = f64>) -> (f64, [f64; 2], f64) {
        let (mut v, mut g, mut l) = (0.0, [0.0; 2], 0.0);
        for (((c, phi), dphi), lap) in coeffs
            .zip(self.values(q))
            .zip(self.gradients(q))
            .zip(self.laplacians(q))
        {
            v += c * phi;
            g[0] += c * dphi[0];
            g[1] += c * dphi[1];
            l += c * lap;
        }
        (v, g, l)
    }
}
