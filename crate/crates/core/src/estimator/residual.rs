use serde::{Deserialize, Serialize};

use crate::assembly::DiscreteSolution;
use crate::error::{Error, Result};
use crate::estimator::fields::{eval_at, CellFields, PointValues};
use crate::fem::{make_quadrature, Discretization, PairKind};
use crate::mesh::{BoundaryKind, Point};
use crate::problem::ProblemData;
use crate::stabilization::StabilizationParams;

/// Space dimension, entering the grad-div term.
const DIM: f64 = 2.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimatorVariant {
    /// Linear Oseen problem with convection field `b` from the data.
    #[default]
    Oseen,
    /// Navier-Stokes: convection `u_h`, no reaction, `sigma_0 = 0`.
    NavierStokes,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EstimatorOptions {
    pub variant: EstimatorVariant,
    /// Quadrature exactness; defaults to `2k + 4`.
    pub quad_degree: Option<usize>,
}

/// Global squared aggregates of the five estimator parts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub res: f64,
    pub div: f64,
    pub facet: f64,
    pub delta: f64,
    pub mu: f64,
}

impl Components {
    pub fn sum(&self) -> f64 {
        self.res + self.div + self.facet + self.delta + self.mu
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorEstimate {
    /// Squared contributions per cell.
    pub cell_res: Vec<f64>,
    pub cell_delta: Vec<f64>,
    pub cell_mu: Vec<f64>,
    /// Share of the global divergence term attributed to each cell,
    /// proportional to `||div u_h||^2_K`.
    pub cell_div: Vec<f64>,
    /// Squared contribution per facet.
    pub facet: Vec<f64>,
    /// `||r_K||^2_{L^2(K)}` and `||div u_h||^2_{L^2(K)}`.
    pub residual_sq: Vec<f64>,
    pub divergence_sq: Vec<f64>,
    pub totals: Components,
    pub eta: f64,
    pub alpha: u8,
}

impl ErrorEstimate {
    /// Square roots of the component aggregates, in the order
    /// `res, div, F, delta, mu`.
    pub fn component_norms(&self) -> [f64; 5] {
        let t = self.totals;
        [t.res, t.div, t.facet, t.delta, t.mu].map(f64::sqrt)
    }
}

/// `r_K = f + nu Lap u_h - (b.grad) u_h - sigma u_h - grad p_h`.
fn cell_residual_from(v: &PointValues, f: [f64; 2], b: [f64; 2], sigma: f64, nu: f64) -> [f64; 2] {
    std::array::from_fn(|c| {
        f[c] + nu * v.lap_u[c] - (b[0] * v.grad_u[c][0] + b[1] * v.grad_u[c][1]) - sigma * v.u[c] - v.grad_p[c]
    })
}

fn convection_at(data: &ProblemData, variant: EstimatorVariant, v: &PointValues, x: Point) -> [f64; 2] {
    match variant {
        EstimatorVariant::Oseen => (data.b)(x),
        EstimatorVariant::NavierStokes => v.u,
    }
}

fn reaction_at(data: &ProblemData, variant: EstimatorVariant, x: Point) -> f64 {
    match variant {
        EstimatorVariant::Oseen => (data.sigma)(x),
        EstimatorVariant::NavierStokes => 0.0,
    }
}

/// Cell residual at a physical point of `cell`.
pub fn cell_residual(
    disc: &Discretization,
    data: &ProblemData,
    sol: &DiscreteSolution,
    variant: EstimatorVariant,
    cell: usize,
    x: Point,
) -> [f64; 2] {
    let v = eval_at(disc, sol, cell, x);
    cell_residual_from(&v, (data.f)(x), convection_at(data, variant, &v, x), reaction_at(data, variant, x), data.nu)
}

/// `(-nu grad u_h + p_h I) n` from one side of a facet.
fn flux(v: &PointValues, nu: f64, n: Point) -> [f64; 2] {
    std::array::from_fn(|c| -nu * (v.grad_u[c][0] * n[0] + v.grad_u[c][1] * n[1]) + v.p * n[c])
}

/// Facet residual at a point `x` on facet `facet`: the normal flux jump on
/// interior facets, the Neumann defect on Neumann facets, zero on Dirichlet
/// facets.
pub fn facet_residual(disc: &Discretization, data: &ProblemData, sol: &DiscreteSolution, facet: usize, x: Point) -> [f64; 2] {
    let mesh = &disc.mesh;
    let fct = &mesh.facets()[facet];
    let n = mesh.facet_normal(facet);
    match (fct.cells.1, fct.boundary) {
        (Some(c1), _) => {
            let a = flux(&eval_at(disc, sol, fct.cells.0, x), data.nu, n);
            let b = flux(&eval_at(disc, sol, c1, x), data.nu, n);
            [a[0] - b[0], a[1] - b[1]]
        }
        (None, Some(BoundaryKind::Neumann)) => {
            let g = (data.g)(x, n);
            let t = flux(&eval_at(disc, sol, fct.cells.0, x), data.nu, n);
            // g - (nu grad u_h - p_h I) n = g + flux
            [g[0] + t[0], g[1] + t[1]]
        }
        _ => [0.0; 2],
    }
}

/// `min` over the finite entries; `None` entries are dropped.
fn min_finite(entries: &[Option<f64>]) -> f64 {
    entries
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min)
}

/// Weight of `||r_F||^2` in `eta_F^2`.
pub fn facet_weight(h: f64, nu: f64, sigma0: f64, b_sup: f64) -> f64 {
    let s = (sigma0 > 0.0).then_some(sigma0);
    min_finite(&[
        Some(h / nu),
        s.map(|s| 1.0 / (h * s)),
        s.map(|s| 1.0 / (nu.sqrt() * s.sqrt())),
        (b_sup > 0.0).then(|| 40.0 / (b_sup * b_sup)),
    ])
}

/// Weight of `||r_K||^2` in `eta_{K,res}^2`.
pub fn residual_weight(h: f64, nu: f64, sigma0: f64, delta: f64) -> f64 {
    min_finite(&[(sigma0 > 0.0).then(|| 1.0 / sigma0), Some(h * h / nu), Some(40.0 * delta)])
}

/// Weight of `||div u_h||^2_K` in `eta_{K,mu}^2`.
pub fn grad_div_weight(mu: f64, delta: f64, nu: f64, alpha: u8) -> f64 {
    let d_alpha = if alpha == 1 { delta } else { 1.0 };
    (40.0 * DIM * mu * mu / d_alpha).min(DIM * mu * mu / nu)
}

pub fn estimate(disc: &Discretization, data: &ProblemData, params: &StabilizationParams, sol: &DiscreteSolution) -> Result<ErrorEstimate> {
    estimate_with(disc, data, params, sol, &EstimatorOptions::default())
}

/// The residual estimator with all constants equal to one.
pub fn estimate_with(
    disc: &Discretization,
    data: &ProblemData,
    params: &StabilizationParams,
    sol: &DiscreteSolution,
    opts: &EstimatorOptions,
) -> Result<ErrorEstimate> {
    params.check(disc)?;
    sol.check(disc)?;
    if !(data.nu > 0.0) {
        return Err(Error::InvalidInput("the estimator needs nu > 0".into()));
    }
    let variant = opts.variant;
    let nu = data.nu;
    let sigma0 = match variant {
        EstimatorVariant::Oseen => data.sigma0,
        EstimatorVariant::NavierStokes => 0.0,
    };
    let k = disc.space.velocity_degree();
    let degree = opts.quad_degree.unwrap_or(2 * k + 4);
    let n_cells = disc.n_cells();
    let h_global = disc.h();
    let kind = disc.space.kind();
    let alpha = u8::from(nu < h_global && kind == PairKind::EqualOrder);

    let mut residual_sq = vec![0.0; n_cells];
    let mut divergence_sq = vec![0.0; n_cells];
    let mut fields = CellFields::new(disc, degree)?;
    for cell in 0..n_cells {
        fields.reinit(disc, cell);
        for q in 0..fields.n_points() {
            let x = fields.point(q);
            let w = fields.jxw(q);
            let v = fields.values(disc, sol, q);
            let r = cell_residual_from(&v, (data.f)(x), convection_at(data, variant, &v, x), reaction_at(data, variant, x), nu);
            residual_sq[cell] += w * (r[0] * r[0] + r[1] * r[1]);
            divergence_sq[cell] += w * v.div_u().powi(2);
        }
    }

    let mut cell_res = Vec::with_capacity(n_cells);
    let mut cell_delta = Vec::with_capacity(n_cells);
    let mut cell_mu = Vec::with_capacity(n_cells);
    for cell in 0..n_cells {
        let h = disc.geometry(cell).diameter;
        let (delta, mu) = (params.delta[cell], params.mu[cell]);
        cell_res.push(residual_weight(h, nu, sigma0, delta) * residual_sq[cell]);
        cell_delta.push(40.0 * delta * residual_sq[cell]);
        cell_mu.push(grad_div_weight(mu, delta, nu, alpha) * divergence_sq[cell]);
    }

    let div_total: f64 = divergence_sq.iter().sum();
    let div_factor = match kind {
        PairKind::EqualOrder => 160.0 * params.max_delta(),
        PairKind::InfSupStable => 160.0 / (h_global * h_global) * params.max_delta(),
    };
    let div_global = div_factor * div_total;
    let cell_div: Vec<f64> = if div_total > 0.0 {
        divergence_sq.iter().map(|d| div_global * d / div_total).collect()
    } else {
        vec![0.0; n_cells]
    };

    let facet = facet_contributions(disc, data, sol, variant, sigma0, degree)?;

    let totals = Components {
        res: cell_res.iter().sum(),
        div: div_global,
        facet: facet.iter().sum(),
        delta: cell_delta.iter().sum(),
        mu: cell_mu.iter().sum(),
    };
    Ok(ErrorEstimate {
        cell_res,
        cell_delta,
        cell_mu,
        cell_div,
        facet,
        residual_sq,
        divergence_sq,
        eta: totals.sum().sqrt(),
        totals,
        alpha,
    })
}

fn facet_contributions(
    disc: &Discretization,
    data: &ProblemData,
    sol: &DiscreteSolution,
    variant: EstimatorVariant,
    sigma0: f64,
    degree: usize,
) -> Result<Vec<f64>> {
    let mesh = &disc.mesh;
    let rule = make_quadrature(degree)?;
    let mut out = Vec::with_capacity(mesh.n_facets());
    for (fi, fct) in mesh.facets().iter().enumerate() {
        if !fct.is_interior() && fct.boundary != Some(BoundaryKind::Neumann) {
            out.push(0.0);
            continue;
        }
        let [a, b] = fct.vertices.map(|v| mesh.vertices()[v]);
        let len = mesh.facet_length(fi);
        let mut r_sq = 0.0;
        let mut b_sup: f64 = 0.0;
        for (&t, &w) in rule.edge_points.iter().zip(&rule.edge_weights) {
            let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            let r = facet_residual(disc, data, sol, fi, x);
            r_sq += w * len * (r[0] * r[0] + r[1] * r[1]);
            let bx = match variant {
                EstimatorVariant::Oseen => (data.b)(x),
                EstimatorVariant::NavierStokes => eval_at(disc, sol, fct.cells.0, x).u,
            };
            b_sup = b_sup.max(bx[0].hypot(bx[1]));
        }
        let h = match fct.cells.1 {
            Some(c1) => disc.geometry(fct.cells.0).diameter.max(disc.geometry(c1).diameter),
            None => disc.geometry(fct.cells.0).diameter,
        };
        out.push(facet_weight(h, data.nu, sigma0, b_sup) * r_sq);
    }
    Ok(out)
}
