//! Pointwise evaluation of discrete solutions.

use crate::assembly::DiscreteSolution;
use crate::error::Result;
use crate::fem::{make_quadrature, physical_gradient, physical_laplacian, CellBasis, Discretization, Tabulation};
use crate::mesh::Point;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointValues {
    pub u: [f64; 2],
    /// `grad_u[c][d] = d u_c / d x_d`.
    pub grad_u: [[f64; 2]; 2],
    pub lap_u: [f64; 2],
    pub p: f64,
    pub grad_p: [f64; 2],
}

impl PointValues {
    pub fn div_u(&self) -> f64 {
        self.grad_u[0][0] + self.grad_u[1][1]
    }
}

/// Values of `(u_h, p_h)` at a physical point inside `cell`.
pub fn eval_at(disc: &Discretization, sol: &DiscreteSolution, cell: usize, x: Point) -> PointValues {
    let geo = disc.geometry(cell);
    let xi = geo.pull_back(x);
    let mut out = PointValues::default();
    let ve = disc.dofs.velocity.element().eval(xi);
    for (i, &g) in disc.dofs.velocity.cell_dofs(cell).iter().enumerate() {
        let dphi = physical_gradient(geo, ve.gradients[i]);
        let lap = physical_laplacian(geo, ve.hessians[i]);
        for c in 0..2 {
            let a = sol.velocity[c][g];
            out.u[c] += a * ve.values[i];
            out.grad_u[c][0] += a * dphi[0];
            out.grad_u[c][1] += a * dphi[1];
            out.lap_u[c] += a * lap;
        }
    }
    let pe = disc.dofs.pressure.element().eval(xi);
    for (i, &g) in disc.dofs.pressure.cell_dofs(cell).iter().enumerate() {
        let dpsi = physical_gradient(geo, pe.gradients[i]);
        out.p += sol.pressure[g] * pe.values[i];
        out.grad_p[0] += sol.pressure[g] * dpsi[0];
        out.grad_p[1] += sol.pressure[g] * dpsi[1];
    }
    out
}

/// Cellwise quadrature evaluation of a discrete solution.
pub struct CellFields {
    vtab: Tabulation,
    ptab: Tabulation,
    pub velocity: CellBasis,
    pub pressure: CellBasis,
    cell: usize,
}

impl CellFields {
    pub fn new(disc: &Discretization, degree: usize) -> Result<Self> {
        let rule = make_quadrature(degree)?;
        let vtab = Tabulation::new(disc.dofs.velocity.element(), &rule);
        let ptab = Tabulation::new(disc.dofs.pressure.element(), &rule);
        let velocity = CellBasis::new(&vtab);
        let pressure = CellBasis::new(&ptab);
        Ok(Self {
            vtab,
            ptab,
            velocity,
            pressure,
            cell: usize::MAX,
        })
    }

    pub fn reinit(&mut self, disc: &Discretization, cell: usize) {
        let geo = disc.geometry(cell);
        self.velocity.reinit(&self.vtab, geo);
        self.pressure.reinit(&self.ptab, geo);
        self.cell = cell;
    }

    pub fn n_points(&self) -> usize {
        self.velocity.n_points()
    }

    pub fn point(&self, q: usize) -> Point {
        self.velocity.points[q]
    }

    pub fn jxw(&self, q: usize) -> f64 {
        self.velocity.jxw[q]
    }

    /// Values at quadrature point `q` of the current cell.
    pub fn values(&self, disc: &Discretization, sol: &DiscreteSolution, q: usize) -> PointValues {
        let vd = disc.dofs.velocity.cell_dofs(self.cell);
        let pd = disc.dofs.pressure.cell_dofs(self.cell);
        let mut out = PointValues::default();
        for c in 0..2 {
            let (v, g, l) = self.velocity.evaluate(q, vd.iter().map(|&i| sol.velocity[c][i]));
            out.u[c] = v;
            out.grad_u[c] = g;
            out.lap_u[c] = l;
        }
        let (p, gp, _) = self.pressure.evaluate(q, pd.iter().map(|&i| sol.pressure[i]));
        out.p = p;
        out.grad_p = gp;
        out
    }
}
