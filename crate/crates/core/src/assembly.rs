//! Assembly of the SUPG/PSPG/grad-div stabilized Oseen system.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fem::{make_quadrature, CellBasis, Discretization, SpacePair, SystemLayout, Tabulation};
use crate::mesh::{BoundaryKind, Point};
use crate::problem::{ProblemData, VectorField};
use crate::solver::{solve, SolveReport, SolverConfig};
use crate::sparse::{norm2, CsrMatrix};
use crate::stabilization::StabilizationParams;

/// Where the convection field `b` comes from.
#[derive(Clone, Copy)]
pub enum Convection<'a> {
    /// A closed-form field.
    Field(&'a VectorField),
    /// A finite element velocity, e.g. the previous Picard iterate.
    Discrete(&'a [Vec<f64>; 2]),
    Zero,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AssemblyOptions {
    /// Quadrature exactness; defaults to `2k + 2` for velocity degree `k`.
    pub quad_degree: Option<usize>,
}

impl AssemblyOptions {
    pub fn degree(&self, space: SpacePair) -> usize {
        self.quad_degree.unwrap_or(2 * space.velocity_degree() + 2)
    }
}

#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub layout: SystemLayout,
    pub dirichlet_applied: bool,
}

impl LinearSystem {
    /// Writes `<stem>.mtx` and `<stem>_rhs.mtx`.
    pub fn dump_matrix_market(&self, dir: &Path, stem: &str) -> Result<()> {
        let file = std::fs::File::create(dir.join(format!("{stem}.mtx")))?;
        self.matrix.write_matrix_market(std::io::BufWriter::new(file))?;
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("{stem}_rhs.mtx")))?);
        writeln!(w, "%%MatrixMarket matrix array real general")?;
        writeln!(w, "{} 1", self.rhs.len())?;
        for v in &self.rhs {
            writeln!(w, "{v:.17e}")?;
        }
        Ok(())
    }

    /// Solves the system. A dense mean-value row ruins the fill of a pivoted
    /// sparse LU, so the multiplier row is replaced by `p_0 = 0`. Constant
    /// pressures lie in the kernel of all other rows, hence shifting the
    /// pressure to zero mean afterwards gives the constrained solution.
    pub fn solve(&self, config: &SolverConfig) -> Result<SolveReport> {
        let l = self.layout;
        let Some(m) = l.multiplier_index() else {
            return Ok(solve(&self.matrix, &self.rhs, config)?);
        };
        let p0 = l.pressure_offset();
        let pinned = self.matrix.with_row(m, &[(p0, 1.0)]);
        let mut rhs = self.rhs.clone();
        rhs[m] = 0.0;
        let mut report = solve(&pinned, &rhs, config)?;
        let x = &mut report.solution;
        let weights: Vec<f64> = (0..l.n_pressure).map(|i| self.matrix.get(m, p0 + i)).collect();
        let total: f64 = weights.iter().sum();
        let mean = weights.iter().zip(&x[p0..p0 + l.n_pressure]).map(|(w, p)| w * p).sum::<f64>() / total;
        for p in &mut x[p0..p0 + l.n_pressure] {
            *p -= mean;
        }
        let b = norm2(&self.rhs);
        let r = norm2(&self.residual(x));
        report.relative_residual = if b > 0.0 { r / b } else { r };
        report.nnz = self.matrix.nnz();
        Ok(report)
    }

    /// `A x - F`.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .mul_vec(x)
            .into_iter()
            .zip(&self.rhs)
            .map(|(ax, f)| ax - f)
            .collect()
    }
}

/// Velocity and pressure coefficients of a discrete solution.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSolution {
    pub space: SpacePair,
    pub velocity: [Vec<f64>; 2],
    pub pressure: Vec<f64>,
    /// Lagrange multiplier of the pressure mean constraint, if present.
    pub multiplier: f64,
}

impl DiscreteSolution {
    pub fn zero(disc: &Discretization) -> Self {
        let l = disc.layout();
        Self {
            space: disc.space,
            velocity: [vec![0.0; l.n_velocity], vec![0.0; l.n_velocity]],
            pressure: vec![0.0; l.n_pressure],
            multiplier: 0.0,
        }
    }

    pub fn from_vector(disc: &Discretization, x: &[f64]) -> Result<Self> {
        let l = disc.layout();
        if x.len() != l.n_unknowns() {
            return Err(Error::Inconsistent(format!(
                "vector of length {} for {} unknowns",
                x.len(),
                l.n_unknowns()
            )));
        }
        let nv = l.n_velocity;
        Ok(Self {
            space: disc.space,
            velocity: [x[..nv].to_vec(), x[nv..2 * nv].to_vec()],
            pressure: x[2 * nv..2 * nv + l.n_pressure].to_vec(),
            multiplier: l.multiplier_index().map_or(0.0, |m| x[m]),
        })
    }

    pub fn to_vector(&self, layout: SystemLayout) -> Vec<f64> {
        let mut x = Vec::with_capacity(layout.n_unknowns());
        x.extend_from_slice(&self.velocity[0]);
        x.extend_from_slice(&self.velocity[1]);
        x.extend_from_slice(&self.pressure);
        if layout.mean_constraint {
            x.push(self.multiplier);
        }
        x
    }

    pub fn check(&self, disc: &Discretization) -> Result<()> {
        let l = disc.layout();
        if self.space != disc.space || self.velocity[0].len() != l.n_velocity || self.pressure.len() != l.n_pressure {
            return Err(Error::Inconsistent("solution does not belong to this discretization".into()));
        }
        Ok(())
    }
}

/// Global indices of the local unknowns `[u_1 | u_2 | p]` of one cell.
pub(crate) fn local_indices(disc: &Discretization, cell: usize, out: &mut Vec<usize>) {
    let l = disc.layout();
    out.clear();
    let vd = disc.dofs.velocity.cell_dofs(cell);
    out.extend(vd.iter().copied());
    out.extend(vd.iter().map(|&g| g + l.n_velocity));
    out.extend(disc.dofs.pressure.cell_dofs(cell).iter().map(|&g| g + l.pressure_offset()));
}

fn sparsity(disc: &Discretization) -> CsrMatrix {
    let l = disc.layout();
    let n = l.n_unknowns();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut idx = Vec::new();
    for cell in 0..disc.n_cells() {
        local_indices(disc, cell, &mut idx);
        for &r in &idx {
            rows[r].extend_from_slice(&idx);
        }
    }
    if let Some(m) = l.multiplier_index() {
        for p in 0..l.n_pressure {
            rows[l.pressure_offset() + p].push(m);
            rows[m].push(l.pressure_offset() + p);
        }
    }
    CsrMatrix::from_pattern(n, rows)
}

/// Evaluates a finite element function with global coefficients `coeffs` at
/// quadrature point `q` of `basis`.
fn eval_fe(basis: &CellBasis, q: usize, dofs: &[usize], coeffs: &[f64]) -> (f64, [f64; 2], f64) {
    basis.evaluate(q, dofs.iter().map(|&g| coeffs[g]))
}

/// Assembles matrix and right-hand side of the stabilized problem without
/// boundary conditions.
pub fn assemble(
    disc: &Discretization,
    data: &ProblemData,
    params: &StabilizationParams,
    convection: Convection<'_>,
    opts: &AssemblyOptions,
) -> Result<LinearSystem> {
    params.check(disc)?;
    if let Convection::Discrete(u) = convection {
        if u[0].len() != disc.layout().n_velocity || u[1].len() != disc.layout().n_velocity {
            return Err(Error::Inconsistent("convection coefficients do not match the velocity space".into()));
        }
    }
    let layout = disc.layout();
    let rule = make_quadrature(opts.degree(disc.space))?;
    let vtab = Tabulation::new(disc.dofs.velocity.element(), &rule);
    let ptab = Tabulation::new(disc.dofs.pressure.element(), &rule);
    let mut vb = CellBasis::new(&vtab);
    let mut pb = CellBasis::new(&ptab);
    let nu_l = vtab.n_basis;
    let np_l = ptab.n_basis;
    let nl = 2 * nu_l + np_l;

    let mut matrix = sparsity(disc);
    let mut rhs = vec![0.0; layout.n_unknowns()];
    let mut mean = vec![0.0; layout.n_pressure];
    let mut local = vec![0.0; nl * nl];
    let mut local_rhs = vec![0.0; nl];
    let mut local_mean = vec![0.0; np_l];
    let mut idx = Vec::with_capacity(nl);
    let mut bg = vec![0.0; nu_l];
    let mut res = vec![0.0; nu_l];
    let nu = data.nu;

    for cell in 0..disc.n_cells() {
        let geo = disc.geometry(cell);
        vb.reinit(&vtab, geo);
        pb.reinit(&ptab, geo);
        local.fill(0.0);
        local_rhs.fill(0.0);
        local_mean.fill(0.0);
        let (delta, mu) = (params.delta[cell], params.mu[cell]);
        let vdofs = disc.dofs.velocity.cell_dofs(cell);

        for q in 0..vb.n_points() {
            let x = vb.points[q];
            let w = vb.jxw[q];
            let b = match convection {
                Convection::Field(f) => f(x),
                Convection::Discrete(u) => [eval_fe(&vb, q, vdofs, &u[0]).0, eval_fe(&vb, q, vdofs, &u[1]).0],
                Convection::Zero => [0.0; 2],
            };
            let s = (data.sigma)(x);
            let f = (data.f)(x);
            let (phi, dphi, lphi) = (vb.values(q), vb.gradients(q), vb.laplacians(q));
            let (psi, dpsi) = (pb.values(q), pb.gradients(q));
            for i in 0..nu_l {
                bg[i] = b[0] * dphi[i][0] + b[1] * dphi[i][1];
                res[i] = -nu * lphi[i] + bg[i] + s * phi[i];
            }

            for i in 0..nu_l {
                let test = phi[i] + delta * bg[i];
                for d in 0..2 {
                    local_rhs[d * nu_l + i] += w * f[d] * test;
                }
                for j in 0..nu_l {
                    let a = nu * (dphi[i][0] * dphi[j][0] + dphi[i][1] * dphi[j][1])
                        + (bg[j] + s * phi[j]) * phi[i]
                        + delta * res[j] * bg[i];
                    for d in 0..2 {
                        let row = (d * nu_l + i) * nl;
                        local[row + d * nu_l + j] += w * a;
                        for c in 0..2 {
                            local[row + c * nu_l + j] += w * mu * dphi[j][c] * dphi[i][d];
                        }
                    }
                }
                for j in 0..np_l {
                    for d in 0..2 {
                        local[(d * nu_l + i) * nl + 2 * nu_l + j] +=
                            w * (-dphi[i][d] * psi[j] + delta * dpsi[j][d] * bg[i]);
                    }
                }
            }
            for i in 0..np_l {
                let row = (2 * nu_l + i) * nl;
                local_rhs[2 * nu_l + i] += w * delta * (f[0] * dpsi[i][0] + f[1] * dpsi[i][1]);
                local_mean[i] += w * psi[i];
                for j in 0..nu_l {
                    for c in 0..2 {
                        local[row + c * nu_l + j] += w * (dphi[j][c] * psi[i] + delta * res[j] * dpsi[i][c]);
                    }
                }
                for j in 0..np_l {
                    local[row + 2 * nu_l + j] += w * delta * (dpsi[j][0] * dpsi[i][0] + dpsi[j][1] * dpsi[i][1]);
                }
            }
        }

        local_indices(disc, cell, &mut idx);
        for (a, &r) in idx.iter().enumerate() {
            for (b, &c) in idx.iter().enumerate() {
                let v = local[a * nl + b];
                if v != 0.0 {
                    matrix.add(r, c, v);
                }
            }
            rhs[r] += local_rhs[a];
        }
        for (j, &g) in disc.dofs.pressure.cell_dofs(cell).iter().enumerate() {
            mean[g] += local_mean[j];
        }
    }

    assemble_neumann(disc, data, &mut rhs)?;

    if let Some(m) = layout.multiplier_index() {
        for (p, &v) in mean.iter().enumerate() {
            matrix.add(layout.pressure_offset() + p, m, v);
            matrix.add(m, layout.pressure_offset() + p, v);
        }
    }

    Ok(LinearSystem {
        matrix,
        rhs,
        layout,
        dirichlet_applied: false,
    })
}

/// `(g, v)_F` over Neumann facets.
fn assemble_neumann(disc: &Discretization, data: &ProblemData, rhs: &mut [f64]) -> Result<()> {
    let mesh = &disc.mesh;
    if !mesh.has_neumann_boundary() {
        return Ok(());
    }
    let nv = disc.layout().n_velocity;
    let element = disc.dofs.velocity.element();
    let rule = make_quadrature(2 * disc.space.velocity_degree() + 2)?;
    for (fi, facet) in mesh.facets().iter().enumerate() {
        if facet.boundary != Some(BoundaryKind::Neumann) {
            continue;
        }
        let cell = facet.cells.0;
        let geo = disc.geometry(cell);
        let [a, b] = facet.vertices.map(|v| mesh.vertices()[v]);
        let len = mesh.facet_length(fi);
        let n = mesh.facet_normal(fi);
        let dofs = disc.dofs.velocity.cell_dofs(cell);
        for (&t, &w) in rule.edge_points.iter().zip(&rule.edge_weights) {
            let x: Point = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            let g = (data.g)(x, n);
            let e = element.eval(geo.pull_back(x));
            for (i, &dof) in dofs.iter().enumerate() {
                for d in 0..2 {
                    rhs[d * nv + dof] += w * len * g[d] * e.values[i];
                }
            }
        }
    }
    Ok(())
}

/// Nodal values of the Dirichlet data at the velocity nodes, as
/// `(node, [g_1, g_2])`.
pub fn dirichlet_values(disc: &Discretization, data: &ProblemData) -> Vec<(usize, [f64; 2])> {
    let coords = disc.dofs.velocity.coords();
    disc.dofs
        .dirichlet_nodes()
        .iter()
        .map(|&n| (n, (data.dirichlet)(coords[n])))
        .collect()
}

/// Replaces Dirichlet rows by identity rows carrying the nodal boundary
/// values and moves the corresponding column entries to the right-hand side.
pub fn apply_dirichlet(system: &mut LinearSystem, disc: &Discretization, data: &ProblemData) {
    let l = system.layout;
    let n = l.n_unknowns();
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    for (node, g) in dirichlet_values(disc, data) {
        fixed[node] = Some(g[0]);
        fixed[l.n_velocity + node] = Some(g[1]);
    }
    for r in 0..n {
        let (cols, vals) = system.matrix.row_mut(r);
        if let Some(g) = fixed[r] {
            for (&c, v) in cols.iter().zip(vals.iter_mut()) {
                *v = if c == r { 1.0 } else { 0.0 };
            }
            system.rhs[r] = g;
        } else {
            let mut shift = 0.0;
            for (&c, v) in cols.iter().zip(vals.iter_mut()) {
                if let Some(g) = fixed[c] {
                    shift += *v * g;
                    *v = 0.0;
                }
            }
            system.rhs[r] -= shift;
        }
    }
    system.matrix.prune_zeros();
    system.dirichlet_applied = true;
}

/// Assemble, apply boundary conditions and solve.
pub fn solve_oseen(
    disc: &Discretization,
    data: &ProblemData,
    params: &StabilizationParams,
    convection: Convection<'_>,
    opts: &AssemblyOptions,
    solver: &SolverConfig,
) -> Result<(DiscreteSolution, SolveReport)> {
    let mut system = assemble(disc, data, params, convection, opts)?;
    apply_dirichlet(&mut system, disc, data);
    let report = system.solve(solver)?;
    Ok((DiscreteSolution::from_vector(disc, &report.solution)?, report))
}

/// Nodal interpolant of an exact solution as a discrete solution. The pressure
/// is shifted to zero mean when the mean constraint is active.
pub fn interpolate_exact(disc: &Discretization, data: &ProblemData) -> Result<DiscreteSolution> {
    let e = data.exact("interpolation")?;
    let velocity = disc.interpolate_velocity(|x| e.velocity(x), false);
    let pressure = disc.interpolate_pressure(|x| e.pressure(x), disc.layout().mean_constraint)?;
    Ok(DiscreteSolution {
        space: disc.space,
        velocity,
        pressure,
        multiplier: 0.0,
    })
}

/// Maximum number of stored entries in any row.
pub fn max_row_nnz(m: &CsrMatrix) -> usize {
    (0..m.n_rows()).map(|r| m.row(r).0.len()).max().unwrap_or(0)
}
