//! Interpolation-error diagnostics behind the estimator's upper bound,
//! evaluated with nodal interpolation of a known solution.

use serde::{Deserialize, Serialize};

use crate::assembly::{interpolate_exact, DiscreteSolution};
use crate::error::Result;
use crate::estimator::fields::{eval_at, CellFields};
use crate::estimator::norms::NormReport;
use crate::fem::{make_quadrature, Discretization, PairKind};
use crate::problem::ProblemData;
use crate::stabilization::StabilizationParams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// `2 ||(u - u_h, p - p_h)||_spg^2`, the common right-hand side.
    pub two_spg_sq: f64,
    /// `sum_K delta_K^{-1} ||u - I u||^2_K`.
    pub l2_delta: f64,
    /// `sum_K delta_K^alpha ||grad(u - I u)||^2_K`.
    pub h1_delta: f64,
    /// `sum_F ||b||^2_{L^inf(F)} ||u - I u||^2_F`.
    pub facet_b: f64,
    /// `sum_K delta_K ||(b.grad)(u - I u) + grad(p - I p)||^2_K`.
    pub supg: f64,
    /// `||u - I u||^2_{L^2}`.
    pub velocity_interp_sq: f64,
    /// `||p - I p||^2_{L^2}`.
    pub pressure_interp_sq: f64,
    /// Right-hand side of the pressure hypothesis, squared: `4 ||u - I u||^2`
    /// for equal order pairs, `4 h^{-2} ||u - I u||^2` for inf-sup pairs.
    pub pressure_bound_sq: f64,
    /// The derived form: `8 max delta ||e||_spg^2`, resp. with `h^{-2}`.
    pub pressure_derived_bound_sq: f64,
    /// `16 sum delta c_inv^2 nu^2 h_K^{-2} ||grad(u - I u)||^2_K
    /// + 8 sum delta nu^2 ||Lap(u - I u)||^2_K`.
    pub trailing: f64,
    pub alpha: u8,
}

/// One inequality `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl HypothesisCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

impl HypothesisReport {
    pub fn checks(&self) -> Vec<HypothesisCheck> {
        let c = |name, lhs, rhs| HypothesisCheck { name, lhs, rhs };
        vec![
            c("l2_delta", self.l2_delta, self.two_spg_sq),
            c("h1_delta", self.h1_delta, self.two_spg_sq),
            c("facet_b", self.facet_b, self.two_spg_sq),
            c("supg", self.supg, self.two_spg_sq),
            c("pressure", self.pressure_interp_sq, self.pressure_bound_sq),
            c("pressure_derived", self.pressure_interp_sq, self.pressure_derived_bound_sq),
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.checks().iter().all(HypothesisCheck::holds)
    }
}

/// Evaluates every hypothesis for the nodal interpolant of the exact solution
/// and the error norm of `sol` (only `norm` is used from the discrete
/// solution).
pub fn hypothesis_diagnostics(
    disc: &Discretization,
    data: &ProblemData,
    params: &StabilizationParams,
    norm: &NormReport,
) -> Result<HypothesisReport> {
    params.check(disc)?;
    let exact = data.exact("hypothesis diagnostics")?;
    let interp: DiscreteSolution = interpolate_exact(disc, data)?;
    let k = disc.space.velocity_degree();
    let degree = 2 * k + 4;
    let h = disc.h();
    let nu = data.nu;
    let kind = disc.space.kind();
    let alpha = u8::from(nu < h && kind == PairKind::EqualOrder);
    let c_inv = params.constants.c_inv;

    let mut r = HypothesisReport {
        two_spg_sq: 2.0 * norm.spg * norm.spg,
        alpha,
        ..Default::default()
    };
    let mut fields = CellFields::new(disc, degree)?;
    for cell in 0..disc.n_cells() {
        fields.reinit(disc, cell);
        let delta = params.delta[cell];
        let hk = disc.geometry(cell).diameter;
        let d_alpha = if alpha == 1 { delta } else { 1.0 };
        let (mut l2, mut h1, mut lap, mut supg) = (0.0, 0.0, 0.0, 0.0);
        for q in 0..fields.n_points() {
            let x = fields.point(q);
            let w = fields.jxw(q);
            let v = fields.values(disc, &interp, q);
            let (u, gu, lu, p, gp) = (
                exact.velocity(x),
                exact.velocity_gradient(x),
                exact.velocity_laplacian(x),
                exact.pressure(x),
                exact.pressure_gradient(x),
            );
            let b = (data.b)(x);
            let mut grad_sq = 0.0;
            for c in 0..2 {
                let e = u[c] - v.u[c];
                l2 += w * e * e;
                for d in 0..2 {
                    grad_sq += (gu[c][d] - v.grad_u[c][d]).powi(2);
                }
                lap += w * (lu[c] - v.lap_u[c]).powi(2);
                let s = b[0] * (gu[c][0] - v.grad_u[c][0]) + b[1] * (gu[c][1] - v.grad_u[c][1]) + (gp[c] - v.grad_p[c]);
                supg += w * s * s;
            }
            h1 += w * grad_sq;
            r.pressure_interp_sq += w * (p - v.p).powi(2);
        }
        r.velocity_interp_sq += l2;
        r.l2_delta += l2 / delta;
        r.h1_delta += d_alpha * h1;
        r.supg += delta * supg;
        r.trailing += 16.0 * delta * c_inv * c_inv * nu * nu / (hk * hk) * h1 + 8.0 * delta * nu * nu * lap;
    }

    let mesh = &disc.mesh;
    let rule = make_quadrature(degree)?;
    for (fi, fct) in mesh.facets().iter().enumerate() {
        let [a, b] = fct.vertices.map(|v| mesh.vertices()[v]);
        let len = mesh.facet_length(fi);
        let (mut b_sup, mut e_sq): (f64, f64) = (0.0, 0.0);
        for (&t, &w) in rule.edge_points.iter().zip(&rule.edge_weights) {
            let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            let bx = (data.b)(x);
            b_sup = b_sup.max(bx[0].hypot(bx[1]));
            let u = exact.velocity(x);
            let iu = eval_at(disc, &interp, fct.cells.0, x).u;
            e_sq += w * len * ((u[0] - iu[0]).powi(2) + (u[1] - iu[1]).powi(2));
        }
        r.facet_b += b_sup * b_sup * e_sq;
    }

    let spg_sq = norm.spg * norm.spg;
    match kind {
        PairKind::EqualOrder => {
            r.pressure_bound_sq = 4.0 * r.velocity_interp_sq;
            r.pressure_derived_bound_sq = 8.0 * params.max_delta() * spg_sq;
        }
        PairKind::InfSupStable => {
            r.pressure_bound_sq = 4.0 / (h * h) * r.velocity_interp_sq;
            r.pressure_derived_bound_sq = 8.0 / (h * h) * params.max_delta() * spg_sq;
        }
    }
    Ok(r)
}
