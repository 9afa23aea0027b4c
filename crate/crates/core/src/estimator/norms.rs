use serde::{Deserialize, Serialize};

use crate::assembly::DiscreteSolution;
use crate::error::{Error, Result};
use crate::estimator::fields::CellFields;
use crate::estimator::residual::ErrorEstimate;
use crate::fem::Discretization;
use crate::problem::ProblemData;
use crate::stabilization::StabilizationParams;

/// Squared constituents and the resulting norms of the error
/// `(u - u_h, p - p_h)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    /// `nu ||grad e_u||^2`.
    pub viscous: f64,
    /// `||sigma^{1/2} e_u||^2`.
    pub reaction: f64,
    /// `sum_K mu_K ||div e_u||^2_K`.
    pub grad_div: f64,
    /// `sum_K delta_K ||(b.grad) e_u + grad e_p||^2_K`.
    pub supg: f64,
    /// Pressure jumps; identically zero for continuous pressure.
    pub jump: f64,
    pub spg: f64,
    /// `||e_p||^2_{L^2}`.
    pub pressure_l2_sq: f64,
    /// `max{1, nu^{-1/2}, ||sigma||_inf^{1/2}}`.
    pub omega_pres: f64,
    pub spg_p: f64,
    /// `sum_K delta_K ||grad e_p||^2_K`.
    pub pressure_gradient: f64,
    /// Navier-Stokes norm, filled by [`spg_nse_norm`].
    pub spg_nse: Option<f64>,
}

impl NormReport {
    /// The norm the estimator is compared with.
    pub fn primary(&self) -> f64 {
        self.spg_nse.unwrap_or(self.spg)
    }
}

/// `||(u - u_h, p - p_h)||_spg` and `||.||_{spg,p}` by quadrature of degree
/// `2k + 4` (or `quad_degree`).
pub fn spg_error_norm(
    disc: &Discretization,
    data: &ProblemData,
    params: &StabilizationParams,
    sol: &DiscreteSolution,
    quad_degree: Option<usize>,
) -> Result<NormReport> {
    params.check(disc)?;
    sol.check(disc)?;
    let exact = data.exact("the error norm")?;
    let degree = quad_degree.unwrap_or(2 * disc.space.velocity_degree() + 4);
    let mut fields = CellFields::new(disc, degree)?;
    let mut r = NormReport::default();
    let mut sigma_sup: f64 = 0.0;
    for cell in 0..disc.n_cells() {
        fields.reinit(disc, cell);
        let (delta, mu) = (params.delta[cell], params.mu[cell]);
        for q in 0..fields.n_points() {
            let x = fields.point(q);
            let w = fields.jxw(q);
            let v = fields.values(disc, sol, q);
            let (u, gu, p, gp) = (exact.velocity(x), exact.velocity_gradient(x), exact.pressure(x), exact.pressure_gradient(x));
            let e = [u[0] - v.u[0], u[1] - v.u[1]];
            let ge = [
                [gu[0][0] - v.grad_u[0][0], gu[0][1] - v.grad_u[0][1]],
                [gu[1][0] - v.grad_u[1][0], gu[1][1] - v.grad_u[1][1]],
            ];
            let ep = p - v.p;
            let gep = [gp[0] - v.grad_p[0], gp[1] - v.grad_p[1]];
            let b = (data.b)(x);
            let s = (data.sigma)(x);
            sigma_sup = sigma_sup.max(s.abs());
            let grad_sq: f64 = ge.iter().flatten().map(|g| g * g).sum();
            let div = ge[0][0] + ge[1][1];
            let streamline: [f64; 2] = std::array::from_fn(|c| b[0] * ge[c][0] + b[1] * ge[c][1] + gep[c]);
            r.viscous += w * data.nu * grad_sq;
            r.reaction += w * s * (e[0] * e[0] + e[1] * e[1]);
            r.grad_div += w * mu * div * div;
            r.supg += w * delta * (streamline[0].powi(2) + streamline[1].powi(2));
            r.pressure_l2_sq += w * ep * ep;
            r.pressure_gradient += w * delta * (gep[0] * gep[0] + gep[1] * gep[1]);
        }
    }
    let spg_sq = r.viscous + r.reaction + r.grad_div + r.supg + r.jump;
    r.spg = spg_sq.sqrt();
    r.omega_pres = 1f64.max(data.nu.powf(-0.5)).max(sigma_sup.sqrt());
    r.spg_p = (spg_sq + r.pressure_l2_sq / (r.omega_pres * r.omega_pres)).sqrt();
    Ok(r)
}

/// `(nu ||grad e_u||^2 + nu ||e_p||^2 + sum mu_K ||div e_u||^2_K
/// + sum delta_K ||grad e_p||^2_K)^{1/2}` together with the Oseen norms.
pub fn spg_nse_norm(
    disc: &Discretization,
    data: &ProblemData,
    params: &StabilizationParams,
    sol: &DiscreteSolution,
    quad_degree: Option<usize>,
) -> Result<NormReport> {
    let mut r = spg_error_norm(disc, data, params, sol, quad_degree)?;
    r.spg_nse = Some((r.viscous + data.nu * r.pressure_l2_sq + r.grad_div + r.pressure_gradient).sqrt());
    Ok(r)
}

/// `eta / ||e||`, with the Navier-Stokes norm when present.
pub fn effectivity(estimate: &ErrorEstimate, norm: &NormReport) -> Result<f64> {
    let e = norm.primary();
    if e > 0.0 {
        Ok(estimate.eta / e)
    } else {
        Err(Error::ZeroErrorNorm)
    }
}
