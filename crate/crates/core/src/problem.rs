//! Coefficients and data of the Oseen problem
//! `-nu Lap u + (b.grad) u + sigma u + grad p = f`, `div u = 0`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{make_quadrature, Discretization};
use crate::mesh::Point;

pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
/// Neumann data as a function of position and outward unit normal.
pub type FluxField = Arc<dyn Fn(Point, Point) -> [f64; 2] + Send + Sync>;

/// A closed-form solution with the derivatives needed for error norms,
/// manufactured right-hand sides and interpolation diagnostics.
pub trait ExactSolution: Send + Sync {
    fn velocity(&self, x: Point) -> [f64; 2];
    /// `g[c][d] = d u_c / d x_d`.
    fn velocity_gradient(&self, x: Point) -> [[f64; 2]; 2];
    fn velocity_laplacian(&self, x: Point) -> [f64; 2];
    fn pressure(&self, x: Point) -> f64;
    fn pressure_gradient(&self, x: Point) -> [f64; 2];
}

pub fn constant_scalar(c: f64) -> ScalarField {
    Arc::new(move |_| c)
}

pub fn constant_vector(c: [f64; 2]) -> VectorField {
    Arc::new(move |_| c)
}

#[derive(Clone)]
pub struct ProblemData {
    pub nu: f64,
    pub b: VectorField,
    pub sigma: ScalarField,
    /// Lower bound of `sigma`.
    pub sigma0: f64,
    pub f: VectorField,
    pub g: FluxField,
    pub dirichlet: VectorField,
    pub exact: Option<Arc<dyn ExactSolution>>,
}

impl fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemData")
            .field("nu", &self.nu)
            .field("sigma0", &self.sigma0)
            .field("exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemData {
    /// Homogeneous data: zero force, zero boundary values.
    pub fn homogeneous(nu: f64, b: VectorField, sigma: ScalarField, sigma0: f64) -> Self {
        Self {
            nu,
            b,
            sigma,
            sigma0,
            f: constant_vector([0.0; 2]),
            g: Arc::new(|_, _| [0.0; 2]),
            dirichlet: constant_vector([0.0; 2]),
            exact: None,
        }
    }

    /// Data for which `exact` solves the Oseen problem: the force, Dirichlet
    /// values and Neumann flux `(nu grad u - p I) n` are derived from it.
    pub fn manufactured(
        nu: f64,
        b: VectorField,
        sigma: ScalarField,
        sigma0: f64,
        exact: Arc<dyn ExactSolution>,
    ) -> Self {
        let f = {
            let (e, b, sigma) = (exact.clone(), b.clone(), sigma.clone());
            Arc::new(move |x: Point| {
                let (u, g, l, gp) = (e.velocity(x), e.velocity_gradient(x), e.velocity_laplacian(x), e.pressure_gradient(x));
                let bx = b(x);
                let s = sigma(x);
                std::array::from_fn(|c| -nu * l[c] + bx[0] * g[c][0] + bx[1] * g[c][1] + s * u[c] + gp[c])
            }) as VectorField
        };
        Self::with_exact_boundary(nu, b, sigma, sigma0, f, exact)
    }

    /// Manufactured data for the steady Navier-Stokes equations, where the
    /// convection field is the solution itself.
    pub fn manufactured_navier_stokes(nu: f64, exact: Arc<dyn ExactSolution>) -> Self {
        let f = {
            let e = exact.clone();
            Arc::new(move |x: Point| {
                let (u, g, l, gp) = (e.velocity(x), e.velocity_gradient(x), e.velocity_laplacian(x), e.pressure_gradient(x));
                std::array::from_fn(|c| -nu * l[c] + u[0] * g[c][0] + u[1] * g[c][1] + gp[c])
            }) as VectorField
        };
        let b = {
            let e = exact.clone();
            Arc::new(move |x: Point| e.velocity(x)) as VectorField
        };
        Self::with_exact_boundary(nu, b, constant_scalar(0.0), 0.0, f, exact)
    }

    fn with_exact_boundary(
        nu: f64,
        b: VectorField,
        sigma: ScalarField,
        sigma0: f64,
        f: VectorField,
        exact: Arc<dyn ExactSolution>,
    ) -> Self {
        let dirichlet = {
            let e = exact.clone();
            Arc::new(move |x: Point| e.velocity(x)) as VectorField
        };
        let g = {
            let e = exact.clone();
            Arc::new(move |x: Point, n: Point| {
                let (gu, p) = (e.velocity_gradient(x), e.pressure(x));
                std::array::from_fn(|c| nu * (gu[c][0] * n[0] + gu[c][1] * n[1]) - p * n[c])
            }) as FluxField
        };
        Self {
            nu,
            b,
            sigma,
            sigma0,
            f,
            g,
            dirichlet,
            exact: Some(exact),
        }
    }

    pub fn exact(&self, what: &'static str) -> Result<&dyn ExactSolution> {
        self.exact.as_deref().ok_or(Error::MissingExactSolution(what))
    }

    /// Checks `nu > 0`, `sigma0 >= 0` and `sigma >= sigma0` at the quadrature
    /// points of the given degree.
    pub fn validate(&self, disc: &Discretization, degree: usize) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidInput(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.sigma0 >= 0.0) {
            return Err(Error::InvalidInput(format!("sigma0 must be nonnegative, got {}", self.sigma0)));
        }
        let slack = 1e-12 * self.sigma0.max(1.0);
        let rule = make_quadrature(degree)?;
        for cell in 0..disc.n_cells() {
            let geo = disc.geometry(cell);
            for &p in &rule.points {
                let x = geo.map(p);
                let s = (self.sigma)(x);
                if s < self.sigma0 - slack {
                    return Err(Error::InvalidInput(format!(
                        "sigma({:.4}, {:.4}) = {s} below sigma0 = {}",
                        x[0], x[1], self.sigma0
                    )));
                }
            }
        }
        Ok(())
    }

    /// `||sigma||_inf` estimated as the maximum over quadrature points.
    pub fn sigma_sup(&self, disc: &Discretization, degree: usize) -> Result<f64> {
        let rule = make_quadrature(degree)?;
        let mut m: f64 = 0.0;
        for cell in 0..disc.n_cells() {
            let geo = disc.geometry(cell);
            for &p in &rule.points {
                m = m.max((self.sigma)(geo.map(p)).abs());
            }
        }
        Ok(m)
    }
}

/// Polynomial test solutions used by the exactness checks.
pub mod polynomial {
    use super::*;

    /// Velocity `curl psi` for a cubic stream function
    /// `psi = a x^3 + b x^2 y + c x y^2 + d y^3 + e x^2 + g y^2 + h x y` and an
    /// affine pressure `p = p0 + p1 x + p2 y`.
    #[derive(Clone, Copy, Debug)]
    pub struct CubicStream {
        pub psi: [f64; 7],
        pub pressure: [f64; 3],
    }

    impl CubicStream {
        fn psi_derivatives(&self, x: Point) -> ([f64; 3], [f64; 4]) {
            let [a, b, c, d, e, g, h] = self.psi;
            let (x, y) = (x[0], x[1]);
            // psi_xx, psi_xy, psi_yy
            let second = [6.0 * a * x + 2.0 * b * y + 2.0 * e, 2.0 * b * x + 2.0 * c * y + h, 2.0 * c * x + 6.0 * d * y + 2.0 * g];
            // psi_xxx, psi_xxy, psi_xyy, psi_yyy
            let third = [6.0 * a, 2.0 * b, 2.0 * c, 6.0 * d];
            (second, third)
        }
    }

    impl ExactSolution for CubicStream {
        fn velocity(&self, p: Point) -> [f64; 2] {
            let [a, b, c, d, e, g, h] = self.psi;
            let (x, y) = (p[0], p[1]);
            let psi_x = 3.0 * a * x * x + 2.0 * b * x * y + c * y * y + 2.0 * e * x + h * y;
            let psi_y = b * x * x + 2.0 * c * x * y + 3.0 * d * y * y + 2.0 * g * y + h * x;
            [psi_y, -psi_x]
        }

        fn velocity_gradient(&self, x: Point) -> [[f64; 2]; 2] {
            let (s, _) = self.psi_derivatives(x);
            [[s[1], s[2]], [-s[0], -s[1]]]
        }

        fn velocity_laplacian(&self, x: Point) -> [f64; 2] {
            let (_, t) = self.psi_derivatives(x);
            [t[1] + t[3], -(t[0] + t[2])]
        }

        fn pressure(&self, x: Point) -> f64 {
            self.pressure[0] + self.pressure[1] * x[0] + self.pressure[2] * x[1]
        }

        fn pressure_gradient(&self, _: Point) -> [f64; 2] {
            [self.pressure[1], self.pressure[2]]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::polynomial::CubicStream;
    use super::*;

    #[test]
    fn manufactured_force_for_polynomial_solution() {
        let e = CubicStream {
            psi: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            pressure: [0.0, 2.0, -1.0],
        };
        // psi = x^3 -> u = (0, -3x^2), Lap u = (0, -6)
        let data = ProblemData::manufactured(0.5, constant_vector([1.0, 0.0]), constant_scalar(2.0), 2.0, Arc::new(e));
        let x = [0.3, 0.7];
        let f = (data.f)(x);
        // -nu Lap u + b.grad u + sigma u + grad p
        let expected = [2.0, 0.5 * 6.0 + (-6.0 * 0.3) + 2.0 * (-3.0 * 0.09) - 1.0];
        assert!((f[0] - expected[0]).abs() < 1e-14);
        assert!((f[1] - expected[1]).abs() < 1e-14);
        let g = (data.dirichlet)(x);
        assert!(g[0] == 0.0 && (g[1] + 0.27).abs() < 1e-15);
    }

    #[test]
    fn cubic_stream_is_divergence_free() {
        let e = CubicStream {
            psi: [0.3, -1.2, 0.7, 2.0, 0.1, -0.4, 0.9],
            pressure: [0.0; 3],
        };
        for x in [[0.1, 0.2], [0.8, 0.35], [0.5, 0.5]] {
            let g = e.velocity_gradient(x);
            assert!((g[0][0] + g[1][1]).abs() < 1e-14);
        }
    }
}
