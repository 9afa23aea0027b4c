//! The benchmark problems on the unit square.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use crate::mesh::Point;
use crate::problem::{constant_scalar, constant_vector, ExactSolution, ProblemData, VectorField};

/// One factor of a separable stream function with three derivatives.
#[derive(Clone, Debug)]
pub enum Profile {
    /// Polynomial with ascending coefficients.
    Polynomial(Vec<f64>),
    /// `t^2 (1 - exp(lambda (t - 1)))^2`.
    Layer { lambda: f64 },
}

impl Profile {
    /// `t^a (1 - t)^b`.
    pub fn monomial_bump(a: usize, b: usize) -> Self {
        let mut c = vec![0.0; a];
        c.push(1.0);
        for _ in 0..b {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &v) in c.iter().enumerate() {
                next[i] += v;
                next[i + 1] -= v;
            }
            c = next;
        }
        Profile::Polynomial(c)
    }

    /// Value and first three derivatives.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        match self {
            Profile::Polynomial(c) => {
                let mut v = [0.0; 4];
                for &a in c.iter().rev() {
                    v[3] = v[3] * t + 3.0 * v[2];
                    v[2] = v[2] * t + 2.0 * v[1];
                    v[1] = v[1] * t + v[0];
                    v[0] = v[0] * t + a;
                }
                v
            }
            Profile::Layer { lambda } => {
                let l = *lambda;
                let e = (l * (t - 1.0)).exp();
                let g = 1.0 - e;
                let (g1, g2, g3) = (-l * e, -l * l * e, -l * l * l * e);
                let s = g * g;
                let s1 = 2.0 * g * g1;
                let s2 = 2.0 * g1 * g1 + 2.0 * g * g2;
                let s3 = 6.0 * g1 * g2 + 2.0 * g * g3;
                [
                    t * t * s,
                    2.0 * t * s + t * t * s1,
                    2.0 * s + 4.0 * t * s1 + t * t * s2,
                    6.0 * s1 + 6.0 * t * s2 + t * t * s3,
                ]
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum PressureField {
    /// `pi^2 (x y^3 cos(2 pi x^2 y) - x^2 y sin(2 pi x y)) + 1/8`.
    Trigonometric,
    /// `exp(x + y) - (e - 1)^2`.
    Exponential,
}

impl PressureField {
    fn eval(&self, x: Point) -> (f64, [f64; 2]) {
        let (x, y) = (x[0], x[1]);
        match self {
            PressureField::Trigonometric => {
                let th = 2.0 * PI * x * x * y;
                let ph = 2.0 * PI * x * y;
                let (sth, cth) = th.sin_cos();
                let (sph, cph) = ph.sin_cos();
                let t1 = x * y.powi(3) * cth;
                let t2 = x * x * y * sph;
                let t1x = y.powi(3) * cth - 4.0 * PI * x * x * y.powi(4) * sth;
                let t1y = 3.0 * x * y * y * cth - 2.0 * PI * x.powi(3) * y.powi(3) * sth;
                let t2x = 2.0 * x * y * sph + 2.0 * PI * x * x * y * y * cph;
                let t2y = x * x * sph + 2.0 * PI * x.powi(3) * y * cph;
                let c = PI * PI;
                (c * (t1 - t2) + 0.125, [c * (t1x - t2x), c * (t1y - t2y)])
            }
            PressureField::Exponential => {
                let v = (x + y).exp();
                (v - (E - 1.0).powi(2), [v, v])
            }
        }
    }
}

/// `u = curl psi = (psi_y, -psi_x)` with `psi = amplitude X(x) Y(y)`.
#[derive(Clone, Debug)]
pub struct SeparableFlow {
    pub amplitude: f64,
    pub x: Profile,
    pub y: Profile,
    pub pressure: PressureField,
}

impl SeparableFlow {
    /// Smooth solution without layers.
    pub fn smooth() -> Self {
        Self {
            amplitude: 1000.0,
            x: Profile::monomial_bump(2, 4),
            y: Profile::monomial_bump(3, 2),
            pressure: PressureField::Trigonometric,
        }
    }

    /// Solution with exponential boundary layers at `x = 1` and `y = 1`.
    pub fn layer(nu: f64) -> Self {
        let lambda = 0.5 / nu.sqrt();
        Self {
            amplitude: 1.0,
            x: Profile::Layer { lambda },
            y: Profile::Layer { lambda },
            pressure: PressureField::Exponential,
        }
    }
}

impl ExactSolution for SeparableFlow {
    fn velocity(&self, p: Point) -> [f64; 2] {
        let (f, g) = (self.x.eval(p[0]), self.y.eval(p[1]));
        let a = self.amplitude;
        [a * f[0] * g[1], -a * f[1] * g[0]]
    }

    fn velocity_gradient(&self, p: Point) -> [[f64; 2]; 2] {
        let (f, g) = (self.x.eval(p[0]), self.y.eval(p[1]));
        let a = self.amplitude;
        [
            [a * f[1] * g[1], a * f[0] * g[2]],
            [-a * f[2] * g[0], -a * f[1] * g[1]],
        ]
    }

    fn velocity_laplacian(&self, p: Point) -> [f64; 2] {
        let (f, g) = (self.x.eval(p[0]), self.y.eval(p[1]));
        let a = self.amplitude;
        [
            a * (f[2] * g[1] + f[0] * g[3]),
            -a * (f[3] * g[0] + f[1] * g[2]),
        ]
    }

    fn pressure(&self, x: Point) -> f64 {
        self.pressure.eval(x).0
    }

    fn pressure_gradient(&self, x: Point) -> [f64; 2] {
        self.pressure.eval(x).1
    }
}

/// Smooth Oseen benchmark: `b = u`, `sigma = 1`.
pub fn problem_oseen_smooth(nu: f64) -> ProblemData {
    let exact = Arc::new(SeparableFlow::smooth());
    let b = {
        let e = exact.clone();
        Arc::new(move |x: Point| e.velocity(x)) as VectorField
    };
    ProblemData::manufactured(nu, b, constant_scalar(1.0), 1.0, exact)
}

/// Boundary layer Oseen benchmark: `b = (1, 1)`, `sigma = 0`.
pub fn problem_oseen_layer(nu: f64) -> ProblemData {
    ProblemData::manufactured(
        nu,
        constant_vector([1.0, 1.0]),
        constant_scalar(0.0),
        0.0,
        Arc::new(SeparableFlow::layer(nu)),
    )
}

/// The smooth solution as a steady Navier-Stokes solution.
pub fn problem_nse_smooth(nu: f64) -> ProblemData {
    ProblemData::manufactured_navier_stokes(nu, Arc::new(SeparableFlow::smooth()))
}
