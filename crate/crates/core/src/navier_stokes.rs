//! Steady Navier-Stokes by Picard iteration on the stabilized discretization.

use std::collections::VecDeque;
use std::io::Write;

use faer::prelude::*;
use faer::Mat;

use serde::{Deserialize, Serialize};

use crate::assembly::{apply_dirichlet, assemble, solve_oseen, AssemblyOptions, Convection, DiscreteSolution};
use crate::error::{Error, Result};
use crate::estimator::{estimate_with, ErrorEstimate, EstimatorOptions, EstimatorVariant};
use crate::fem::Discretization;
use crate::problem::ProblemData;
use crate::solver::SolverConfig;
use crate::sparse::norm2;
use crate::stabilization::{ParameterRule, StabilizationConstants, StabilizationParams};

/// Relative residual required of each linearized solve.
const INNER_TOLERANCE: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialGuess {
    Zero,
    /// Solve the problem without the convective term first.
    Stokes,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PicardConfig {
    /// Euclidean norm of the nonlinear algebraic residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial_guess: InitialGuess,
    /// `x_{k+1} = x_k + omega (x_new - x_k)`.
    pub relaxation: f64,
    /// Use the data's convection field instead of the iterate, which turns
    /// the iteration into a single Oseen solve.
    pub frozen_convection: bool,
    /// Anderson acceleration over this many previous iterates; 0 is plain
    /// Picard.
    pub anderson_depth: usize,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100,
            initial_guess: InitialGuess::Stokes,
            relaxation: 1.0,
            frozen_convection: false,
            anderson_depth: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PicardResult {
    pub solution: DiscreteSolution,
    /// Residual norm before each linear solve and at the accepted iterate.
    pub history: Vec<f64>,
    /// Number of linearized solves after the initial guess.
    pub iterations: usize,
}

impl PicardResult {
    /// Whether the residual decreases monotonically after the first three
    /// iterations.
    pub fn monotone_after(&self, skip: usize) -> bool {
        self.history.iter().skip(skip).collect::<Vec<_>>().windows(2).all(|w| w[1] <= w[0])
    }

    pub fn write_history_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["iteration", "residual"])?;
        for (i, r) in self.history.iter().enumerate() {
            wtr.write_record([i.to_string(), format!("{r:e}")])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Navier-Stokes parameters: `delta_K = c_delta h_K^2` for every pair.
pub fn nse_parameters(disc: &Discretization, nu: f64, constants: StabilizationConstants) -> StabilizationParams {
    StabilizationParams::select(ParameterRule::NavierStokes(disc.space.kind()), disc, nu, 0.0, constants)
}

pub fn picard_solve(
    disc: &Discretization,
    data: &ProblemData,
    params: &StabilizationParams,
    config: &PicardConfig,
    assembly: &AssemblyOptions,
    solver: &SolverConfig,
) -> Result<PicardResult> {
    if !(config.tolerance > 0.0) || !(config.relaxation > 0.0 && config.relaxation <= 1.0) {
        return Err(Error::InvalidInput("Picard tolerance must be positive and relaxation in (0, 1]".into()));
    }
    let layout = disc.layout();
    // the nonlinear residual decides convergence; the inner solves only need
    // to stay well below it
    let solver = &SolverConfig {
        tolerance: solver.tolerance.max(INNER_TOLERANCE),
        ..*solver
    };
    let mut current = match config.initial_guess {
        InitialGuess::Zero => DiscreteSolution::zero(disc),
        InitialGuess::Stokes => solve_oseen(disc, data, params, Convection::Zero, assembly, solver)?.0,
    };
    let mut history = Vec::new();
    let mut anderson = Anderson::new(config.anderson_depth);
    for iteration in 0..=config.max_iterations {
        let convection = if config.frozen_convection {
            Convection::Field(&data.b)
        } else {
            Convection::Discrete(&current.velocity)
        };
        let mut system = assemble(disc, data, params, convection, assembly)?;
        apply_dirichlet(&mut system, disc, data);
        let x = current.to_vector(layout);
        let r = norm2(&system.residual(&x));
        history.push(r);
        if !r.is_finite() {
            break;
        }
        if r < config.tolerance {
            return Ok(PicardResult {
                solution: current,
                history,
                iterations: iteration,
            });
        }
        if iteration == config.max_iterations {
            break;
        }
        let new = system.solve(solver)?.solution;
        let next = anderson.update(&x, new, config.relaxation);
        current = DiscreteSolution::from_vector(disc, &next)?;
    }
    Err(Error::PicardNotConverged {
        iterations: history.len().saturating_sub(1),
        last: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

/// Anderson mixing for the fixed point map `x -> g(x)`.
struct Anderson {
    depth: usize,
    g: VecDeque<Vec<f64>>,
    f: VecDeque<Vec<f64>>,
}

impl Anderson {
    fn new(depth: usize) -> Self {
        Self {
            depth,
            g: VecDeque::new(),
            f: VecDeque::new(),
        }
    }

    /// Next iterate from `x` and `g = g(x)` with damping `w`.
    fn update(&mut self, x: &[f64], g: Vec<f64>, w: f64) -> Vec<f64> {
        let f: Vec<f64> = g.iter().zip(x).map(|(g, x)| g - x).collect();
        if self.depth == 0 {
            return x.iter().zip(&f).map(|(x, f)| x + w * f).collect();
        }
        self.g.push_back(g);
        self.f.push_back(f);
        if self.g.len() > self.depth + 1 {
            self.g.pop_front();
            self.f.pop_front();
        }
        let m = self.g.len() - 1;
        let (gk, fk) = (&self.g[m], &self.f[m]);
        let mut xg = gk.clone();
        let mut xf = fk.clone();
        if m > 0 {
            let n = fk.len();
            let df = Mat::from_fn(n, m, |i, j| self.f[j + 1][i] - self.f[j][i]);
            let rhs = Mat::from_fn(n, 1, |i, _| fk[i]);
            let gamma = df.col_piv_qr().solve_lstsq(&rhs);
            if (0..m).all(|j| gamma[(j, 0)].is_finite()) {
                for j in 0..m {
                    let c = gamma[(j, 0)];
                    for i in 0..n {
                        xg[i] -= c * (self.g[j + 1][i] - self.g[j][i]);
                        xf[i] -= c * (self.f[j + 1][i] - self.f[j][i]);
                    }
                }
            }
        }
        // x + w f with both terms mixed
        xg.iter().zip(&xf).map(|(g, f)| g - (1.0 - w) * f).collect()
    }
}

/// The estimator with the Navier-Stokes modifications: nonlinear cell
/// residual, `sigma_0 = 0`, and `||u_h||_{L^inf(F)}` in the facet weight.
pub fn nse_estimate(
    disc: &Discretization,
    data: &ProblemData,
    params: &StabilizationParams,
    sol: &DiscreteSolution,
) -> Result<ErrorEstimate> {
    estimate_with(
        disc,
        data,
        params,
        sol,
        &EstimatorOptions {
            variant: EstimatorVariant::NavierStokes,
            quad_degree: None,
        },
    )
}

pub use crate::estimator::spg_nse_norm;
