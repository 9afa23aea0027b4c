//! Solve, estimate and measure on one discretization.

use serde::{Deserialize, Serialize};

use crate::assembly::{solve_oseen, AssemblyOptions, Convection, DiscreteSolution};
use crate::error::Result;
use crate::estimator::{
    effectivity, estimate_with, hypothesis_diagnostics, spg_error_norm, ErrorEstimate, EstimatorOptions, HypothesisReport,
    NormReport,
};
use crate::fem::Discretization;
use crate::problem::ProblemData;
use crate::solver::{SolveReport, SolverConfig};
use crate::stabilization::{ParameterRule, StabilizationConstants, StabilizationParams};

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct RunOptions {
    pub constants: StabilizationConstants,
    #[serde(skip)]
    pub assembly: AssemblyOptions,
    #[serde(skip)]
    pub solver: SolverConfig,
    /// Also evaluate the interpolation hypotheses (needs an exact solution).
    pub hypotheses: bool,
}

/// Oseen parameters for the element pair of `disc`.
pub fn oseen_parameters(disc: &Discretization, data: &ProblemData, constants: StabilizationConstants) -> Result<StabilizationParams> {
    let degree = 2 * disc.space.velocity_degree() + 2;
    let sigma_sup = data.sigma_sup(disc, degree)?;
    Ok(StabilizationParams::select(
        ParameterRule::for_pair(disc.space.kind()),
        disc,
        data.nu,
        sigma_sup,
        constants,
    ))
}

#[derive(Clone, Debug)]
pub struct OseenRun {
    pub params: StabilizationParams,
    pub solution: DiscreteSolution,
    pub solve: SolveReport,
    pub estimate: ErrorEstimate,
    /// Present when the data carry an exact solution.
    pub norm: Option<NormReport>,
    pub hypotheses: Option<HypothesisReport>,
}

impl OseenRun {
    pub fn new(disc: &Discretization, data: &ProblemData, opts: &RunOptions) -> Result<Self> {
        data.validate(disc, opts.assembly.degree(disc.space))?;
        let params = oseen_parameters(disc, data, opts.constants)?;
        let (solution, solve) = solve_oseen(disc, data, &params, Convection::Field(&data.b), &opts.assembly, &opts.solver)?;
        let estimate = estimate_with(disc, data, &params, &solution, &EstimatorOptions::default())?;
        let norm = match data.exact {
            Some(_) => Some(spg_error_norm(disc, data, &params, &solution, None)?),
            None => None,
        };
        let hypotheses = match (&norm, opts.hypotheses) {
            (Some(n), true) => Some(hypothesis_diagnostics(disc, data, &params, n)?),
            _ => None,
        };
        Ok(Self {
            params,
            solution,
            solve,
            estimate,
            norm,
            hypotheses,
        })
    }

    pub fn effectivity(&self) -> Result<f64> {
        let norm = self.norm.as_ref().ok_or(crate::Error::MissingExactSolution("the effectivity index"))?;
        effectivity(&self.estimate, norm)
    }
}
