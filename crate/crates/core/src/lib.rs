//! Stabilized finite elements for the Oseen and steady Navier-Stokes
//! equations on triangles, with a residual-based a posteriori error
//! estimator and estimator-driven adaptive refinement.
//!
//! The discretization combines SUPG, PSPG and grad-div stabilization for
//! continuous `P_k / P_k` and Taylor-Hood `P_k / P_{k-1}` pairs, `k <= 3`.
//!
//! ```no_run
//! use oseen_afem::prelude::*;
//!
//! let data = problem_oseen_smooth(1e-5);
//! let disc = Discretization::new(build_unit_square(3), "P2/P1".parse()?)?;
//! let run = OseenRun::new(&disc, &data, &RunOptions::default())?;
//! println!("eta = {:.3e}, effectivity = {:.2}", run.estimate.eta, run.effectivity()?);
//! # Ok::<(), oseen_afem::Error>(())
//! ```

pub mod adaptivity;
pub mod assembly;
pub mod bench;
pub mod error;
pub mod estimator;
pub mod fem;
pub mod io;
pub mod mesh;
pub mod navier_stokes;
pub mod pipeline;
pub mod problem;
pub mod solver;
pub mod sparse;
pub mod stabilization;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::adaptivity::{adaptive_loop, mark, AdaptiveConfig, Marking};
    pub use crate::assembly::{assemble, apply_dirichlet, solve_oseen, AssemblyOptions, Convection, DiscreteSolution};
    pub use crate::bench::problems::{problem_nse_smooth, problem_oseen_layer, problem_oseen_smooth};
    pub use crate::error::{Error, Result};
    pub use crate::estimator::{effectivity, estimate, spg_error_norm, ErrorEstimate, NormReport};
    pub use crate::fem::{Discretization, PairKind, SpacePair};
    pub use crate::mesh::{build_unit_square, BoundaryKind, Mesh};
    pub use crate::navier_stokes::{picard_solve, PicardConfig};
    pub use crate::pipeline::{OseenRun, RunOptions};
    pub use crate::problem::{ExactSolution, ProblemData};
    pub use crate::solver::SolverConfig;
    pub use crate::stabilization::{ParameterRule, StabilizationConstants, StabilizationParams};
}
