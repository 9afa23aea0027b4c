//! Residual-based a posteriori error estimation in the `spg` norm.

mod fields;
mod hypotheses;
mod norms;
mod residual;

pub use fields::{eval_at, PointValues};
pub use hypotheses::{hypothesis_diagnostics, HypothesisCheck, HypothesisReport};
pub use norms::{effectivity, spg_error_norm, spg_nse_norm, NormReport};
pub use residual::{
    cell_residual, estimate, estimate_with, facet_residual, facet_weight, grad_div_weight, residual_weight,
    Components, ErrorEstimate, EstimatorOptions, EstimatorVariant,
};
