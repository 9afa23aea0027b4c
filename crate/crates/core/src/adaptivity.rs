//! Estimator-driven adaptive refinement: solve, estimate, mark, bisect.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::ErrorEstimate;
use crate::fem::{Discretization, SpacePair};
use crate::mesh::Mesh;
use crate::pipeline::{OseenRun, RunOptions};
use crate::problem::ProblemData;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Marking {
    /// Cells with indicator `>= theta * max`.
    Maximum,
    /// Smallest set carrying `theta` of the total squared indicator (Dörfler).
    FixedFraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub marking: Marking,
    pub theta: f64,
    /// Number of solves, including the initial mesh.
    pub max_levels: usize,
    pub dof_budget: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            marking: Marking::Maximum,
            theta: 0.5,
            max_levels: 10,
            dof_budget: 200_000,
        }
    }
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.theta) {
            return Err(Error::InvalidInput(format!("theta must lie in [0, 1), got {}", self.theta)));
        }
        if self.dof_budget == 0 || self.max_levels == 0 {
            return Err(Error::InvalidInput("DoF budget and level cap must be positive".into()));
        }
        Ok(())
    }
}

/// Per-cell indicator: the cell's own terms, its share of the global
/// divergence term and half of each adjacent facet term.
pub fn local_indicators(mesh: &Mesh, est: &ErrorEstimate) -> Vec<f64> {
    let mut sq: Vec<f64> = (0..mesh.n_cells())
        .map(|c| est.cell_res[c] + est.cell_div[c] + est.cell_delta[c] + est.cell_mu[c])
        .collect();
    for (f, fct) in mesh.facets().iter().enumerate() {
        match fct.cells.1 {
            Some(c1) => {
                sq[fct.cells.0] += 0.5 * est.facet[f];
                sq[c1] += 0.5 * est.facet[f];
            }
            None => sq[fct.cells.0] += est.facet[f],
        }
    }
    sq.into_iter().map(f64::sqrt).collect()
}

/// Marked cells, sorted by index.
pub fn mark(indicators: &[f64], marking: Marking, theta: f64) -> Vec<usize> {
    let mut out = match marking {
        Marking::Maximum => {
            let max = indicators.iter().copied().fold(0.0, f64::max);
            (0..indicators.len()).filter(|&c| indicators[c] >= theta * max).collect()
        }
        Marking::FixedFraction => {
            let mut order: Vec<usize> = (0..indicators.len()).collect();
            order.sort_by(|&a, &b| indicators[b].partial_cmp(&indicators[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
            let total: f64 = indicators.iter().map(|v| v * v).sum();
            let mut acc = 0.0;
            let mut chosen = Vec::new();
            for c in order {
                if acc >= theta * total && !chosen.is_empty() {
                    break;
                }
                acc += indicators[c] * indicators[c];
                chosen.push(c);
            }
            chosen
        }
    };
    out.sort_unstable();
    out
}

#[derive(Clone, Debug)]
pub struct AdaptiveStep {
    pub level: usize,
    pub disc: Discretization,
    pub run: OseenRun,
    pub indicators: Vec<f64>,
    pub marked: Vec<usize>,
}

impl AdaptiveStep {
    pub fn dofs(&self) -> usize {
        self.disc.layout().n_dofs()
    }
}

/// Runs the adaptive loop from `mesh` until the level cap or DoF budget.
pub fn adaptive_loop(
    mesh: Mesh,
    space: SpacePair,
    data: &ProblemData,
    config: &AdaptiveConfig,
    opts: &RunOptions,
) -> Result<Vec<AdaptiveStep>> {
    config.validate()?;
    let mut steps = Vec::new();
    let mut mesh = mesh;
    for level in 0..config.max_levels {
        let at = |e: Error| Error::AtLevel {
            level,
            source: Box::new(e),
        };
        let disc = Discretization::new(mesh, space).map_err(at)?;
        let run = OseenRun::new(&disc, data, opts).map_err(at)?;
        let indicators = local_indicators(&disc.mesh, &run.estimate);
        let last = level + 1 == config.max_levels || disc.layout().n_dofs() >= config.dof_budget;
        let marked = if last { Vec::new() } else { mark(&indicators, config.marking, config.theta) };
        let next = (!last && !marked.is_empty()).then(|| disc.mesh.bisect_marked(&marked));
        steps.push(AdaptiveStep {
            level,
            disc,
            run,
            indicators,
            marked,
        });
        match next {
            Some(m) => mesh = m,
            None => break,
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximum_strategy() {
        assert_eq!(mark(&[1.0, 1.0, 1.0], Marking::Maximum, 0.5), vec![0, 1, 2]);
        assert_eq!(mark(&[1.0, 3.0, 2.9, 3.0], Marking::Maximum, 1.0 - 1e-12), vec![1, 3]);
        assert_eq!(mark(&[0.1, 3.0, 0.0], Marking::Maximum, 0.0), vec![0, 1, 2]);
    }

    #[test]
    fn dorfler_hand_example() {
        // squares 16, 4, 1, 1: 16 >= 0.7 * 22 already, 16 < 0.8 * 22 <= 20
        assert_eq!(mark(&[4.0, 2.0, 1.0, 1.0], Marking::FixedFraction, 0.7), vec![0]);
        assert_eq!(mark(&[4.0, 2.0, 1.0, 1.0], Marking::FixedFraction, 0.8), vec![0, 1]);
        assert_eq!(mark(&[1.0, 2.0, 4.0, 1.0], Marking::FixedFraction, 0.8), vec![1, 2]);
    }

    #[test]
    fn config_validation() {
        let mut c = AdaptiveConfig::default();
        assert!(c.validate().is_ok());
        c.theta = 1.0;
        assert!(c.validate().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn marked_set_nonempty_and_dorfler_minimal(
                v in proptest::collection::vec(0.0f64..10.0, 1..40),
                theta in 0.05f64..0.95,
            ) {
                prop_assume!(v.iter().any(|&x| x > 0.0));
                let m = mark(&v, Marking::Maximum, theta);
                prop_assert!(!m.is_empty());
                let d = mark(&v, Marking::FixedFraction, theta);
                let total: f64 = v.iter().map(|x| x * x).sum();
                let got: f64 = d.iter().map(|&c| v[c] * v[c]).sum();
                prop_assert!(got >= theta * total * (1.0 - 1e-12));
                // dropping the smallest marked cell violates the bulk criterion
                let smallest = d.iter().map(|&c| v[c] * v[c]).fold(f64::INFINITY, f64::min);
                prop_assert!(d.len() == 1 || got - smallest < theta * total);
            }
        }
    }
}
