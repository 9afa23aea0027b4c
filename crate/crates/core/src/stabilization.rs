//! Cellwise SUPG/PSPG weights `delta_K` and grad-div weights `mu_K`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{Discretization, PairKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParameterRule {
    /// `delta_K = c_delta h_K^2`, `mu_K = c_mu`.
    InfSup,
    /// `delta_K = c_delta h_K` where `nu < h_K`, else `c_delta h_K^2`;
    /// `mu_K = c_mu h_K`.
    EqualOrder,
    /// Navier-Stokes: `delta_K = c_delta h_K^2` for every pair, `mu_K` as for
    /// the Oseen rule of the pair kind.
    NavierStokes(PairKind),
}

impl ParameterRule {
    pub fn for_pair(kind: PairKind) -> Self {
        match kind {
            PairKind::InfSupStable => ParameterRule::InfSup,
            PairKind::EqualOrder => ParameterRule::EqualOrder,
        }
    }

    pub fn pair_kind(&self) -> PairKind {
        match self {
            ParameterRule::InfSup => PairKind::InfSupStable,
            ParameterRule::EqualOrder => PairKind::EqualOrder,
            ParameterRule::NavierStokes(k) => *k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizationConstants {
    pub c_delta: f64,
    pub c_mu: f64,
    /// Inverse inequality constant; enters only the admissibility check and
    /// diagnostics.
    pub c_inv: f64,
}

impl Default for StabilizationConstants {
    fn default() -> Self {
        Self {
            c_delta: 0.5,
            c_mu: 0.5,
            c_inv: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizationParams {
    pub rule: Option<ParameterRule>,
    pub constants: StabilizationConstants,
    pub delta: Vec<f64>,
    pub mu: Vec<f64>,
    /// `delta_K <= min{h_K^2 / (8 c_inv nu), 1 / (2 ||sigma||_inf)}`.
    pub admissible: Vec<bool>,
    diameters: Vec<f64>,
}

impl StabilizationParams {
    pub fn select(
        rule: ParameterRule,
        disc: &Discretization,
        nu: f64,
        sigma_sup: f64,
        constants: StabilizationConstants,
    ) -> Self {
        let diameters: Vec<f64> = (0..disc.n_cells()).map(|c| disc.geometry(c).diameter).collect();
        let StabilizationConstants { c_delta, c_mu, .. } = constants;
        let delta = diameters
            .iter()
            .map(|&h| match rule {
                ParameterRule::EqualOrder if nu < h => c_delta * h,
                _ => c_delta * h * h,
            })
            .collect();
        let mu = diameters
            .iter()
            .map(|&h| match rule.pair_kind() {
                PairKind::InfSupStable => c_mu,
                PairKind::EqualOrder => c_mu * h,
            })
            .collect();
        let mut p = Self {
            rule: Some(rule),
            constants,
            delta,
            mu,
            admissible: Vec::new(),
            diameters,
        };
        p.admissible = p.admissibility(nu, sigma_sup);
        p
    }

    /// Prescribed per-cell values, e.g. `delta = mu = 0` for the plain
    /// Galerkin method.
    pub fn custom(disc: &Discretization, delta: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if delta.len() != disc.n_cells() || mu.len() != disc.n_cells() {
            return Err(Error::Inconsistent(format!(
                "{} delta / {} mu values for {} cells",
                delta.len(),
                mu.len(),
                disc.n_cells()
            )));
        }
        let diameters = (0..disc.n_cells()).map(|c| disc.geometry(c).diameter).collect();
        let n = delta.len();
        Ok(Self {
            rule: None,
            constants: StabilizationConstants::default(),
            delta,
            mu,
            admissible: vec![true; n],
            diameters,
        })
    }

    pub fn uniform(disc: &Discretization, delta: f64, mu: f64) -> Self {
        let n = disc.n_cells();
        Self::custom(disc, vec![delta; n], vec![mu; n]).expect("lengths match by construction")
    }

    fn admissibility(&self, nu: f64, sigma_sup: f64) -> Vec<bool> {
        let c_inv = self.constants.c_inv;
        self.delta
            .iter()
            .zip(&self.diameters)
            .map(|(&d, &h)| {
                let a = h * h / (8.0 * c_inv * nu);
                let b = if sigma_sup > 0.0 { 1.0 / (2.0 * sigma_sup) } else { f64::INFINITY };
                d <= a.min(b)
            })
            .collect()
    }

    pub fn all_admissible(&self) -> bool {
        self.admissible.iter().all(|&a| a)
    }

    pub fn max_delta(&self) -> f64 {
        self.delta.iter().copied().fold(0.0, f64::max)
    }

    /// Errors unless these parameters were built for the cells of `disc`.
    pub fn check(&self, disc: &Discretization) -> Result<()> {
        let ok = self.diameters.len() == disc.n_cells()
            && self
                .diameters
                .iter()
                .enumerate()
                .all(|(c, &h)| h == disc.geometry(c).diameter);
        if ok {
            Ok(())
        } else {
            Err(Error::Inconsistent(
                "stabilization parameters were built for a different mesh".into(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::SpacePair;
    use crate::mesh::Mesh;

    /// One right triangle with legs `h / sqrt 2`, so that `h_K = h`.
    fn single_cell(h: f64) -> Discretization {
        let a = h / 2f64.sqrt();
        let mesh = Mesh::new(vec![[0.0, 0.0], [a, 0.0], [0.0, a]], vec![[0, 1, 2]], |_, _| {
            crate::mesh::BoundaryKind::Dirichlet
        })
        .unwrap();
        Discretization::new(mesh, SpacePair::taylor_hood(2).unwrap()).unwrap()
    }

    #[test]
    fn rules_at_h_one_tenth() {
        let d = single_cell(0.1);
        let c = StabilizationConstants::default();
        let p = StabilizationParams::select(ParameterRule::InfSup, &d, 1e-5, 1.0, c);
        assert!((p.delta[0] - 0.005).abs() < 1e-15);
        assert_eq!(p.mu[0], 0.5);
        let p = StabilizationParams::select(ParameterRule::EqualOrder, &d, 1e-5, 1.0, c);
        assert!((p.delta[0] - 0.05).abs() < 1e-15);
        assert!((p.mu[0] - 0.05).abs() < 1e-15);
        let p = StabilizationParams::select(ParameterRule::EqualOrder, &d, 0.5, 1.0, c);
        assert!((p.delta[0] - 0.005).abs() < 1e-15);
        let p = StabilizationParams::select(ParameterRule::NavierStokes(PairKind::EqualOrder), &d, 1e-5, 0.0, c);
        assert!((p.delta[0] - 0.005).abs() < 1e-15);
        assert!((p.mu[0] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn admissibility_flag() {
        let d = single_cell(0.1);
        let c = StabilizationConstants::default();
        // h^2 / (8 nu) = 0.01 / 8e-5 is large; sigma bound 1/2 is large too
        let p = StabilizationParams::select(ParameterRule::InfSup, &d, 1e-5, 1.0, c);
        assert!(p.all_admissible());
        // h^2 / (8 nu) = 0.0125 < delta = 0.05
        let p = StabilizationParams::select(ParameterRule::EqualOrder, &d, 0.1 - 1e-9, 0.0, c);
        assert!(!p.all_admissible());
        // sigma bound 1 / (2 * 200) = 0.0025 < 0.005
        let p = StabilizationParams::select(ParameterRule::InfSup, &d, 1e-5, 200.0, c);
        assert!(!p.all_admissible());
    }

    #[test]
    fn mismatched_mesh_is_rejected() {
        let d = single_cell(0.1);
        let p = StabilizationParams::uniform(&d, 0.0, 0.0);
        assert!(p.check(&d).is_ok());
        assert!(p.check(&single_cell(0.2)).is_err());
        assert!(StabilizationParams::custom(&d, vec![], vec![]).is_err());
    }
}
