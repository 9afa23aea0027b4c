use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::reference::{NodeKind, ReferenceElement};
use crate::mesh::{BoundaryKind, CellGeometry, Mesh, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairKind {
    /// Taylor-Hood `P_k / P_{k-1}`, `k >= 2`.
    InfSupStable,
    /// `P_k / P_k`, `k >= 1`, stable only through the pressure stabilization.
    EqualOrder,
}

/// Velocity/pressure polynomial degrees. Both spaces are continuous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SpacePair {
    velocity_degree: usize,
    pressure_degree: usize,
}

impl SpacePair {
    /// The five pairs of the benchmark studies.
    pub const STUDY_PAIRS: [SpacePair; 5] = [
        SpacePair { velocity_degree: 1, pressure_degree: 1 },
        SpacePair { velocity_degree: 2, pressure_degree: 1 },
        SpacePair { velocity_degree: 2, pressure_degree: 2 },
        SpacePair { velocity_degree: 3, pressure_degree: 2 },
        SpacePair { velocity_degree: 3, pressure_degree: 3 },
    ];

    pub fn new(velocity_degree: usize, pressure_degree: usize) -> Result<Self> {
        let ok = (1..=3).contains(&velocity_degree)
            && (pressure_degree == velocity_degree
                || (velocity_degree >= 2 && pressure_degree + 1 == velocity_degree));
        if !ok {
            return Err(Error::UnsupportedSpace(format!(
                "P{velocity_degree}/P{pressure_degree}"
            )));
        }
        Ok(Self {
            velocity_degree,
            pressure_degree,
        })
    }

    pub fn taylor_hood(k: usize) -> Result<Self> {
        Self::new(k, k.wrapping_sub(1))
    }

    pub fn equal_order(k: usize) -> Result<Self> {
        Self::new(k, k)
    }

    pub fn velocity_degree(&self) -> usize {
        self.velocity_degree
    }

    pub fn pressure_degree(&self) -> usize {
        self.pressure_degree
    }

    pub fn kind(&self) -> PairKind {
        if self.velocity_degree == self.pressure_degree {
            PairKind::EqualOrder
        } else {
            PairKind::InfSupStable
        }
    }
}

impl fmt::Display for SpacePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}/P{}", self.velocity_degree, self.pressure_degree)
    }
}

impl FromStr for SpacePair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnsupportedSpace(s.to_string());
        let t = s.trim().to_ascii_uppercase().replace(['P', ' '], "");
        let (a, b) = t.split_once(['/', ',']).ok_or_else(bad)?;
        let k = a.parse().map_err(|_| bad())?;
        let l = b.parse().map_err(|_| bad())?;
        Self::new(k, l)
    }
}

impl TryFrom<String> for SpacePair {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SpacePair> for String {
    fn from(p: SpacePair) -> String {
        p.to_string()
    }
}

/// Continuous Lagrange degrees of freedom of one scalar field.
#[derive(Clone, Debug)]
pub struct ScalarDofMap {
    element: ReferenceElement,
    n_dofs: usize,
    cell_dofs: Vec<usize>,
    coords: Vec<Point>,
}

impl ScalarDofMap {
    pub fn new(mesh: &Mesh, degree: usize) -> Result<Self> {
        let element = ReferenceElement::new(degree)?;
        let k = degree;
        let nv = mesh.n_vertices();
        let per_edge = k - 1;
        let per_cell = element.n_interior();
        let n_dofs = nv + mesh.n_facets() * per_edge + mesh.n_cells() * per_cell;
        let n_local = element.n_basis();
        let mut cell_dofs = Vec::with_capacity(mesh.n_cells() * n_local);
        let mut coords = vec![[0.0; 2]; n_dofs];
        for cell in 0..mesh.n_cells() {
            let c = mesh.cells()[cell];
            let cf = mesh.cell_facets(cell);
            let geo = mesh.cell_geometry(cell)?;
            for i in 0..n_local {
                let global = match element.node_kind(i) {
                    NodeKind::Vertex(v) => c[v],
                    NodeKind::Edge(e, t) => {
                        let f = cf[e];
                        let forward = mesh.facets()[f].vertices[0] == c[(e + 1) % 3];
                        let pos = if forward { t } else { k - t };
                        nv + f * per_edge + pos - 1
                    }
                    NodeKind::Interior(j) => nv + mesh.n_facets() * per_edge + cell * per_cell + j,
                };
                coords[global] = geo.map(element.node(i));
                cell_dofs.push(global);
            }
        }
        Ok(Self {
            element,
            n_dofs,
            cell_dofs,
            coords,
        })
    }

    pub fn element(&self) -> &ReferenceElement {
        &self.element
    }

    pub fn degree(&self) -> usize {
        self.element.degree()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_local(&self) -> usize {
        self.element.n_basis()
    }

    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        let n = self.n_local();
        &self.cell_dofs[cell * n..(cell + 1) * n]
    }

    /// Physical location of every global node.
    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    /// Global nodes on the closure of the facets of the given kind, sorted.
    pub fn boundary_dofs(&self, mesh: &Mesh, kind: BoundaryKind) -> Vec<usize> {
        let nv = mesh.n_vertices();
        let per_edge = self.degree() - 1;
        let mut out = Vec::new();
        for (f, facet) in mesh.facets().iter().enumerate() {
            if facet.boundary == Some(kind) {
                out.extend(facet.vertices);
                out.extend((0..per_edge).map(|t| nv + f * per_edge + t));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Nodal Lagrange interpolation.
    pub fn interpolate(&self, field: impl Fn(Point) -> f64) -> Vec<f64> {
        self.coords.iter().map(|&x| field(x)).collect()
    }
}

/// Layout of the coupled system: `[u_1 | u_2 | p | (mean multiplier)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SystemLayout {
    pub n_velocity: usize,
    pub n_pressure: usize,
    /// Whether a scalar Lagrange multiplier enforcing zero pressure mean is
    /// appended (pure Dirichlet problems).
    pub mean_constraint: bool,
}

impl SystemLayout {
    pub fn velocity_offset(&self, component: usize) -> usize {
        component * self.n_velocity
    }

    pub fn pressure_offset(&self) -> usize {
        2 * self.n_velocity
    }

    pub fn multiplier_index(&self) -> Option<usize> {
        self.mean_constraint.then(|| 2 * self.n_velocity + self.n_pressure)
    }

    /// Velocity (including Dirichlet nodes) plus pressure unknowns.
    pub fn n_dofs(&self) -> usize {
        2 * self.n_velocity + self.n_pressure
    }

    pub fn n_unknowns(&self) -> usize {
        self.n_dofs() + usize::from(self.mean_constraint)
    }
}

#[derive(Clone, Debug)]
pub struct DofMap {
    pub velocity: ScalarDofMap,
    pub pressure: ScalarDofMap,
    dirichlet: Vec<usize>,
    layout: SystemLayout,
}

impl DofMap {
    pub fn new(mesh: &Mesh, space: SpacePair) -> Result<Self> {
        let velocity = ScalarDofMap::new(mesh, space.velocity_degree())?;
        let pressure = ScalarDofMap::new(mesh, space.pressure_degree())?;
        let dirichlet = velocity.boundary_dofs(mesh, BoundaryKind::Dirichlet);
        let layout = SystemLayout {
            n_velocity: velocity.n_dofs(),
            n_pressure: pressure.n_dofs(),
            mean_constraint: !mesh.has_neumann_boundary(),
        };
        Ok(Self {
            velocity,
            pressure,
            dirichlet,
            layout,
        })
    }

    pub fn layout(&self) -> SystemLayout {
        self.layout
    }

    /// Scalar velocity nodes on the Dirichlet boundary (applies to both
    /// components).
    pub fn dirichlet_nodes(&self) -> &[usize] {
        &self.dirichlet
    }
}

/// A mesh together with an element pair and its degrees of freedom.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: Mesh,
    pub space: SpacePair,
    pub dofs: DofMap,
    geometry: Vec<CellGeometry>,
}

impl Discretization {
    pub fn new(mesh: Mesh, space: SpacePair) -> Result<Self> {
        let geometry = mesh.geometries()?;
        let dofs = DofMap::new(&mesh, space)?;
        Ok(Self {
            mesh,
            space,
            dofs,
            geometry,
        })
    }

    pub fn geometry(&self, cell: usize) -> &CellGeometry {
        &self.geometry[cell]
    }

    pub fn layout(&self) -> SystemLayout {
        self.dofs.layout()
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.n_cells()
    }

    /// Mesh size `h = max_K h_K`.
    pub fn h(&self) -> f64 {
        self.geometry.iter().map(|g| g.diameter).fold(0.0, f64::max)
    }

    /// Nodal interpolant of a velocity field as a full system vector (zero
    /// pressure). With `dirichlet_zero` the Dirichlet nodes are set to zero,
    /// i.e. the interpolant lies in the homogeneous velocity space.
    pub fn interpolate_velocity(&self, field: impl Fn(Point) -> [f64; 2], dirichlet_zero: bool) -> [Vec<f64>; 2] {
        let coords = self.dofs.velocity.coords();
        let mut u: [Vec<f64>; 2] = [Vec::with_capacity(coords.len()), Vec::with_capacity(coords.len())];
        for &x in coords {
            let v = field(x);
            u[0].push(v[0]);
            u[1].push(v[1]);
        }
        if dirichlet_zero {
            for &i in self.dofs.dirichlet_nodes() {
                u[0][i] = 0.0;
                u[1][i] = 0.0;
            }
        }
        u
    }

    /// Nodal interpolant of a pressure field. With `zero_mean` (and no Neumann
    /// boundary) the interpolant is shifted to integral mean zero.
    pub fn interpolate_pressure(&self, field: impl Fn(Point) -> f64, zero_mean: bool) -> Result<Vec<f64>> {
        let mut p = self.dofs.pressure.interpolate(field);
        if zero_mean {
            let mean = self.integrate_pressure(&p)? / self.mesh.total_area();
            p.iter_mut().for_each(|v| *v -= mean);
        }
        Ok(p)
    }

    /// `int_Omega p_h` for a pressure coefficient vector.
    pub fn integrate_pressure(&self, p: &[f64]) -> Result<f64> {
        let weights = self.pressure_mass_row()?;
        Ok(weights.iter().zip(p).map(|(w, v)| w * v).sum())
    }

    /// `int_Omega psi_j` for every pressure basis function.
    pub fn pressure_mass_row(&self) -> Result<Vec<f64>> {
        let rule = crate::fem::make_quadrature(self.space.pressure_degree().max(1))?;
        let element = self.dofs.pressure.element();
        let tab = element.tabulate(&rule.points);
        let mut row = vec![0.0; self.dofs.pressure.n_dofs()];
        for cell in 0..self.n_cells() {
            let det = self.geometry[cell].det();
            for (q, w) in rule.weights.iter().enumerate() {
                for (i, &g) in self.dofs.pressure.cell_dofs(cell).iter().enumerate() {
                    row[g] += w * det * tab[q].values[i];
                }
            }
        }
        Ok(row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_unit_square;

    #[test]
    fn pair_parsing_and_kind() {
        let p: SpacePair = "P2/P1".parse().unwrap();
        assert_eq!(p.kind(), PairKind::InfSupStable);
        assert_eq!(p.to_string(), "P2/P1");
        let q: SpacePair = "p3/p3".parse().unwrap();
        assert_eq!(q.kind(), PairKind::EqualOrder);
        assert!("P1/P0".parse::<SpacePair>().is_err());
        assert!("P3/P1".parse::<SpacePair>().is_err());
        assert!(SpacePair::taylor_hood(1).is_err());
    }

    #[test]
    fn dof_counts_include_dirichlet_nodes() {
        let mesh = build_unit_square(2);
        for k in 1..=3 {
            let d = ScalarDofMap::new(&mesh, k).unwrap();
            let n = 4 * k + 1;
            assert_eq!(d.n_dofs(), n * n);
        }
        let dofs = DofMap::new(&mesh, SpacePair::taylor_hood(2).unwrap()).unwrap();
        assert_eq!(dofs.layout().n_dofs(), 2 * 81 + 25);
        assert!(dofs.layout().mean_constraint);
        // boundary of a 9x9 lattice
        assert_eq!(dofs.dirichlet_nodes().len(), 32);
    }

    #[test]
    fn shared_nodes_have_consistent_coordinates() {
        let mesh = build_unit_square(1).bisect_marked(&[0, 3]);
        for k in 1..=3 {
            let d = ScalarDofMap::new(&mesh, k).unwrap();
            for cell in 0..mesh.n_cells() {
                let geo = mesh.cell_geometry(cell).unwrap();
                for (i, &g) in d.cell_dofs(cell).iter().enumerate() {
                    let x = geo.map(d.element().node(i));
                    let y = d.coords()[g];
                    assert!((x[0] - y[0]).abs() < 1e-14 && (x[1] - y[1]).abs() < 1e-14);
                }
            }
            // every node is distinct
            let mut pts: Vec<(i64, i64)> = d
                .coords()
                .iter()
                .map(|p| ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64))
                .collect();
            pts.sort_unstable();
            pts.dedup();
            assert_eq!(pts.len(), d.n_dofs());
        }
    }

    #[test]
    fn constant_field_interpolates_to_constant() {
        let d = ScalarDofMap::new(&build_unit_square(1), 3).unwrap();
        assert!(d.interpolate(|_| 2.5).iter().all(|&v| v == 2.5));
    }
}
