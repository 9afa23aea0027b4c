//! Conforming triangular meshes of polygonal domains.
//!
//! Cells are stored counter-clockwise with the *peak* (newest vertex) at
//! local index 0, so the refinement edge of every cell is the edge between
//! local vertices 1 and 2. Local facet `i` of a cell is the edge opposite
//! local vertex `i`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub vertices: [usize; 2],
    /// Adjacent cells; the first one has the smaller index and defines the
    /// orientation of the facet normal.
    pub cells: (usize, Option<usize>),
    /// `None` for interior facets.
    pub boundary: Option<BoundaryKind>,
}

impl Facet {
    pub fn is_interior(&self) -> bool {
        self.cells.1.is_some()
    }
}

/// Affine geometry of a single cell.
#[derive(Clone, Copy, Debug)]
pub struct CellGeometry {
    /// Longest edge length, `h_K`.
    pub diameter: f64,
    pub area: f64,
    /// Diameter of the inscribed circle, `rho_K`.
    pub inscribed_diameter: f64,
    pub origin: Point,
    /// Columns are the edge vectors `x1 - x0` and `x2 - x0`.
    pub jacobian: [[f64; 2]; 2],
    pub inverse_jacobian: [[f64; 2]; 2],
}

impl CellGeometry {
    pub fn map(&self, xi: Point) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    pub fn pull_back(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        let k = &self.inverse_jacobian;
        [k[0][0] * d[0] + k[0][1] * d[1], k[1][0] * d[0] + k[1][1] * d[1]]
    }

    /// `|det J|`, the ratio of physical to reference area times two.
    pub fn det(&self) -> f64 {
        2.0 * self.area
    }

    pub fn shape_ratio(&self) -> f64 {
        self.diameter / self.inscribed_diameter
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    cells: Vec<[usize; 3]>,
    facets: Vec<Facet>,
    cell_facets: Vec<[usize; 3]>,
    /// Number of refinement steps (red or bisection) that produced each cell.
    generation: Vec<u32>,
}

/// Unit square with a diagonal from bottom left to top right, red-refined
/// `levels` times. All boundary facets are Dirichlet.
pub fn build_unit_square(levels: usize) -> Mesh {
    let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let cells = vec![[0, 1, 2], [0, 2, 3]];
    let mut mesh = Mesh::new(vertices, cells, |_, _| BoundaryKind::Dirichlet)
        .expect("unit square is a valid triangulation");
    for _ in 0..levels {
        mesh = mesh.red_refine();
    }
    mesh
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn signed_area(p: Point, q: Point, r: Point) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

fn dist(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Rotate a counter-clockwise triple so that the vertex opposite the longest
/// edge (largest interior angle) comes first. Ties keep the earliest edge.
fn peak_at_largest_angle(vertices: &[Point], c: [usize; 3]) -> [usize; 3] {
    let mut best = 0;
    let mut best_len = -1.0;
    for i in 0..3 {
        let len = dist(vertices[c[(i + 1) % 3]], vertices[c[(i + 2) % 3]]);
        if len > best_len * (1.0 + 1e-12) {
            best = i;
            best_len = len;
        }
    }
    [c[best], c[(best + 1) % 3], c[(best + 2) % 3]]
}

impl Mesh {
    /// Build a mesh from raw cells. Orientation is normalised to
    /// counter-clockwise and the initial refinement edge of every cell is its
    /// longest edge. `marker` assigns a boundary kind to each boundary facet
    /// given its endpoints.
    pub fn new(
        vertices: Vec<Point>,
        cells: Vec<[usize; 3]>,
        marker: impl Fn(Point, Point) -> BoundaryKind,
    ) -> Result<Self> {
        let mut oriented = Vec::with_capacity(cells.len());
        for (k, c) in cells.into_iter().enumerate() {
            if c.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidInput(format!(
                    "cell {k} references a missing vertex"
                )));
            }
            let a = signed_area(vertices[c[0]], vertices[c[1]], vertices[c[2]]);
            if a.abs() <= f64::EPSILON * 16.0 {
                return Err(Error::DegenerateCell { cell: k, area: a });
            }
            let c = if a > 0.0 { c } else { [c[0], c[2], c[1]] };
            oriented.push(peak_at_largest_angle(&vertices, c));
        }
        let generation = vec![0; oriented.len()];
        let mesh = Self::from_parts(vertices, oriented, generation, |a, b, vs| {
            marker(vs[a], vs[b])
        });
        mesh.validate()?;
        Ok(mesh)
    }

    fn from_parts(
        vertices: Vec<Point>,
        cells: Vec<[usize; 3]>,
        generation: Vec<u32>,
        marker: impl Fn(usize, usize, &[Point]) -> BoundaryKind,
    ) -> Self {
        let mut index: HashMap<(usize, usize), usize> = HashMap::with_capacity(cells.len() * 2);
        let mut facets: Vec<Facet> = Vec::with_capacity(cells.len() * 3 / 2 + 2);
        let mut cell_facets = Vec::with_capacity(cells.len());
        for (k, c) in cells.iter().enumerate() {
            let mut local = [0; 3];
            for (i, slot) in local.iter_mut().enumerate() {
                let (a, b) = (c[(i + 1) % 3], c[(i + 2) % 3]);
                let id = *index.entry(edge_key(a, b)).or_insert_with(|| {
                    facets.push(Facet {
                        vertices: [a, b],
                        cells: (k, None),
                        boundary: None,
                    });
                    facets.len() - 1
                });
                if facets[id].cells.0 != k {
                    facets[id].cells.1 = Some(k);
                }
                *slot = id;
            }
            cell_facets.push(local);
        }
        for f in facets.iter_mut().filter(|f| f.cells.1.is_none()) {
            f.boundary = Some(marker(f.vertices[0], f.vertices[1], &vertices));
        }
        Self {
            vertices,
            cells,
            facets,
            cell_facets,
            generation,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Facet ids of a cell; entry `i` is the facet opposite local vertex `i`.
    pub fn cell_facets(&self, cell: usize) -> [usize; 3] {
        self.cell_facets[cell]
    }

    pub fn generation(&self, cell: usize) -> u32 {
        self.generation[cell]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn cell_vertices(&self, cell: usize) -> [Point; 3] {
        let c = self.cells[cell];
        [self.vertices[c[0]], self.vertices[c[1]], self.vertices[c[2]]]
    }

    pub fn cell_geometry(&self, cell: usize) -> Result<CellGeometry> {
        let [p0, p1, p2] = self.cell_vertices(cell);
        let j = [[p1[0] - p0[0], p2[0] - p0[0]], [p1[1] - p0[1], p2[1] - p0[1]]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det <= 0.0 || !det.is_finite() {
            return Err(Error::DegenerateCell {
                cell,
                area: 0.5 * det,
            });
        }
        let inv = [
            [j[1][1] / det, -j[0][1] / det],
            [-j[1][0] / det, j[0][0] / det],
        ];
        let (e0, e1, e2) = (dist(p1, p2), dist(p2, p0), dist(p0, p1));
        let area = 0.5 * det;
        Ok(CellGeometry {
            diameter: e0.max(e1).max(e2),
            area,
            inscribed_diameter: 4.0 * area / (e0 + e1 + e2),
            origin: p0,
            jacobian: j,
            inverse_jacobian: inv,
        })
    }

    /// All cell geometries; fails on the first degenerate cell.
    pub fn geometries(&self) -> Result<Vec<CellGeometry>> {
        (0..self.n_cells()).map(|k| self.cell_geometry(k)).collect()
    }

    /// Mesh size `h = max_K h_K`.
    pub fn max_diameter(&self) -> f64 {
        (0..self.n_cells())
            .filter_map(|k| self.cell_geometry(k).ok())
            .map(|g| g.diameter)
            .fold(0.0, f64::max)
    }

    pub fn max_shape_ratio(&self) -> f64 {
        (0..self.n_cells())
            .filter_map(|k| self.cell_geometry(k).ok())
            .map(|g| g.shape_ratio())
            .fold(0.0, f64::max)
    }

    pub fn facet_length(&self, facet: usize) -> f64 {
        let [a, b] = self.facets[facet].vertices;
        dist(self.vertices[a], self.vertices[b])
    }

    /// Unit normal of a facet, outward with respect to its first adjacent cell.
    pub fn facet_normal(&self, facet: usize) -> Point {
        let f = &self.facets[facet];
        let [a, b] = f.vertices.map(|v| self.vertices[v]);
        let len = dist(a, b);
        let mut n = [(b[1] - a[1]) / len, -(b[0] - a[0]) / len];
        let c = self.cells[f.cells.0];
        let opposite = c
            .iter()
            .copied()
            .find(|v| !f.vertices.contains(v))
            .expect("facet belongs to its cell");
        let o = self.vertices[opposite];
        if (o[0] - a[0]) * n[0] + (o[1] - a[1]) * n[1] > 0.0 {
            n = [-n[0], -n[1]];
        }
        n
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_cells())
            .map(|k| {
                let [p, q, r] = self.cell_vertices(k);
                signed_area(p, q, r)
            })
            .sum()
    }

    /// Uniform red refinement: every cell is split into four by its edge
    /// midpoints. Refinement edges of the children are reassigned by the
    /// largest-angle rule.
    pub fn red_refine(&self) -> Mesh {
        let nv = self.n_vertices();
        let mut vertices = self.vertices.clone();
        vertices.extend(self.facets.iter().map(|f| {
            let [a, b] = f.vertices.map(|v| self.vertices[v]);
            [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
        }));
        let mut cells = Vec::with_capacity(4 * self.n_cells());
        let mut generation = Vec::with_capacity(4 * self.n_cells());
        for (k, c) in self.cells.iter().enumerate() {
            let f = self.cell_facets[k];
            // midpoint of the edge opposite local vertex i
            let m = [nv + f[0], nv + f[1], nv + f[2]];
            let children = [
                [c[0], m[2], m[1]],
                [m[2], c[1], m[0]],
                [m[1], m[0], c[2]],
                [m[0], m[1], m[2]],
            ];
            for child in children {
                cells.push(peak_at_largest_angle(&vertices, child));
                generation.push(self.generation[k] + 1);
            }
        }
        let parent_of_midpoint = |v: usize| (v >= nv).then(|| v - nv);
        self.child_mesh(vertices, cells, generation, parent_of_midpoint)
    }

    fn child_mesh(
        &self,
        vertices: Vec<Point>,
        cells: Vec<[usize; 3]>,
        generation: Vec<u32>,
        parent_of_midpoint: impl Fn(usize) -> Option<usize>,
    ) -> Mesh {
        let old: HashMap<(usize, usize), usize> = self
            .facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.boundary.is_some())
            .map(|(i, f)| (edge_key(f.vertices[0], f.vertices[1]), i))
            .collect();
        let marker = |a: usize, b: usize, _: &[Point]| {
            let parent = old
                .get(&edge_key(a, b))
                .copied()
                .or_else(|| parent_of_midpoint(a))
                .or_else(|| parent_of_midpoint(b));
            parent
                .and_then(|f| self.facets[f].boundary)
                .unwrap_or(BoundaryKind::Dirichlet)
        };
        Mesh::from_parts(vertices, cells, generation, marker)
    }

    /// Newest-vertex bisection of the marked cells followed by the
    /// conformity closure. Each marked cell is bisected at least once across
    /// its refinement edge; neighbours are bisected as needed so the result has
    /// no hanging nodes.
    pub fn bisect_marked(&self, marked: &[usize]) -> Mesh {
        let nf = self.n_facets();
        let mut edge_marked = vec![false; nf];
        for &c in marked {
            edge_marked[self.cell_facets[c][0]] = true;
        }
        if !edge_marked.iter().any(|&m| m) {
            return self.clone();
        }
        // closure: a cell with any marked edge must also split its refinement edge
        loop {
            let mut changed = false;
            for cf in &self.cell_facets {
                if !edge_marked[cf[0]] && (edge_marked[cf[1]] || edge_marked[cf[2]]) {
                    edge_marked[cf[0]] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let nv = self.n_vertices();
        let mut vertices = self.vertices.clone();
        let mut midpoint = vec![usize::MAX; nf];
        let mut midpoint_parent = HashMap::new();
        for (f, facet) in self.facets.iter().enumerate() {
            if edge_marked[f] {
                let [a, b] = facet.vertices.map(|v| self.vertices[v]);
                midpoint[f] = vertices.len();
                midpoint_parent.insert(vertices.len(), f);
                vertices.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
            }
        }
        let edge_index: HashMap<(usize, usize), usize> = self
            .facets
            .iter()
            .enumerate()
            .map(|(i, f)| (edge_key(f.vertices[0], f.vertices[1]), i))
            .collect();

        let mut cells = Vec::with_capacity(self.n_cells() + 2 * marked.len());
        let mut generation = Vec::with_capacity(cells.capacity());
        let mut stack = Vec::new();
        for (k, &c) in self.cells.iter().enumerate() {
            stack.push((c, self.generation[k]));
            while let Some((t, g)) = stack.pop() {
                let split = edge_index
                    .get(&edge_key(t[1], t[2]))
                    .copied()
                    .filter(|&f| edge_marked[f] && t[1] < nv && t[2] < nv);
                match split {
                    Some(f) => {
                        let m = midpoint[f];
                        // pushed in reverse so the left child is emitted first
                        stack.push(([m, t[2], t[0]], g + 1));
                        stack.push(([m, t[0], t[1]], g + 1));
                    }
                    None => {
                        cells.push(t);
                        generation.push(g);
                    }
                }
            }
        }
        self.child_mesh(vertices, cells, generation, |v| {
            midpoint_parent.get(&v).copied()
        })
    }

    /// Check the structural invariants: positive orientation, consistent
    /// facet adjacency, and absence of hanging nodes.
    pub fn validate(&self) -> Result<()> {
        for k in 0..self.n_cells() {
            let [p, q, r] = self.cell_vertices(k);
            let a = signed_area(p, q, r);
            if a <= 0.0 {
                return Err(Error::DegenerateCell { cell: k, area: a });
            }
        }
        for (k, cf) in self.cell_facets.iter().enumerate() {
            let c = self.cells[k];
            for (i, &f) in cf.iter().enumerate() {
                let facet = &self.facets[f];
                let expected = edge_key(c[(i + 1) % 3], c[(i + 2) % 3]);
                if edge_key(facet.vertices[0], facet.vertices[1]) != expected {
                    return Err(Error::Inconsistent(format!(
                        "cell {k} local facet {i} does not match facet {f}"
                    )));
                }
                if facet.cells.0 != k && facet.cells.1 != Some(k) {
                    return Err(Error::Inconsistent(format!(
                        "facet {f} does not reference adjacent cell {k}"
                    )));
                }
            }
        }
        for (f, facet) in self.facets.iter().enumerate() {
            if let Some(other) = facet.cells.1 {
                if other <= facet.cells.0 {
                    return Err(Error::Inconsistent(format!(
                        "facet {f} adjacent cells out of order"
                    )));
                }
            }
            if facet.cells.1.is_none() != facet.boundary.is_some() {
                return Err(Error::Inconsistent(format!(
                    "facet {f} boundary marker mismatch"
                )));
            }
        }
        // A hanging node lies in the interior of a facet that has only one cell.
        let boundary: Vec<&Facet> = self.facets.iter().filter(|f| !f.is_interior()).collect();
        for (v, &x) in self.vertices.iter().enumerate() {
            for f in &boundary {
                if f.vertices.contains(&v) {
                    continue;
                }
                let [a, b] = f.vertices.map(|i| self.vertices[i]);
                let len = dist(a, b);
                let cross = signed_area(a, b, x).abs() * 2.0 / len;
                let t = ((x[0] - a[0]) * (b[0] - a[0]) + (x[1] - a[1]) * (b[1] - a[1])) / (len * len);
                if cross <= 1e-12 * len && t > 1e-12 && t < 1.0 - 1e-12 {
                    return Err(Error::Inconsistent(format!(
                        "hanging node {v} on facet {:?}",
                        f.vertices
                    )));
                }
            }
        }
        Ok(())
    }

    /// Mark every boundary facet satisfying `select` with `kind`.
    pub fn set_boundary_kind(&mut self, kind: BoundaryKind, select: impl Fn(Point, Point) -> bool) {
        for f in self.facets.iter_mut().filter(|f| f.boundary.is_some()) {
            let [a, b] = f.vertices.map(|v| self.vertices[v]);
            if select(a, b) {
                f.boundary = Some(kind);
            }
        }
    }

    pub fn has_neumann_boundary(&self) -> bool {
        self.facets
            .iter()
            .any(|f| f.boundary == Some(BoundaryKind::Neumann))
    }
}
