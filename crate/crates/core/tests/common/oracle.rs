//! Dense reference assembly on the two-cell unit square: basis functions from
//! a monomial Vandermonde solve, collapsed Gauss quadrature and the bilinear
//! form written out term by term.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use oseen_afem::assembly::{assemble, AssemblyOptions, Convection};
use oseen_afem::fem::{Discretization, SpacePair};
use oseen_afem::mesh::{build_unit_square, Point};
use oseen_afem::pipeline::oseen_parameters;
use oseen_afem::problem::{constant_scalar, ProblemData, VectorField};

/// Gauss-Legendre on [0, 1] by Golub-Welsch.
pub fn gauss(n: usize) -> Vec<(f64, f64)> {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let b = i as f64 / ((4 * i * i - 1) as f64).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let eig = SymmetricEigen::new(j);
    (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (eig.eigenvalues[i] + 1.0), v0 * v0)
        })
        .collect()
}

/// Points and weights on a physical triangle via the Duffy map.
fn triangle_rule(v: [Point; 3], n: usize) -> Vec<(Point, f64)> {
    let g = gauss(n);
    let area = 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1])).abs();
    let mut out = Vec::new();
    for &(s, ws) in &g {
        for &(t, wt) in &g {
            let (a, b) = (s, t * (1.0 - s));
            let x = [
                v[0][0] + a * (v[1][0] - v[0][0]) + b * (v[2][0] - v[0][0]),
                v[0][1] + a * (v[1][1] - v[0][1]) + b * (v[2][1] - v[0][1]),
            ];
            out.push((x, ws * wt * (1.0 - s) * 2.0 * area));
        }
    }
    out
}

/// Lagrange basis on given nodes, as monomial coefficients around `center`.
struct Basis {
    exps: Vec<(i32, i32)>,
    coef: DMatrix<f64>,
    center: Point,
}

struct Eval {
    v: Vec<f64>,
    g: Vec<[f64; 2]>,
    lap: Vec<f64>,
}

impl Basis {
    fn new(nodes: &[Point], k: i32) -> Self {
        let exps: Vec<(i32, i32)> = (0..=k).flat_map(|t| (0..=t).map(move |j| (t - j, j))).collect();
        assert_eq!(exps.len(), nodes.len());
        let n = nodes.len();
        let center = [
            nodes.iter().map(|p| p[0]).sum::<f64>() / n as f64,
            nodes.iter().map(|p| p[1]).sum::<f64>() / n as f64,
        ];
        let v = DMatrix::from_fn(n, n, |r, m| {
            let (a, b) = exps[m];
            (nodes[r][0] - center[0]).powi(a) * (nodes[r][1] - center[1]).powi(b)
        });
        let coef = v.try_inverse().expect("unisolvent nodes");
        Self { exps, coef, center }
    }

    fn eval(&self, x: Point) -> Eval {
        let (dx, dy) = (x[0] - self.center[0], x[1] - self.center[1]);
        let p = |e: i32, t: f64| if e < 0 { 0.0 } else { t.powi(e) };
        let n = self.exps.len();
        let mut out = Eval {
            v: vec![0.0; n],
            g: vec![[0.0; 2]; n],
            lap: vec![0.0; n],
        };
        for (m, &(a, b)) in self.exps.iter().enumerate() {
            let (af, bf) = (a as f64, b as f64);
            let val = p(a, dx) * p(b, dy);
            let gx = af * p(a - 1, dx) * p(b, dy);
            let gy = bf * p(a, dx) * p(b - 1, dy);
            let lap = af * (af - 1.0) * p(a - 2, dx) * p(b, dy) + bf * (bf - 1.0) * p(a, dx) * p(b - 2, dy);
            for i in 0..n {
                let c = self.coef[(m, i)];
                out.v[i] += c * val;
                out.g[i][0] += c * gx;
                out.g[i][1] += c * gy;
                out.lap[i] += c * lap;
            }
        }
        out
    }
}

fn diameter(v: [Point; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % 3]);
            (a[0] - b[0]).hypot(a[1] - b[1])
        })
        .fold(0.0, f64::max)
}

struct Oracle {
    matrix: DMatrix<f64>,
    rhs: Vec<f64>,
}

fn oracle(disc: &Discretization, nu: f64, b: fn(Point) -> [f64; 2], sigma: f64, f: fn(Point) -> [f64; 2]) -> Oracle {
    let l = disc.layout();
    let n = l.n_unknowns();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut rhs = vec![0.0; n];
    let (kv, kp) = (disc.space.velocity_degree(), disc.space.pressure_degree());
    let equal = kv == kp;
    for cell in 0..disc.n_cells() {
        let verts = disc.mesh.cell_vertices(cell);
        let h = diameter(verts);
        let delta = if equal && nu < h { 0.5 * h } else { 0.5 * h * h };
        let mu = if equal { 0.5 * h } else { 0.5 };
        let vd = disc.dofs.velocity.cell_dofs(cell);
        let pd = disc.dofs.pressure.cell_dofs(cell);
        let vb = Basis::new(&vd.iter().map(|&g| disc.dofs.velocity.coords()[g]).collect::<Vec<_>>(), kv as i32);
        let pb = Basis::new(&pd.iter().map(|&g| disc.dofs.pressure.coords()[g]).collect::<Vec<_>>(), kp as i32);
        let ui = |c: usize, i: usize| l.velocity_offset(c) + vd[i];
        let pi = |i: usize| l.pressure_offset() + pd[i];
        for (x, w) in triangle_rule(verts, 10) {
            let (v, q) = (vb.eval(x), pb.eval(x));
            let bx = b(x);
            let fx = f(x);
            let conv = |i: usize| bx[0] * v.g[i][0] + bx[1] * v.g[i][1];
            for c in 0..2 {
                for i in 0..vd.len() {
                    // test function v = phi_i e_c
                    let sd = conv(i);
                    rhs[ui(c, i)] += w * fx[c] * (v.v[i] + delta * sd);
                    for j in 0..vd.len() {
                        let galerkin = nu * (v.g[i][0] * v.g[j][0] + v.g[i][1] * v.g[j][1]) + (conv(j) + sigma * v.v[j]) * v.v[i];
                        let strong = -nu * v.lap[j] + conv(j) + sigma * v.v[j];
                        a[(ui(c, i), ui(c, j))] += w * (galerkin + delta * strong * sd);
                        for e in 0..2 {
                            a[(ui(c, i), ui(e, j))] += w * mu * v.g[j][e] * v.g[i][c];
                        }
                    }
                    for j in 0..pd.len() {
                        a[(ui(c, i), pi(j))] += w * (-v.g[i][c] * q.v[j] + delta * q.g[j][c] * sd);
                    }
                }
            }
            for i in 0..pd.len() {
                rhs[pi(i)] += w * delta * (fx[0] * q.g[i][0] + fx[1] * q.g[i][1]);
                for c in 0..2 {
                    for j in 0..vd.len() {
                        let strong = -nu * v.lap[j] + conv(j) + sigma * v.v[j];
                        a[(pi(i), ui(c, j))] += w * (v.g[j][c] * q.v[i] + delta * strong * q.g[i][c]);
                    }
                }
                for j in 0..pd.len() {
                    a[(pi(i), pi(j))] += w * delta * (q.g[j][0] * q.g[i][0] + q.g[j][1] * q.g[i][1]);
                }
                if let Some(m) = l.multiplier_index() {
                    a[(pi(i), m)] += w * q.v[i];
                    a[(m, pi(i))] += w * q.v[i];
                }
            }
        }
    }
    Oracle { matrix: a, rhs }
}

fn b_field(x: Point) -> [f64; 2] {
    [0.3 + x[1], -0.5 + x[0]]
}

fn f_field(x: Point) -> [f64; 2] {
    [1.0 + x[0] * x[1], x[0] - x[1] * x[1]]
}

/// Largest deviation of the library's matrix and right-hand side from the
/// oracle, each relative to the oracle's largest entry.
pub fn assembly_deviation(pair: &str, nu: f64) -> (f64, f64) {
    let disc = Discretization::new(build_unit_square(0), pair.parse::<SpacePair>().unwrap()).unwrap();
    assert_eq!(disc.n_cells(), 2);
    let sigma = 2.0;
    let mut data = ProblemData::homogeneous(nu, Arc::new(b_field) as VectorField, constant_scalar(sigma), sigma);
    data.f = Arc::new(f_field);
    let params = oseen_parameters(&disc, &data, Default::default()).unwrap();
    let sys = assemble(&disc, &data, &params, Convection::Field(&data.b), &AssemblyOptions::default()).unwrap();
    let o = oracle(&disc, nu, b_field, sigma, f_field);

    let dense = sys.matrix.to_dense();
    let mut worst: f64 = 0.0;
    for r in 0..o.matrix.nrows() {
        for c in 0..o.matrix.ncols() {
            worst = worst.max((dense[r][c] - o.matrix[(r, c)]).abs());
        }
    }
    let rscale = o.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rworst = sys.rhs.iter().zip(&o.rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    (worst / o.matrix.amax(), rworst / rscale)
}
