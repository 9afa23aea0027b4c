//! Sparse direct solves with a residual contract.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::sparse::linalg::colamd;
use faer::sparse::linalg::lu::{factorize_symbolic_lu, LuRef, LuSymbolicParams, NumericLu, SymbolicLu};
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Conj, Par};
use thiserror::Error;

use crate::sparse::{norm2, CsrMatrix};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("matrix is {rows}x{cols}, right-hand side has length {rhs}")]
    Dimension { rows: usize, cols: usize, rhs: usize },

    #[error("non-finite entry in the {0}")]
    NonFinite(&'static str),

    #[error("singular matrix: zero pivot in the {stage} stage at column {index:?}")]
    Singular {
        stage: &'static str,
        index: Option<usize>,
    },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("relative residual {achieved:e} above tolerance {tolerance:e}")]
    Residual { achieved: f64, tolerance: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Required `||Ax - b|| / ||b||`.
    pub tolerance: f64,
    /// Steps of iterative refinement tried before giving up.
    pub max_refinement: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_refinement: 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub relative_residual: f64,
    pub refinement_steps: usize,
    pub nnz: usize,
}

/// COLAMD treats a column as dense above `DENSE * sqrt(n)` entries. High
/// order stencils exceed faer's default of 0.5 and would be ordered last.
const DENSE: f64 = 10.0;

struct Factor {
    symbolic: SymbolicLu<usize>,
    numeric: NumericLu<usize, f64>,
}

impl Factor {
    fn new(a: &SparseColMat<usize, f64>) -> Result<Self, SolverError> {
        let params = LuSymbolicParams {
            colamd_params: colamd::Control {
                dense_row: DENSE,
                dense_col: DENSE,
                ..Default::default()
            },
            ..Default::default()
        };
        let symbolic = factorize_symbolic_lu(a.symbolic(), params).map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
        let mut numeric = NumericLu::new();
        let mut mem = MemBuffer::try_new(symbolic.factorize_numeric_lu_scratch::<f64>(Par::Seq, Default::default()))
            .map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
        symbolic
            .factorize_numeric_lu(&mut numeric, a.as_ref(), Par::Seq, MemStack::new(&mut mem), Default::default())
            .map_err(|e| match e {
                LuError::SymbolicSingular { index } => SolverError::Singular {
                    stage: "symbolic",
                    index: Some(index),
                },
                LuError::Generic(g) => SolverError::Factorization(format!("{g:?}")),
            })?;
        Ok(Self { symbolic, numeric })
    }

    fn solve(&self, b: &Col<f64>) -> Col<f64> {
        let mut x = b.clone();
        let mut mem = MemBuffer::new(self.symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
        LuRef::new_unchecked(&self.symbolic, &self.numeric).solve_in_place_with_conj(
            Conj::No,
            x.as_mat_mut(),
            Par::Seq,
            MemStack::new(&mut mem),
        );
        x
    }
}

/// Solves `A x = b` by sparse LU with partial pivoting plus iterative
/// refinement. Runs single-threaded so results are bit-reproducible.
pub fn solve(matrix: &CsrMatrix, rhs: &[f64], config: &SolverConfig) -> Result<SolveReport, SolverError> {
    let n = matrix.n_rows();
    if matrix.n_cols() != n || rhs.len() != n {
        return Err(SolverError::Dimension {
            rows: n,
            cols: matrix.n_cols(),
            rhs: rhs.len(),
        });
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::NonFinite("right-hand side"));
    }
    if matrix.triplets().any(|(_, _, v)| !v.is_finite()) {
        return Err(SolverError::NonFinite("matrix"));
    }
    faer::set_global_parallelism(Par::Seq);

    let triplets: Vec<Triplet<usize, usize, f64>> = matrix
        .triplets()
        .filter(|t| t.2 != 0.0)
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
    let lu = Factor::new(&a)?;

    let b_norm = norm2(rhs);
    let b = Col::from_fn(n, |i| rhs[i]);
    let mut x: Vec<f64> = {
        let x = lu.solve(&b);
        (0..n).map(|i| x[i]).collect()
    };
    let residual = |x: &[f64]| -> Vec<f64> {
        let ax = matrix.mul_vec(x);
        rhs.iter().zip(ax).map(|(b, ax)| b - ax).collect()
    };
    let relative = |r: &[f64]| if b_norm > 0.0 { norm2(r) / b_norm } else { norm2(r) };

    let mut r = residual(&x);
    let mut rel = relative(&r);
    let mut steps = 0;
    while !(rel <= config.tolerance) && steps < config.max_refinement {
        if !rel.is_finite() {
            break;
        }
        let rc = Col::from_fn(n, |i| r[i]);
        let dx = lu.solve(&rc);
        let candidate: Vec<f64> = (0..n).map(|i| x[i] + dx[i]).collect();
        let rc = residual(&candidate);
        let rel_c = relative(&rc);
        steps += 1;
        if !(rel_c < rel) {
            break;
        }
        x = candidate;
        r = rc;
        rel = rel_c;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::Singular {
            stage: "numeric",
            index: None,
        });
    }
    if !(rel <= config.tolerance) {
        return Err(SolverError::Residual {
            achieved: rel,
            tolerance: config.tolerance,
        });
    }
    Ok(SolveReport {
        solution: x,
        relative_residual: rel,
        refinement_steps: steps,
        nnz: matrix.nnz(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let a = CsrMatrix::identity(4);
        let r = solve(&a, &[1.0, 0.0, 0.0, 0.0], &SolverConfig::default()).unwrap();
        assert_eq!(r.solution, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(r.relative_residual, 0.0);
    }

    #[test]
    fn nonsymmetric_needs_pivoting() {
        let a = CsrMatrix::from_dense(&[vec![0.0, 2.0, 0.0], vec![1.0, 0.0, 3.0], vec![0.0, 4.0, 5.0]]);
        let x0 = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x0);
        let r = solve(&a, &b, &SolverConfig::default()).unwrap();
        for (x, y) in r.solution.iter().zip(x0) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let err = solve(&a, &[1.0, 1.0, 1.0], &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, SolverError::Singular { .. } | SolverError::Residual { .. }), "{err}");
    }

    #[test]
    fn dimension_mismatch() {
        let a = CsrMatrix::identity(2);
        assert!(matches!(
            solve(&a, &[1.0], &SolverConfig::default()),
            Err(SolverError::Dimension { .. })
        ));
    }

    #[test]
    fn non_finite_rhs() {
        let a = CsrMatrix::identity(2);
        assert!(matches!(
            solve(&a, &[1.0, f64::NAN], &SolverConfig::default()),
            Err(SolverError::NonFinite(_))
        ));
    }
}
