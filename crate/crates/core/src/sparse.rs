//! Compressed sparse row storage with a fixed pattern.

use std::io::Write;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix on the given pattern. Columns of every row are sorted and
    /// deduplicated here.
    pub fn from_pattern(n_cols: usize, mut rows: Vec<Vec<usize>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for r in rows.iter_mut() {
            r.sort_unstable();
            r.dedup();
            col_idx.extend_from_slice(r);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        Self {
            n_rows: rows.len(),
            n_cols,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    /// Copy with row `row` replaced by `entries` (sorted by column).
    pub fn with_row(&self, row: usize, entries: &[(usize, f64)]) -> Self {
        let mut out = Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: Vec::with_capacity(self.n_rows + 1),
            col_idx: Vec::with_capacity(self.col_idx.len()),
            values: Vec::with_capacity(self.values.len()),
        };
        out.row_ptr.push(0);
        for r in 0..self.n_rows {
            if r == row {
                let mut e = entries.to_vec();
                e.sort_by_key(|&(c, _)| c);
                for (c, v) in e {
                    assert!(c < self.n_cols, "column {c} out of range");
                    out.col_idx.push(c);
                    out.values.push(v);
                }
            } else {
                let (c, v) = self.row(r);
                out.col_idx.extend_from_slice(c);
                out.values.extend_from_slice(v);
            }
            out.row_ptr.push(out.col_idx.len());
        }
        out
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::from_pattern(n, (0..n).map(|i| vec![i]).collect());
        m.values.fill(1.0);
        m
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n_cols = rows.first().map_or(0, Vec::len);
        let pattern = rows
            .iter()
            .map(|r| (0..r.len()).filter(|&j| r[j] != 0.0).collect())
            .collect();
        let mut m = Self::from_pattern(n_cols, pattern);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    m.add(i, j, v);
                }
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn position(&self, row: usize, col: usize) -> Option<usize> {
        let (a, b) = (self.row_ptr[row], self.row_ptr[row + 1]);
        self.col_idx[a..b].binary_search(&col).ok().map(|p| a + p)
    }

    /// Adds `value` at `(row, col)`.
    ///
    /// # Panics
    /// If the entry is not part of the pattern.
    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        let p = self
            .position(row, col)
            .unwrap_or_else(|| panic!("entry ({row}, {col}) outside the sparsity pattern"));
        self.values[p] += value;
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.position(row, col).map_or(0.0, |p| self.values[p])
    }

    /// `(columns, values)` of one row.
    pub fn row(&self, row: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[row], self.row_ptr[row + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn row_mut(&mut self, row: usize) -> (&[usize], &mut [f64]) {
        let (a, b) = (self.row_ptr[row], self.row_ptr[row + 1]);
        (&self.col_idx[a..b], &mut self.values[a..b])
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let (c, v) = self.row(r);
            c.iter().zip(v).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_rows)
            .map(|r| {
                let (c, v) = self.row(r);
                c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// Removes stored zeros from the pattern.
    pub fn prune_zeros(&mut self) {
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(self.col_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.n_rows {
            let (c, v) = self.row(r);
            for (&c, &v) in c.iter().zip(v) {
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.values = values;
    }

    /// MatrixMarket coordinate format, 1-based.
    pub fn write_matrix_market(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(w, "{} {} {:.17e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_add_and_multiply() {
        let mut m = CsrMatrix::from_pattern(3, vec![vec![2, 0, 0], vec![1], vec![0, 2]]);
        assert_eq!(m.nnz(), 5);
        m.add(0, 0, 2.0);
        m.add(0, 2, 1.0);
        m.add(0, 2, 1.0);
        m.add(1, 1, 3.0);
        m.add(2, 0, -1.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![4.0, 3.0, -1.0]);
        assert_eq!(m.get(0, 2), 2.0);
        assert_eq!(m.get(1, 0), 0.0);
        m.prune_zeros();
        assert_eq!(m.nnz(), 4);
    }

    #[test]
    fn replace_row() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 2.0, 0.0], vec![3.0, 4.0, 5.0], vec![0.0, 0.0, 6.0]]);
        let r = m.with_row(1, &[(2, 7.0), (0, 1.0)]);
        assert_eq!(r.to_dense(), vec![vec![1.0, 2.0, 0.0], vec![1.0, 0.0, 7.0], vec![0.0, 0.0, 6.0]]);
        assert_eq!(r.nnz(), 5);
    }

    #[test]
    #[should_panic(expected = "outside the sparsity pattern")]
    fn add_outside_pattern_panics() {
        let mut m = CsrMatrix::identity(2);
        m.add(0, 1, 1.0);
    }

    #[test]
    fn matrix_market_roundtrip_header() {
        let m = CsrMatrix::identity(2);
        let mut buf = Vec::new();
        m.write_matrix_market(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("%%MatrixMarket"));
        assert!(s.contains("2 2 2"));
    }
}
