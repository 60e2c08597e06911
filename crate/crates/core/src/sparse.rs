//! Minimal row-compressed complex matrix used for superoperators.

use num_complex::Complex64;

use crate::hilbert::ComplexMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    /// Per row: strictly increasing column indices with their values.
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    /// Assembles an `n × n` matrix from triplets, summing duplicates and
    /// dropping entries that cancel to exactly zero.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n];
        for (r, c, v) in triplets {
            debug_assert!(r < n && c < n);
            let row = &mut rows[r];
            match row.last_mut() {
                Some((last, acc)) if *last == c => *acc += v,
                _ => row.push((c, v)),
            }
        }
        for row in &mut rows {
            row.retain(|(_, v)| *v != Complex64::new(0.0, 0.0));
        }
        Self { n, rows }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, r: usize) -> &[(usize, Complex64)] {
        &self.rows[r]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "vector length mismatch");
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| v * x[c]).sum())
            .collect()
    }

    /// Largest entry magnitude in row `r`.
    pub fn row_max_abs(&self, r: usize) -> f64 {
        self.rows[r]
            .iter()
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|column − row|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, _)| c.abs_diff(r)))
            .max()
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] = v;
            }
        }
        m
    }
}

/// Nonzero entries of a dense matrix as `(row, col, value)`.
pub(crate) fn nonzeros(m: &ComplexMatrix) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != Complex64::new(0.0, 0.0) {
                out.push((i, j, v));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_cancellations_dropped() {
        let one = Complex64::new(1.0, 0.0);
        let m = SparseMatrix::from_triplets(
            3,
            vec![
                (0, 1, one),
                (0, 1, one),
                (2, 2, one),
                (2, 2, -one),
                (1, 0, one),
            ],
        );
        assert_eq!(m.row(0), &[(1, Complex64::new(2.0, 0.0))]);
        assert!(m.row(2).is_empty());
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.bandwidth(), 1);
        let y = m.mul_vec(&[one, one, one]);
        assert_eq!(
            y,
            vec![Complex64::new(2.0, 0.0), one, Complex64::new(0.0, 0.0)]
        );
    }
}
