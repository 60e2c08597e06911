//! Linear solves for the Liouvillian kernel.
//!
//! The steady state is the kernel vector of `L` normalized to unit trace.
//! One equation of `L x = 0` is redundant (the trace functional is a left
//! null vector), so it is replaced by the trace row `Σ_n x[n + d·n] = 1` and
//! the resulting square system is solved. Only rows belonging to a diagonal
//! element `ρ_nn` can be replaced: dropping an off-diagonal equation leaves
//! the dependent set of diagonal equations in place and the system singular.
//!
//! Two backends solve the same replaced system:
//! * [`Backend::Sparse`]: row elimination on windowed rows with threshold
//!   partial pivoting. The column-stacked Liouvillian has bandwidth about
//!   `2d`, so this costs `O(d⁴)` instead of the dense `O(d⁶)`.
//! * [`Backend::Dense`]: plain dense LU, kept as an independent check.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::sparse::SparseMatrix;

/// Relative pivot size below which the system is treated as singular.
const SINGULAR_RTOL: f64 = 1e-12;

/// Threshold for preferring a banded row over the dense trace row as pivot.
const PIVOT_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Sparse,
    Dense,
}

/// Which diagonal-element equation to replace with the trace constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowChoice {
    /// The diagonal-element row with the smallest max-abs entry.
    #[default]
    SmallestNorm,
    /// The equation for `ρ_nn`.
    Level(usize),
}

/// Index of the superoperator row holding the equation for `ρ_nn`.
pub fn diagonal_row(dim: usize, n: usize) -> usize {
    n + dim * n
}

pub fn choose_row(l: &SparseMatrix, dim: usize, choice: RowChoice) -> Result<usize> {
    match choice {
        RowChoice::Level(n) if n < dim => Ok(diagonal_row(dim, n)),
        RowChoice::Level(n) => Err(CoreError::Dimension(format!(
            "cannot replace the equation for level {n} in dimension {dim}"
        ))),
        RowChoice::SmallestNorm => {
            let mut best = diagonal_row(dim, 0);
            let mut best_norm = l.row_max_abs(best);
            for n in 1..dim {
                let r = diagonal_row(dim, n);
                let norm = l.row_max_abs(r);
                if norm < best_norm {
                    best = r;
                    best_norm = norm;
                }
            }
            Ok(best)
        }
    }
}

fn trace_row(dim: usize) -> Vec<(usize, Complex64)> {
    (0..dim)
        .map(|n| (diagonal_row(dim, n), Complex64::new(1.0, 0.0)))
        .collect()
}

fn singular(col: usize) -> CoreError {
    CoreError::DegenerateDynamics(format!(
        "Liouvillian with trace constraint is singular at column {col}; \
         the steady state is not unique"
    ))
}

/// Solves `M x = e_r`, where `M` is `l` with row `r` replaced by the trace row.
pub fn solve_trace_constrained(
    l: &SparseMatrix,
    dim: usize,
    replace: usize,
    backend: Backend,
) -> Result<Vec<Complex64>> {
    let n = l.dim();
    if n != dim * dim {
        return Err(CoreError::Dimension(format!(
            "superoperator of size {n} does not match Hilbert dimension {dim}"
        )));
    }
    if replace >= n {
        return Err(CoreError::Dimension(format!("row {replace} out of range")));
    }
    match backend {
        Backend::Sparse => solve_sparse(l, dim, replace),
        Backend::Dense => solve_dense(l, dim, replace),
    }
}

fn solve_dense(l: &SparseMatrix, dim: usize, replace: usize) -> Result<Vec<Complex64>> {
    let n = l.dim();
    let mut m = l.to_dense();
    m.row_mut(replace).fill(Complex64::new(0.0, 0.0));
    for (c, v) in trace_row(dim) {
        m[(replace, c)] = v;
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut b = DVector::zeros(n);
    b[replace] = Complex64::new(1.0, 0.0);
    let lu = m.lu();
    let u = lu.u();
    for k in 0..n {
        if u[(k, k)].norm() <= SINGULAR_RTOL * scale {
            return Err(singular(k));
        }
    }
    lu.solve(&b)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| singular(0))
}

/// A row whose nonzeros lie in columns `start .. start + vals.len()`.
struct WindowRow {
    start: usize,
    vals: Vec<Complex64>,
    rhs: Complex64,
    dense: bool,
}

impl WindowRow {
    fn from_entries(entries: &[(usize, Complex64)], rhs: Complex64, dense: bool) -> Option<Self> {
        let first = entries.first()?.0;
        let last = entries.last()?.0;
        let mut vals = vec![Complex64::new(0.0, 0.0); last - first + 1];
        for &(c, v) in entries {
            vals[c - first] = v;
        }
        Some(Self {
            start: first,
            vals,
            rhs,
            dense,
        })
    }

    /// `self ← self − f·pivot`, dropping the now-eliminated leading column.
    fn eliminate(&mut self, pivot: &WindowRow) {
        debug_assert_eq!(self.start, pivot.start);
        let f = self.vals[0] / pivot.vals[0];
        let len = self.vals.len().max(pivot.vals.len()) - 1;
        let mut next = Vec::with_capacity(len);
        for i in 1..=len {
            let own = self.vals.get(i).copied().unwrap_or_default();
            let piv = pivot.vals.get(i).copied().unwrap_or_default();
            next.push(own - f * piv);
        }
        self.vals = next;
        self.rhs -= f * pivot.rhs;
        self.start += 1;
        self.dense |= pivot.dense;
    }

    fn drop_leading_zero(&mut self) {
        self.vals.remove(0);
        self.start += 1;
    }
}

fn solve_sparse(l: &SparseMatrix, dim: usize, replace: usize) -> Result<Vec<Complex64>> {
    let n = l.dim();
    let scale = (0..n).map(|r| l.row_max_abs(r)).fold(1.0, f64::max);
    let constraint = trace_row(dim);

    let mut buckets: Vec<Vec<WindowRow>> = (0..n).map(|_| Vec::new()).collect();
    for r in 0..n {
        let row = if r == replace {
            WindowRow::from_entries(&constraint, Complex64::new(1.0, 0.0), true)
        } else {
            WindowRow::from_entries(l.row(r), Complex64::new(0.0, 0.0), false)
        };
        let row = row.ok_or_else(|| singular(r))?;
        let start = row.start;
        buckets[start].push(row);
    }

    let mut upper: Vec<WindowRow> = Vec::with_capacity(n);
    for col in 0..n {
        let mut cands = std::mem::take(&mut buckets[col]);
        if cands.is_empty() {
            return Err(singular(col));
        }
        let magnitude = |r: &WindowRow| r.vals.first().map_or(0.0, |z| z.norm());
        let best_any = cands.iter().map(magnitude).fold(0.0, f64::max);
        if best_any <= SINGULAR_RTOL * scale {
            return Err(singular(col));
        }
        // Threshold pivoting: take the largest banded row if it is within
        // PIVOT_THRESHOLD of the overall largest, to keep dense rows out of
        // the pivot sequence and limit fill.
        let best_banded = cands
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.dense)
            .max_by(|(_, a), (_, b)| magnitude(a).total_cmp(&magnitude(b)));
        let pick = match best_banded {
            Some((i, r)) if magnitude(r) >= PIVOT_THRESHOLD * best_any => i,
            _ => cands
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| magnitude(a).total_cmp(&magnitude(b)))
                .map(|(i, _)| i)
                .expect("nonempty candidates"),
        };
        let pivot = cands.swap_remove(pick);
        for mut row in cands {
            if row.vals[0] == Complex64::new(0.0, 0.0) {
                row.drop_leading_zero();
            } else {
                row.eliminate(&pivot);
            }
            if col + 1 < n && !row.vals.is_empty() {
                buckets[col + 1].push(row);
            } else if row.rhs.norm() > SINGULAR_RTOL {
                return Err(singular(col));
            }
        }
        upper.push(pivot);
    }

    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for col in (0..n).rev() {
        let row = &upper[col];
        let mut acc = row.rhs;
        for (i, v) in row.vals.iter().enumerate().skip(1) {
            acc -= v * x[col + i];
        }
        x[col] = acc / row.vals[0];
    }
    Ok(x)
}
