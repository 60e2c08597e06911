//! Validated density matrices and their on-disk format.
//!
//! The JSON format is `{"dim": D, "entries": [[re, im], ...]}` with entries
//! in row-major order. Floats are written in shortest round-trip form, so a
//! write/read cycle reproduces every bit.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::hilbert::ComplexMatrix;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-8;

/// A Hermitian, unit-trace matrix in the Fock basis.
///
/// Construction checks Hermiticity and trace. Positivity is reported by
/// [`DensityMatrix::min_eigenvalue`] rather than enforced, because truncated
/// steady states may carry tiny negative eigenvalues that callers want to see.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() < 2 {
            return Err(CoreError::InvalidDensity(format!(
                "expected a square matrix of dimension >= 2, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoreError::InvalidDensity("non-finite entry".into()));
        }
        let herm = hermiticity_error(&m);
        if herm >= HERMITICITY_TOL {
            return Err(CoreError::InvalidDensity(format!(
                "not Hermitian (max |ρ − ρ†| = {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() >= TRACE_TOL {
            return Err(CoreError::InvalidDensity(format!("trace is {tr}, not 1")));
        }
        Ok(Self(m))
    }

    /// Skips validation; used where the construction guarantees the invariants.
    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(CoreError::InvalidDensity("zero state vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(psi.len(), psi.iter().map(|z| z / norm));
        Self::new(&v * v.adjoint())
    }

    pub fn fock(dim: usize, n: usize) -> Result<Self> {
        let mut psi = vec![Complex64::new(0.0, 0.0); dim];
        if n >= dim {
            return Err(CoreError::Dimension(format!("level {n} >= dim {dim}")));
        }
        psi[n] = Complex64::new(1.0, 0.0);
        Self::pure(&psi)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0))
    }

    /// Diagonal state with the given (normalized) populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let total: f64 = populations.iter().sum();
        let d = nalgebra::DVector::from_iterator(
            populations.len(),
            populations.iter().map(|p| Complex64::new(p / total, 0.0)),
        );
        Self::new(ComplexMatrix::from_diagonal(&d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn population(&self, n: usize) -> f64 {
        self.0[(n, n)].re
    }

    /// `⟨a†a⟩`.
    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim()).map(|n| n as f64 * self.population(n)).sum()
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Sum of the `k`-th lower diagonal, `Σ_m ρ_{m+k, m}`.
    pub fn diagonal_sum(&self, k: usize) -> Complex64 {
        (0..self.dim().saturating_sub(k))
            .map(|m| self.0[(m + k, m)])
            .sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.0.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `(1 − p)ρ + p·I/dim`.
    pub fn with_white_noise(&self, p: f64) -> Result<Self> {
        apply_white_noise(self, p)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&DensityFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: DensityFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Mixes `rho` with the maximally mixed state: `(1 − p)ρ + p·I/dim`.
pub fn apply_white_noise(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CoreError::Domain(format!(
            "white-noise fraction must lie in [0, 1], got {p}"
        )));
    }
    let dim = rho.dim();
    let floor = p / dim as f64;
    let mut m = rho.matrix() * Complex64::new(1.0 - p, 0.0);
    for n in 0..dim {
        m[(n, n)] += floor;
    }
    Ok(DensityMatrix(m))
}

pub(crate) fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityFile {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl From<&DensityMatrix> for DensityFile {
    fn from(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let z = rho.get(i, j);
                entries.push([z.re, z.im]);
            }
        }
        Self { dim, entries }
    }
}

impl TryFrom<DensityFile> for DensityMatrix {
    type Error = CoreError;

    fn try_from(f: DensityFile) -> Result<Self> {
        if f.entries.len() != f.dim * f.dim {
            return Err(CoreError::InvalidDensity(format!(
                "expected {} entries for dim {}, found {}",
                f.dim * f.dim,
                f.dim,
                f.entries.len()
            )));
        }
        let m = ComplexMatrix::from_fn(f.dim, f.dim, |i, j| {
            let [re, im] = f.entries[i * f.dim + j];
            Complex64::new(re, im)
        });
        DensityMatrix::new(m)
    }
}
