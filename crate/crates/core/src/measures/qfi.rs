//! Quantum Fisher information of the steady state for the generator `a†a`.

use nalgebra::{DVector, SymmetricEigen};

use crate::density::DensityMatrix;
use crate::hilbert::ComplexMatrix;

pub const DEFAULT_QFI_CUTOFF: f64 = 1e-12;

/// Spectral decomposition of a density matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn new(rho: &DensityMatrix) -> Self {
        let eig = SymmetricEigen::new(rho.matrix().clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = ComplexMatrix::from_columns(
            &order
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned())
                .collect::<Vec<DVector<_>>>(),
        );
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    /// `Σ_k λ_k |k⟩⟨k|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let lam = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| l.into()),
        );
        v * ComplexMatrix::from_diagonal(&lam) * v.adjoint()
    }
}

/// `2 Σ_{k,l} (λ_k − λ_l)² / (λ_k + λ_l) |⟨k|a†a|l⟩|²` over ordered pairs with
/// `λ_k + λ_l > cutoff`.
pub fn qfi_from_eigen(eig: &EigenDecomposition, cutoff: f64) -> f64 {
    let v = &eig.eigenvectors;
    let dim = v.nrows();
    // ⟨k|A|l⟩ with A = diag(0, 1, …, dim − 1).
    let av = ComplexMatrix::from_fn(dim, dim, |n, l| v[(n, l)] * n as f64);
    let a_kl = v.adjoint() * av;
    let lam = &eig.eigenvalues;
    let mut total = 0.0;
    for k in 0..dim {
        for l in 0..dim {
            let s = lam[k] + lam[l];
            if s > cutoff {
                let d = lam[k] - lam[l];
                total += d * d / s * a_kl[(k, l)].norm_sqr();
            }
        }
    }
    (2.0 * total).max(0.0)
}

pub fn qfi(rho: &DensityMatrix, cutoff: f64) -> f64 {
    qfi_from_eigen(&EigenDecomposition::new(rho), cutoff)
}
