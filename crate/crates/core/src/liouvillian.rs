//! Liouvillian superoperator of the master equation
//!
//! ```text
//! dρ/dt = −i[H, ρ] + γ1 D[a†]ρ + γ2 D[a²]ρ + γ3 D[a]ρ,
//! D[L]ρ = LρL† − ½(L†Lρ + ρL†L).
//! ```
//!
//! Density matrices are flattened by **column stacking**: element `ρ[i, j]`
//! lives at index `i + dim·j`. With that convention
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`, and the superoperator is assembled from
//! that identity one term at a time.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::hilbert::{annihilation, hamiltonian, ComplexMatrix, OscillatorParams, I};
use crate::sparse::{nonzeros, SparseMatrix};

/// Flattens `rho` in column-stacking order.
pub fn vectorize(rho: &ComplexMatrix) -> Vec<Complex64> {
    // nalgebra storage is column-major, which is exactly column stacking.
    rho.as_slice().to_vec()
}

pub fn unvectorize(v: &[Complex64], dim: usize) -> Result<ComplexMatrix> {
    if v.len() != dim * dim {
        return Err(CoreError::Dimension(format!(
            "vector of length {} cannot be reshaped to {dim}x{dim}",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_column_slice(dim, dim, v))
}

/// A Lindblad generator in sparse superoperator form.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    matrix: SparseMatrix,
}

/// Accumulates the superoperator of `ρ ↦ c · AρB` into `out`.
fn push_sandwich(
    out: &mut Vec<(usize, usize, Complex64)>,
    dim: usize,
    c: Complex64,
    a: &[(usize, usize, Complex64)],
    b: &[(usize, usize, Complex64)],
) {
    // (Bᵀ ⊗ A)[(p·d + i), (q·d + j)] = B[q, p] · A[i, j]
    for &(q, p, bv) in b {
        for &(i, j, av) in a {
            out.push((p * dim + i, q * dim + j, c * bv * av));
        }
    }
}

fn identity_entries(dim: usize) -> Vec<(usize, usize, Complex64)> {
    (0..dim).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect()
}

impl Liouvillian {
    /// Builds the generator for the oscillator. Jump operators with zero
    /// rate are omitted.
    pub fn new(params: &OscillatorParams) -> Result<Self> {
        params.validate()?;
        let dim = params.fock_dim;
        let h = hamiltonian(params)?;
        let a = annihilation(dim)?;
        let jumps = [
            (params.gamma1, a.adjoint()),
            (params.gamma2, &a * &a),
            (params.gamma3, a),
        ];
        Ok(Self::from_parts(&h, &jumps))
    }

    /// Builds `−i[H, ·] + Σ_k γ_k D[L_k]` from explicit operators.
    pub fn from_parts(h: &ComplexMatrix, jumps: &[(f64, ComplexMatrix)]) -> Self {
        let dim = h.nrows();
        let id = identity_entries(dim);
        let hz = nonzeros(h);
        let mut triplets = Vec::new();
        push_sandwich(&mut triplets, dim, -I, &hz, &id);
        push_sandwich(&mut triplets, dim, I, &id, &hz);
        for (rate, l) in jumps {
            if *rate == 0.0 {
                continue;
            }
            let ldag = l.adjoint();
            let ldl = &ldag * l;
            let lz = nonzeros(l);
            let ldz = nonzeros(&ldag);
            let ldlz = nonzeros(&ldl);
            let g = Complex64::new(*rate, 0.0);
            let half = Complex64::new(-0.5 * rate, 0.0);
            push_sandwich(&mut triplets, dim, g, &lz, &ldz);
            push_sandwich(&mut triplets, dim, half, &ldlz, &id);
            push_sandwich(&mut triplets, dim, half, &id, &ldlz);
        }
        Self {
            dim,
            matrix: SparseMatrix::from_triplets(dim * dim, triplets),
        }
    }

    /// Hilbert-space dimension (the superoperator is `dim² × dim²`).
    pub fn hilbert_dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.matrix.mul_vec(v)
    }

    /// `dρ/dt` for the given state.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let out = self.apply_vec(&vectorize(rho));
        ComplexMatrix::from_column_slice(self.dim, self.dim, &out)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        self.matrix.to_dense()
    }
}

/// Dense `dim² × dim²` Liouvillian in column-stacking convention.
pub fn build_liouvillian(params: &OscillatorParams) -> Result<ComplexMatrix> {
    Ok(Liouvillian::new(params)?.to_dense())
}
