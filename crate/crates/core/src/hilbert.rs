//! Truncated Fock-space operators and the oscillator Hamiltonian.
//!
//! All operators are dense `dim × dim` complex matrices in the Fock basis
//! `|0⟩, …, |dim−1⟩`. The ladder operators are truncated copies of the
//! infinite ones, so `[a, a†]` deviates from the identity on the top level.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{CoreError, Result};

/// Dense complex matrix in the Fock basis.
pub type ComplexMatrix = DMatrix<Complex64>;

pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Physical parameters of the driven, squeezed van der Pol oscillator.
///
/// Rates are usually quoted in units of `gamma1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscillatorParams {
    /// Detuning between oscillator and drive.
    pub delta: f64,
    /// Coherent (single-photon) drive amplitude.
    pub drive_e: f64,
    /// Squeezing (two-photon drive) amplitude.
    pub eta: f64,
    /// Squeezing phase, in `[0, 2π)`.
    pub phi: f64,
    /// Negative damping (single-photon gain) rate.
    pub gamma1: f64,
    /// Nonlinear (two-photon) damping rate.
    pub gamma2: f64,
    /// Linear (single-photon) damping rate.
    pub gamma3: f64,
    /// White-noise mixing fraction applied to the steady state.
    pub white_noise_p: f64,
    /// Fock-space truncation.
    pub fock_dim: usize,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self {
            delta: 0.0,
            drive_e: 0.0,
            eta: 0.0,
            phi: 0.0,
            gamma1: 1.0,
            gamma2: 1.0,
            gamma3: 0.0,
            white_noise_p: 0.0,
            fock_dim: 40,
        }
    }
}

fn invalid(field: &'static str, reason: impl Into<String>) -> CoreError {
    CoreError::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

impl OscillatorParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("delta", self.delta),
            ("drive_e", self.drive_e),
            ("eta", self.eta),
            ("phi", self.phi),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("white_noise_p", self.white_noise_p),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(invalid(field, "must be finite"));
            }
        }
        if self.drive_e < 0.0 {
            return Err(invalid("drive_e", "must be nonnegative"));
        }
        if self.eta < 0.0 {
            return Err(invalid("eta", "must be nonnegative"));
        }
        if !(0.0..TAU).contains(&self.phi) {
            return Err(invalid("phi", "must lie in [0, 2π)"));
        }
        if self.gamma1 <= 0.0 {
            return Err(invalid("gamma1", "must be strictly positive"));
        }
        if self.gamma2 < 0.0 {
            return Err(invalid("gamma2", "must be nonnegative"));
        }
        if self.gamma3 < 0.0 {
            return Err(invalid("gamma3", "must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.white_noise_p) {
            return Err(invalid("white_noise_p", "must lie in [0, 1]"));
        }
        if self.fock_dim < 3 {
            return Err(invalid(
                "fock_dim",
                "must be at least 3 (two-photon loss needs three levels)",
            ));
        }
        Ok(())
    }
}

/// Truncated annihilation operator: `⟨n−1|a|n⟩ = √n`.
pub fn annihilation(dim: usize) -> Result<ComplexMatrix> {
    if dim < 2 {
        return Err(CoreError::Dimension(format!(
            "ladder operators need dim >= 2, got {dim}"
        )));
    }
    let mut a = ComplexMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Ok(a)
}

pub fn creation(dim: usize) -> Result<ComplexMatrix> {
    Ok(annihilation(dim)?.adjoint())
}

/// `a†a = diag(0, 1, …, dim−1)`.
pub fn number_operator(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(i as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `H = Δ a†a + iE(a − a†) + iη(a†² e^{2iφ} − a² e^{−2iφ})` in the rotating frame.
///
/// Entries are written directly rather than through matrix products so the
/// result is Hermitian bit-for-bit.
pub fn hamiltonian(params: &OscillatorParams) -> Result<ComplexMatrix> {
    let dim = params.fock_dim;
    if dim < 2 {
        return Err(CoreError::Dimension(format!(
            "Hamiltonian needs dim >= 2, got {dim}"
        )));
    }
    let mut h = ComplexMatrix::zeros(dim, dim);
    for n in 0..dim {
        h[(n, n)] = Complex64::new(params.delta * n as f64, 0.0);
    }
    // iE(a − a†): (n−1, n) = iE√n, (n, n−1) = −iE√n.
    for n in 1..dim {
        let v = I * params.drive_e * (n as f64).sqrt();
        h[(n - 1, n)] += v;
        h[(n, n - 1)] -= v;
    }
    // iη(a†² e^{2iφ} − a² e^{−2iφ}): a†² has (n, n−2) = √(n(n−1)).
    let phase = Complex64::from_polar(1.0, 2.0 * params.phi);
    for n in 2..dim {
        let s = ((n * (n - 1)) as f64).sqrt();
        let up = I * params.eta * s * phase;
        h[(n, n - 2)] += up;
        h[(n - 2, n)] += up.conj();
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_abs(m: &ComplexMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn annihilation_dim3() {
        let a = annihilation(3).unwrap();
        assert_eq!(a[(0, 1)], c(1.0, 0.0));
        assert_eq!(a[(1, 2)], c(2f64.sqrt(), 0.0));
        let nnz = a.iter().filter(|z| z.norm() != 0.0).count();
        assert_eq!(nnz, 2);
    }

    #[test]
    fn annihilation_rejects_small_dims() {
        assert!(matches!(annihilation(1), Err(CoreError::Dimension(_))));
        assert!(matches!(annihilation(0), Err(CoreError::Dimension(_))));
    }

    #[test]
    fn number_operator_identity() {
        for dim in [2, 5, 17] {
            let a = annihilation(dim).unwrap();
            let n = a.adjoint() * &a;
            assert_abs_diff_eq!(max_abs(&(n - number_operator(dim))), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn commutator_truncation_artifact() {
        let a = annihilation(10).unwrap();
        let ad = a.adjoint();
        let comm = &a * &ad - &ad * &a;
        for i in 0..10 {
            for j in 0..10 {
                let expected = match (i == j, i) {
                    (true, 9) => -9.0,
                    (true, _) => 1.0,
                    _ => 0.0,
                };
                assert_abs_diff_eq!(comm[(i, j)].re, expected, epsilon = 1e-12);
                assert_abs_diff_eq!(comm[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pure_number_hamiltonian() {
        let p = OscillatorParams {
            delta: 1.0,
            fock_dim: 4,
            ..Default::default()
        };
        let h = hamiltonian(&p).unwrap();
        assert_eq!(h, number_operator(4));
    }

    #[test]
    fn drive_only_hamiltonian() {
        let p = OscillatorParams {
            drive_e: 0.5,
            fock_dim: 3,
            ..Default::default()
        };
        let h = hamiltonian(&p).unwrap();
        for n in 1..3 {
            let s = (n as f64).sqrt();
            assert_abs_diff_eq!(h[(n - 1, n)].im, 0.5 * s, epsilon = 1e-15);
            assert_abs_diff_eq!(h[(n, n - 1)].im, -0.5 * s, epsilon = 1e-15);
        }
        assert_eq!(h[(0, 2)], c(0.0, 0.0));
    }

    #[test]
    fn squeezing_term_matches_operator_products() {
        let p = OscillatorParams {
            drive_e: 0.5,
            eta: 0.5,
            phi: FRAC_PI_2,
            fock_dim: 8,
            ..Default::default()
        };
        let h = hamiltonian(&p).unwrap();
        let a = annihilation(8).unwrap();
        let ad = a.adjoint();
        let e2 = Complex64::from_polar(1.0, 2.0 * p.phi);
        let reference =
            (&a - &ad) * (I * p.drive_e) + (&ad * &ad * e2 - &a * &a * e2.conj()) * (I * p.eta);
        assert!(max_abs(&(&h - reference)) < 1e-14);
        // e^{2iφ} = −1 at φ = π/2, so the (n, n−2) entries are −iη√(n(n−1)).
        assert_abs_diff_eq!(h[(2, 0)].im, -0.5 * 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(h[(2, 0)].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn validation_names_offending_field() {
        let bad = OscillatorParams {
            gamma1: 0.0,
            ..Default::default()
        };
        match bad.validate() {
            Err(CoreError::InvalidParameter { field, .. }) => assert_eq!(field, "gamma1"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = OscillatorParams {
            fock_dim: 2,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = OscillatorParams {
            white_noise_p: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    fn params_strategy() -> impl Strategy<Value = OscillatorParams> {
        (-2.0..2.0f64, 0.0..2.0f64, 0.0..2.0f64, 0.0..TAU, 3usize..25).prop_map(
            |(delta, drive_e, eta, phi, fock_dim)| OscillatorParams {
                delta,
                drive_e,
                eta,
                phi,
                fock_dim,
                ..Default::default()
            },
        )
    }

    proptest! {
        #[test]
        fn hamiltonian_is_hermitian(p in params_strategy()) {
            let h = hamiltonian(&p).unwrap();
            prop_assert!(max_abs(&(&h - h.adjoint())) < 1e-14);
        }

        #[test]
        fn hamiltonian_is_linear_in_couplings(
            p in params_strategy(),
            q in params_strategy(),
            s in -2.0..2.0f64,
        ) {
            // Superposition over (Δ, E, η) at fixed φ and dimension. E and η may go
            // negative in the combination; the Hamiltonian is still linear there.
            let q = OscillatorParams { phi: p.phi, fock_dim: p.fock_dim, ..q };
            let combo = OscillatorParams {
                delta: p.delta + s * q.delta,
                drive_e: p.drive_e + s * q.drive_e,
                eta: p.eta + s * q.eta,
                ..p
            };
            let lhs = hamiltonian(&combo).unwrap();
            let rhs = hamiltonian(&p).unwrap() + hamiltonian(&q).unwrap() * c(s, 0.0);
            prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
        }
    }
}
