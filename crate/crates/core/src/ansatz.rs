//! Three-level ansatz and closed-form limits for `γ2/γ1 → ∞`, `γ3 = η = 0`.
//!
//! The ansatz entries are divided by their own trace, so the state is
//! normalized for every `γ2`. As `γ2 → ∞`,
//! `ρ00 → (12E²+18)/(24E²+27)`, `ρ11 → (12E²+9)/(24E²+27)` and
//! `|ρ01| → 2E/(9+8E²)`.

use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{CoreError, Result};
use crate::hilbert::ComplexMatrix;
use crate::measures::PhaseDistribution;

/// Drive strength above which the limits are flagged as unreliable.
pub const VALIDITY_MAX_DRIVE: f64 = 0.3;

/// Drives below this count as zero in [`limit_cfi`].
const CFI_ZERO_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzState {
    pub rho00: f64,
    pub rho11: f64,
    pub rho22: f64,
    pub rho01: Complex64,
    pub normalized: bool,
}

impl AnsatzState {
    /// Embeds the state in a `dim`-level Fock space.
    pub fn to_density(&self, dim: usize) -> Result<DensityMatrix> {
        if dim < 3 {
            return Err(CoreError::Dimension(format!(
                "ansatz needs at least 3 levels, got {dim}"
            )));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(0, 0)] = self.rho00.into();
        m[(1, 1)] = self.rho11.into();
        m[(2, 2)] = self.rho22.into();
        m[(0, 1)] = self.rho01;
        m[(1, 0)] = self.rho01.conj();
        DensityMatrix::new(m)
    }
}

fn check_drive(e: f64) -> Result<()> {
    if !(e.is_finite() && e >= 0.0) {
        return Err(CoreError::InvalidParameter {
            field: "drive_e",
            reason: format!("must be finite and >= 0, got {e}"),
        });
    }
    Ok(())
}

/// Trace-normalized ansatz at drive `e` and two-photon loss `gamma2`
/// (`γ1 = 1`).
pub fn ansatz_density(e: f64, gamma2: f64) -> Result<AnsatzState> {
    check_drive(e)?;
    if !(gamma2.is_finite() && gamma2 > 0.0) {
        return Err(CoreError::InvalidParameter {
            field: "gamma2",
            reason: format!("must be finite and > 0, got {gamma2}"),
        });
    }
    let e2 = e * e;
    let p00 = gamma2 * (12.0 * e2 + 18.0);
    let p11 = gamma2 * (12.0 * e2 + 9.0);
    let p22 = 12.0 * e2 + 9.0;
    let trace = p00 + p11 + p22;
    Ok(AnsatzState {
        rho00: p00 / trace,
        rho11: p11 / trace,
        rho22: p22 / trace,
        rho01: Complex64::new(0.0, 6.0 * gamma2 * e / trace),
        normalized: true,
    })
}

/// True when `e` lies inside the range where the limits are trustworthy.
pub fn within_validity(e: f64) -> bool {
    e <= VALIDITY_MAX_DRIVE
}

pub fn limit_mrl1(e: f64) -> f64 {
    2.0 * e / (9.0 + 8.0 * e * e)
}

pub fn limit_qfi(e: f64) -> f64 {
    let m = limit_mrl1(e);
    4.0 * m * m
}

pub fn limit_pcoh(e: f64) -> f64 {
    let e2 = e * e;
    2.0 * e / ((8.0 * e2 + 9.0) * (4.0 * e2 + 3.0)).sqrt()
}

pub fn limit_speak(e: f64) -> f64 {
    4.0 * e / (9.0 + 8.0 * e * e)
}

/// Phase-shift Fisher information of the limiting distribution.
///
/// Evaluated in a rearranged form free of the `(λ − 9 − 8E²)²` cancellation,
/// which is exact algebraically but loses all digits near `E = 0` in floating
/// point.
pub fn limit_cfi(e: f64) -> f64 {
    if e < CFI_ZERO_GUARD {
        return 0.0;
    }
    let e2 = e * e;
    let e4 = e2 * e2;
    let e6 = e4 * e2;
    let e8 = e4 * e4;
    let s = 9.0 + 8.0 * e2;
    let lambda = ((s + 4.0 * e) * (s - 4.0 * e)).sqrt();
    let alpha = 729.0 + 1836.0 * e2 + 1632.0 * e4 + 512.0 * e6;
    let beta = -6561.0 - 21708.0 * e2 - 28288.0 * e4 - 17152.0 * e6 - 4096.0 * e8;
    4.0 * e2 * lambda * (lambda + s).powi(2) / ((alpha * lambda - beta) * s)
}

/// `(1/2π)(1 − (4E/(9+8E²)) cos Φ)` on a grid of `grid_size` points.
pub fn limit_pdist(e: f64, grid_size: usize) -> Result<PhaseDistribution> {
    check_drive(e)?;
    PhaseDistribution::from_fourier(
        vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-limit_speak(e) / 2.0, 0.0),
        ],
        grid_size,
    )
}

/// All closed-form limits at one drive strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub e: f64,
    pub mrl1: f64,
    pub qfi: f64,
    pub pcoh: f64,
    pub speak: f64,
    pub cfi: f64,
    /// Set when `e` exceeds [`VALIDITY_MAX_DRIVE`].
    pub outside_validity: bool,
}

pub fn limits(e: f64) -> Result<LimitRow> {
    check_drive(e)?;
    Ok(LimitRow {
        e,
        mrl1: limit_mrl1(e),
        qfi: limit_qfi(e),
        pcoh: limit_pcoh(e),
        speak: limit_speak(e),
        cfi: limit_cfi(e),
        outside_validity: !within_validity(e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::OscillatorParams;
    use crate::measures::{cfi, measure_all, MeasureConfig, DEFAULT_CFI_FLOOR};
    use crate::steady::solve_steady_state;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    /// The Fisher information as literally printed, with its coefficients.
    fn printed_cfi(e: f64) -> f64 {
        let e2 = e * e;
        let lambda = ((9.0 + 4.0 * e + 8.0 * e2) * (9.0 - 4.0 * e + 8.0 * e2)).sqrt();
        let a0 = 729.0 * (lambda - 9.0);
        let a1 = 108.0 * (17.0 * lambda - 201.0);
        let a2 = 544.0 * (3.0 * lambda - 52.0);
        let a3 = 256.0 * (2.0 * lambda - 67.0);
        let a4 = -4096.0;
        4.0 * (a0 + a1 * e2 + a2 * e2 * e2 + a3 * e2.powi(3) + a4 * e2.powi(4))
            / (lambda * (9.0 + 8.0 * e2) * (lambda - 9.0 - 8.0 * e2).powi(2))
    }

    #[test]
    fn stable_cfi_matches_printed_form_where_it_is_well_conditioned() {
        for e in [0.3, 0.5, 1.0, 2.0, 5.0] {
            assert_relative_eq!(limit_cfi(e), printed_cfi(e), max_relative = 1e-9);
        }
    }

    #[test]
    fn cfi_equals_cardioid_fisher_information() {
        // The limit distribution is a cardioid of depth b = 4E/(9+8E²).
        for e in [1e-6, 1e-3, 0.05, 0.3, 1.0, 3.0] {
            let b = limit_speak(e);
            let expected = b * b / (1.0 + (1.0 - b * b).sqrt());
            assert_relative_eq!(limit_cfi(e), expected, max_relative = 1e-12);
        }
        assert_eq!(limit_cfi(0.0), 0.0);
    }

    #[test]
    fn closed_forms_at_known_points() {
        assert_abs_diff_eq!(limit_mrl1(0.5), 1.0 / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(limit_speak(0.5), 2.0 / 11.0, epsilon = 1e-15);
        for f in [limit_mrl1, limit_qfi, limit_pcoh, limit_speak, limit_cfi] {
            assert_eq!(f(0.0), 0.0);
        }
        let p = limit_pdist(0.1, 4096).unwrap();
        let amp =
            p.samples().iter().cloned().fold(f64::MIN, f64::max) * std::f64::consts::TAU - 1.0;
        assert_abs_diff_eq!(amp, 0.4 / 9.08, epsilon = 1e-12);
        assert_abs_diff_eq!(
            cfi(&p, DEFAULT_CFI_FLOOR).value,
            limit_cfi(0.1),
            epsilon = 1e-12
        );
    }

    #[test]
    fn validity_marker() {
        assert!(!limits(0.3).unwrap().outside_validity);
        assert!(limits(0.31).unwrap().outside_validity);
        assert!(limits(-1.0).is_err());
    }

    #[test]
    fn ansatz_approaches_limits() {
        let st = ansatz_density(0.0, 1e12).unwrap();
        assert_abs_diff_eq!(st.rho00, 2.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(st.rho11, 1.0 / 3.0, epsilon = 1e-10);
        for e in [0.05, 0.2, 0.7] {
            let st = ansatz_density(e, 1e12).unwrap();
            assert_abs_diff_eq!(st.rho01.norm(), limit_mrl1(e), epsilon = 1e-10);
            let m = measure_all(&st.to_density(3).unwrap(), &MeasureConfig::default()).unwrap();
            assert_relative_eq!(m.s_pcoh, limit_pcoh(e), max_relative = 1e-9);
            assert_relative_eq!(m.mrl1, limit_mrl1(e), max_relative = 1e-9);
        }
    }

    #[test]
    fn ansatz_matches_numeric_steady_state() {
        // Entry errors fall off like 1/γ2. The coherence is compared by
        // modulus: the ansatz puts it on the imaginary axis, the solver's
        // drive term on the real axis.
        let e = 0.05;
        for (gamma2, tol) in [(300.0, 1.5e-3), (3000.0, 1.5e-4)] {
            let st = ansatz_density(e, gamma2).unwrap();
            let p = OscillatorParams {
                drive_e: e,
                gamma2,
                fock_dim: 10,
                ..Default::default()
            };
            let rho = solve_steady_state(&p, 1e-9, 1e-6).unwrap().rho;
            assert!((rho.population(0) - st.rho00).abs() < tol);
            assert!((rho.population(1) - st.rho11).abs() < tol);
            assert!((rho.population(2) - st.rho22).abs() < tol);
            assert!((rho.get(0, 1).norm() - st.rho01.norm()).abs() < tol);
        }
    }

    proptest! {
        #[test]
        fn ansatz_is_a_state(e in 0.0..3.0f64, gamma2 in 0.01..1e4f64) {
            let st = ansatz_density(e, gamma2).unwrap();
            prop_assert!((st.rho00 + st.rho11 + st.rho22 - 1.0).abs() < 1e-14);
            prop_assert!(st.rho00 >= 0.0 && st.rho11 >= 0.0 && st.rho22 >= 0.0);
            prop_assert_eq!(st.rho01.re, 0.0);
            prop_assert!(st.to_density(3).unwrap().min_eigenvalue() > -1e-12);
        }

        #[test]
        fn speak_is_twice_mrl1(e in 0.0..0.3f64) {
            prop_assert!((limit_speak(e) - 2.0 * limit_mrl1(e)).abs() <= 1e-16);
        }
    }
}
