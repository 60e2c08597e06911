//! Shared fixtures for the benchmarks.

use std::f64::consts::FRAC_PI_2;

use qsync_core::OscillatorParams;

/// Drive plus squeezing, a state with two phase peaks.
pub fn two_peak_params(fock_dim: usize) -> OscillatorParams {
    OscillatorParams {
        drive_e: 0.5,
        eta: 0.5,
        phi: FRAC_PI_2,
        fock_dim,
        ..Default::default()
    }
}
