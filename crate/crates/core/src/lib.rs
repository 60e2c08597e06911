//! Quantum van der Pol oscillator with coherent and squeezing drives:
//! Lindblad steady states and measures of phase synchronization.
//!
//! ```no_run
//! use qsync_core::{measure_all, solve_steady_state, MeasureConfig, OscillatorParams};
//!
//! let params = OscillatorParams { drive_e: 0.5, ..Default::default() };
//! let report = solve_steady_state(&params, 1e-9, 1e-6)?;
//! let m = measure_all(&report.rho, &MeasureConfig::default())?;
//! println!("mrl1 = {}", m.mrl1);
//! # Ok::<(), qsync_core::CoreError>(())
//! ```

pub mod ansatz;
pub mod density;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod liouvillian;
pub mod measures;
pub mod solver;
pub mod sparse;
pub mod steady;

pub use density::{apply_white_noise, DensityMatrix};
pub use error::{CoreError, Result};
pub use hilbert::{ComplexMatrix, OscillatorParams};
pub use measures::{measure_all, Measure, MeasureConfig, MeasureSet, PhaseDistribution};
pub use steady::{
    default_fock_dim, solve_steady_state, solve_with, SolverConfig, SteadyStateReport,
};

pub use num_complex::Complex64;
