//! Steady states of the oscillator master equation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{hermiticity_error, DensityMatrix, PSD_TOL};
use crate::error::{CoreError, Result};
use crate::hilbert::{ComplexMatrix, OscillatorParams};
use crate::liouvillian::{unvectorize, vectorize, Liouvillian};
use crate::solver::{choose_row, solve_trace_constrained, Backend, RowChoice};

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-6;

/// Tolerances and strategy for a steady-state solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub residual_tol: f64,
    pub truncation_tol: f64,
    /// Extra attempts, each at `fock_dim + 10`, when the truncation check fails.
    pub auto_retries: u32,
    pub backend: Backend,
    pub row: RowChoice,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            residual_tol: DEFAULT_RESIDUAL_TOL,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
            auto_retries: 0,
            backend: Backend::Sparse,
            row: RowChoice::SmallestNorm,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyStateReport {
    pub rho: DensityMatrix,
    /// `‖L·vec(ρ)‖∞` against the unmodified Liouvillian.
    pub residual: f64,
    /// Population of the two highest Fock levels.
    pub top_population: f64,
    pub min_eigenvalue: f64,
    pub converged: bool,
    /// Truncation actually used (may exceed the request after retries).
    pub fock_dim: usize,
}

/// Truncation heuristic: the limit cycle shrinks as `γ2/γ1` grows.
pub fn default_fock_dim(gamma1: f64, gamma2: f64) -> usize {
    let ratio = gamma2 / gamma1;
    if ratio >= 10.0 {
        20
    } else if ratio >= 1.0 {
        40
    } else {
        60
    }
}

/// Solves `L ρ = 0, Tr ρ = 1` at `params.fock_dim`.
///
/// Non-convergence is reported through [`SteadyStateReport::converged`], not
/// as an error. Errors are reserved for invalid input and singular systems.
pub fn solve_steady_state(
    params: &OscillatorParams,
    residual_tol: f64,
    truncation_tol: f64,
) -> Result<SteadyStateReport> {
    let config = SolverConfig {
        residual_tol,
        truncation_tol,
        ..Default::default()
    };
    solve_with(params, &config)
}

/// Like [`solve_steady_state`], but honors the full [`SolverConfig`],
/// including automatic dimension retries.
pub fn solve_with(params: &OscillatorParams, config: &SolverConfig) -> Result<SteadyStateReport> {
    let mut attempt = *params;
    let mut report = solve_once(&attempt, config)?;
    for _ in 0..config.auto_retries {
        if report.top_population < config.truncation_tol {
            break;
        }
        attempt.fock_dim += 10;
        report = solve_once(&attempt, config)?;
    }
    Ok(report)
}

fn solve_once(params: &OscillatorParams, config: &SolverConfig) -> Result<SteadyStateReport> {
    let l = Liouvillian::new(params)?;
    let dim = params.fock_dim;
    let row = choose_row(l.matrix(), dim, config.row)?;
    let x = solve_trace_constrained(l.matrix(), dim, row, config.backend)?;
    let raw = unvectorize(&x, dim)?;
    if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CoreError::DegenerateDynamics(
            "solve produced non-finite entries".into(),
        ));
    }
    let rho = normalize_hermitian(&raw)?;
    debug_assert!(hermiticity_error(&rho) == 0.0);

    let residual = l
        .apply_vec(&vectorize(&rho))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let top_population = (dim - 2..dim)
        .map(|n| rho[(n, n)].re)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    let rho = DensityMatrix::from_matrix_unchecked(rho);
    let min_eigenvalue = rho.min_eigenvalue();
    let converged = residual < config.residual_tol
        && top_population < config.truncation_tol
        && min_eigenvalue > -PSD_TOL;
    Ok(SteadyStateReport {
        rho,
        residual,
        top_population,
        min_eigenvalue,
        converged,
        fock_dim: dim,
    })
}

/// `(ρ + ρ†)/2`, rescaled to unit trace.
fn normalize_hermitian(raw: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = raw.nrows();
    let mut rho = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        rho[(i, i)] = Complex64::new(raw[(i, i)].re, 0.0);
        for j in 0..i {
            let z = (raw[(i, j)] + raw[(j, i)].conj()) * 0.5;
            rho[(i, j)] = z;
            rho[(j, i)] = z.conj();
        }
    }
    let tr = rho.trace().re;
    if !(tr.is_finite() && tr > 0.0) {
        return Err(CoreError::DegenerateDynamics(format!(
            "steady state has trace {tr}"
        )));
    }
    Ok(rho / Complex64::new(tr, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn max_offdiag(rho: &DensityMatrix) -> f64 {
        let d = rho.dim();
        let mut m: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    m = m.max(rho.get(i, j).norm());
                }
            }
        }
        m
    }

    #[test]
    fn undriven_limit_cycle_is_diagonal() {
        for gamma2 in [0.5, 1.0, 10.0] {
            let p = OscillatorParams {
                gamma2,
                fock_dim: 30,
                ..Default::default()
            };
            let r = solve_steady_state(&p, 1e-9, 1e-6).unwrap();
            assert!(max_offdiag(&r.rho) < 1e-10);
            assert!(r.converged, "gamma2={gamma2}: {:?}", r.top_population);
        }
    }

    #[test]
    fn deep_quantum_populations() {
        // γ2 → ∞ gives ρ00 : ρ11 = 2 : 1 with vanishing ρ22.
        let p = OscillatorParams {
            gamma2: 300.0,
            fock_dim: 6,
            ..Default::default()
        };
        let r = solve_steady_state(&p, 1e-9, 1e-6).unwrap();
        assert!((r.rho.population(0) - 2.0 / 3.0).abs() < 5e-3);
        assert!((r.rho.population(1) - 1.0 / 3.0).abs() < 5e-3);
        assert!(r.rho.population(2) < 2e-3);
        assert!(r.converged);
    }

    #[test]
    fn fig1_state_is_valid() {
        let p = OscillatorParams {
            drive_e: 0.5,
            eta: 0.5,
            phi: FRAC_PI_2,
            fock_dim: 30,
            ..Default::default()
        };
        let r = solve_steady_state(&p, 1e-9, 1e-6).unwrap();
        assert!(r.converged);
        assert!(r.residual < 1e-12);
        assert!((r.rho.trace().re - 1.0).abs() < 1e-13);
        assert!(DensityMatrix::new(r.rho.matrix().clone()).is_ok());
        assert!(r.min_eigenvalue > -1e-8);
    }

    #[test]
    fn gain_only_piles_up_at_the_top() {
        let p = OscillatorParams {
            gamma2: 0.0,
            fock_dim: 5,
            ..Default::default()
        };
        let r = solve_steady_state(&p, 1e-9, 1e-6).unwrap();
        assert!(!r.converged);
        assert!((r.top_population - 1.0).abs() < 1e-12);
    }

    #[test]
    fn retries_grow_the_truncation() {
        let p = OscillatorParams {
            drive_e: 1.5,
            gamma2: 1.0,
            fock_dim: 5,
            ..Default::default()
        };
        let cfg = SolverConfig {
            auto_retries: 3,
            ..Default::default()
        };
        let r = solve_with(&p, &cfg).unwrap();
        assert!(r.fock_dim > 5);
        assert!(r.converged);
    }

    #[test]
    fn backends_and_row_choices_agree() {
        let p = OscillatorParams {
            drive_e: 0.4,
            eta: 0.3,
            phi: 0.7,
            gamma2: 2.0,
            gamma3: 0.2,
            fock_dim: 10,
            ..Default::default()
        };
        let reference = solve_with(&p, &SolverConfig::default()).unwrap().rho;
        for backend in [Backend::Sparse, Backend::Dense] {
            for row in [
                RowChoice::Level(0),
                RowChoice::Level(4),
                RowChoice::Level(9),
            ] {
                let cfg = SolverConfig {
                    backend,
                    row,
                    ..Default::default()
                };
                let rho = solve_with(&p, &cfg).unwrap().rho;
                let diff = (rho.matrix() - reference.matrix())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-8, "{backend:?} {row:?}: {diff}");
            }
        }
    }

    #[test]
    fn default_dims() {
        assert_eq!(default_fock_dim(1.0, 10.0), 20);
        assert_eq!(default_fock_dim(1.0, 300.0), 20);
        assert_eq!(default_fock_dim(1.0, 1.0), 40);
        assert_eq!(default_fock_dim(1.0, 0.5), 60);
    }
}
