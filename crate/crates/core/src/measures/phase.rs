//! Phase distribution `P(Φ) = (1/2π)⟨Φ|ρ|Φ⟩` with `|Φ⟩ = Σ_n e^{inΦ}|n⟩`.
//!
//! Writing `c_n = Σ_m ρ_{m+n,m}` for the lower-diagonal sums,
//!
//! ```text
//! P(Φ) = (1/2π) [1 + 2 Σ_{n≥1} Re(c_n e^{−inΦ})],
//! ```
//!
//! so `c_n = ∫ P(Φ) e^{inΦ} dΦ` is exactly the `n`-th circular moment.
//! `P` is a trigonometric polynomial of degree `dim − 1`; grid samples are
//! evaluated from the Fourier form and carry no discretization error.

use num_complex::Complex64;
use std::f64::consts::TAU;
use std::io::Write;

use crate::density::DensityMatrix;
use crate::error::{CoreError, Result};

pub const DEFAULT_GRID_SIZE: usize = 4096;
pub const DEFAULT_CFI_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    fourier: Vec<Complex64>,
    grid_size: usize,
    /// `2πP(Φ_k) − 1`, kept separately so flat distributions give exact zeros.
    modulation: Vec<f64>,
    samples: Vec<f64>,
}

/// Result of a classical Fisher information evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherValue {
    pub value: f64,
    /// True when `P` fell below the floor at some grid point.
    pub regularized: bool,
}

fn twiddles(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|j| {
            let (s, c) = (TAU * j as f64 / m as f64).sin_cos();
            Complex64::new(c, -s)
        })
        .collect()
}

impl PhaseDistribution {
    /// Builds the distribution from circular moments `c_0 = 1, c_1, …`.
    pub fn from_fourier(fourier: Vec<Complex64>, grid_size: usize) -> Result<Self> {
        let dim = fourier.len();
        if dim < 1 {
            return Err(CoreError::Dimension("no Fourier coefficients".into()));
        }
        let min = 4 * dim;
        if grid_size < min {
            return Err(CoreError::Resolution {
                grid: grid_size,
                dim,
                min,
            });
        }
        let tw = twiddles(grid_size);
        let modulation: Vec<f64> = (0..grid_size)
            .map(|k| {
                2.0 * (1..dim)
                    .map(|n| (fourier[n] * tw[(n * k) % grid_size]).re)
                    .sum::<f64>()
            })
            .collect();
        let samples = modulation.iter().map(|g| (1.0 + g) / TAU).collect();
        Ok(Self {
            fourier,
            grid_size,
            modulation,
            samples,
        })
    }

    pub fn fourier(&self) -> &[Complex64] {
        &self.fourier
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn phi(&self, k: usize) -> f64 {
        TAU * k as f64 / self.grid_size as f64
    }

    /// `P(Φ)` at an arbitrary phase.
    pub fn eval(&self, phi: f64) -> f64 {
        (1.0 + self.modulation_at(phi)) / TAU
    }

    /// `2πP(Φ) − 1`.
    pub fn modulation_at(&self, phi: f64) -> f64 {
        2.0 * self
            .fourier
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| (c * Complex64::from_polar(1.0, -(n as f64) * phi)).re)
            .sum::<f64>()
    }

    /// `P′(Φ) = (1/2π) Σ_{n≥1} 2 Re(−i n c_n e^{−inΦ})`.
    pub fn derivative(&self, phi: f64) -> f64 {
        self.fourier
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| {
                let z = c
                    * Complex64::new(0.0, -(n as f64))
                    * Complex64::from_polar(1.0, -(n as f64) * phi);
                2.0 * z.re
            })
            .sum::<f64>()
            / TAU
    }

    fn derivative_samples(&self) -> Vec<f64> {
        let m = self.grid_size;
        let tw = twiddles(m);
        (0..m)
            .map(|k| {
                self.fourier
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(n, c)| {
                        let z = c * Complex64::new(0.0, -(n as f64)) * tw[(n * k) % m];
                        2.0 * z.re
                    })
                    .sum::<f64>()
                    / TAU
            })
            .collect()
    }

    /// `∫ P(Φ) e^{inΦ} dΦ` by periodic trapezoidal quadrature of the samples.
    ///
    /// Exact (up to rounding) for `n + dim ≤ grid_size`; provides a second
    /// route to `c_n` that does not read the stored coefficients.
    pub fn circular_moment(&self, n: usize) -> Complex64 {
        let m = self.grid_size;
        let tw = twiddles(m);
        let sum: Complex64 = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, p)| tw[(n * k) % m].conj() * p)
            .sum();
        sum * (TAU / m as f64)
    }

    /// Indices of strict local maxima on the periodic grid.
    pub fn local_maxima(&self) -> Vec<usize> {
        let m = self.grid_size;
        let p = &self.modulation;
        (0..m)
            .filter(|&k| {
                let prev = p[(k + m - 1) % m];
                let next = p[(k + 1) % m];
                p[k] > prev && p[k] >= next
            })
            .collect()
    }

    /// Writes `phi,value` rows at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "phi,value")?;
        for (k, p) in self.samples.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", self.phi(k), p)?;
        }
        Ok(())
    }
}

pub fn phase_distribution(rho: &DensityMatrix, grid_size: usize) -> Result<PhaseDistribution> {
    let fourier = (0..rho.dim()).map(|n| rho.diagonal_sum(n)).collect();
    PhaseDistribution::from_fourier(fourier, grid_size)
}

/// `2π max P(Φ) − 1`, from a grid scan refined by a parabola through the
/// three samples bracketing the grid maximum.
pub fn s_peak(pdist: &PhaseDistribution) -> f64 {
    let g = &pdist.modulation;
    let m = g.len();
    let (k, &best) = g
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    let a = g[(k + m - 1) % m];
    let c = g[(k + 1) % m];
    let curvature = a - 2.0 * best + c;
    if curvature >= 0.0 {
        return best;
    }
    let offset = 0.5 * (a - c) / curvature;
    let phi = pdist.phi(k) + offset * TAU / m as f64;
    best.max(pdist.modulation_at(phi))
}

/// `|⟨e^{inΦ}⟩| = |c_n|`.
pub fn mrl(pdist: &PhaseDistribution, n: usize) -> Result<f64> {
    let dim = pdist.fourier.len();
    if n == 0 || n >= dim {
        return Err(CoreError::OrderOutOfRange { order: n, dim });
    }
    Ok(pdist.fourier[n].norm())
}

/// `∫ P′(Φ)² / max(P(Φ), floor) dΦ` by periodic trapezoidal quadrature.
pub fn cfi(pdist: &PhaseDistribution, floor: f64) -> FisherValue {
    let dp = pdist.derivative_samples();
    let mut regularized = false;
    let sum: f64 = pdist
        .samples
        .iter()
        .zip(&dp)
        .map(|(&p, &d)| {
            let denom = if p < floor {
                regularized = true;
                floor
            } else {
                p
            };
            d * d / denom
        })
        .sum();
    FisherValue {
        value: sum * TAU / pdist.grid_size as f64,
        regularized,
    }
}

/// Cardioid family `(1/2π)(1 + a cos Φ)`, handy for checks.
pub fn cardioid(a: f64, grid_size: usize) -> Result<PhaseDistribution> {
    PhaseDistribution::from_fourier(
        vec![Complex64::new(1.0, 0.0), Complex64::new(a / 2.0, 0.0)],
        grid_size,
    )
}
