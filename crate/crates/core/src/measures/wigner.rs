//! Wigner function by displaced parity, `W(α) = (2/π) Tr[Π D(−α) ρ D(α)]`,
//! with phase-space coordinates `α = x + i p`.
//!
//! The parity sum over the displaced state is done analytically for every
//! Fock pair: for `m = n + k`,
//!
//! ```text
//! W_{|m⟩⟨n|}(α) = (2/π) (−1)^n √(n!/m!) (2α*)^k e^{−2|α|²} L_n^{(k)}(4|α|²)
//! ```
//!
//! so no outer truncation of the displaced state is involved.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

use crate::density::DensityMatrix;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    /// `values[i * ps.len() + j] = W(xs[i], ps[j])`.
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ps.len() + j]
    }

    /// Riemann sum over the grid, assuming uniform spacing on both axes.
    pub fn integral(&self) -> f64 {
        let step = |v: &[f64]| {
            if v.len() > 1 {
                (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64
            } else {
                1.0
            }
        };
        self.values.iter().sum::<f64>() * step(&self.xs) * step(&self.ps)
    }

    /// Writes `x,p,value` rows at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,p,value")?;
        for (i, x) in self.xs.iter().enumerate() {
            for (j, p) in self.ps.iter().enumerate() {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", x, p, self.get(i, j))?;
            }
        }
        Ok(())
    }
}

/// Per-state tables shared by every grid point.
struct Kernel {
    dim: usize,
    /// `weighted[k][n] = (−1)^n √(n!/(n+k)!) ρ_{n+k,n}`.
    weighted: Vec<Vec<Complex64>>,
}

impl Kernel {
    fn new(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let weighted = (0..dim)
            .map(|k| {
                (0..dim - k)
                    .map(|n| {
                        let ratio: f64 = (n + 1..=n + k).map(|j| 1.0 / (j as f64).sqrt()).product();
                        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                        rho.get(n + k, n) * (sign * ratio)
                    })
                    .collect()
            })
            .collect();
        Self { dim, weighted }
    }

    fn eval(&self, alpha: Complex64) -> f64 {
        let r2 = alpha.norm_sqr();
        let x = 4.0 * r2;
        let z = alpha.conj() * 2.0;
        let mut zk = Complex64::new(1.0, 0.0);
        let mut total = 0.0;
        for k in 0..self.dim {
            let kf = k as f64;
            let row = &self.weighted[k];
            let mut l_prev = 0.0;
            let mut l_cur = 1.0;
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, w) in row.iter().enumerate() {
                if n > 0 {
                    let j = (n - 1) as f64;
                    let next = ((2.0 * j + 1.0 + kf - x) * l_cur - (j + kf) * l_prev) / (j + 1.0);
                    l_prev = l_cur;
                    l_cur = next;
                }
                acc += w * l_cur;
            }
            let term = (zk * acc).re;
            total += if k == 0 { term } else { 2.0 * term };
            zk *= z;
        }
        2.0 / PI * (-2.0 * r2).exp() * total
    }
}

/// `W(α)` at a single phase-space point.
pub fn wigner_at(rho: &DensityMatrix, alpha: Complex64) -> f64 {
    Kernel::new(rho).eval(alpha)
}

/// Evaluates `W(x + ip)` on the Cartesian grid `xs × ps`.
pub fn wigner(rho: &DensityMatrix, xs: &[f64], ps: &[f64]) -> Result<WignerGrid> {
    if xs.is_empty() || ps.is_empty() {
        return Err(CoreError::Dimension(
            "Wigner grid axes must be nonempty".into(),
        ));
    }
    let kernel = Kernel::new(rho);
    let values = xs
        .par_iter()
        .flat_map_iter(|&x| {
            let kernel = &kernel;
            ps.iter().map(move |&p| kernel.eval(Complex64::new(x, p)))
        })
        .collect();
    Ok(WignerGrid {
        xs: xs.to_vec(),
        ps: ps.to_vec(),
        values,
    })
}

/// `n` evenly spaced points covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
