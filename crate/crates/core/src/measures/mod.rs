//! Synchronization measures of a steady state.
//!
//! | measure  | definition                                   | range     |
//! |----------|----------------------------------------------|-----------|
//! | `s_pcoh` | `Tr[aρ] / √Tr[a†aρ]`                          | `[0, 1]`  |
//! | `s_peak` | `2π max P(Φ) − 1`                             | `[0, ∞)`  |
//! | `mrl_n`  | `|⟨e^{inΦ}⟩|`                                 | `[0, 1]`  |
//! | `qfi`    | quantum Fisher information for `a†a`         | `[0, ∞)`  |
//! | `cfi`    | Fisher information of `P(Φ)` under phase shift | `[0, ∞)`  |

mod phase;
mod qfi;
mod wigner;

pub use phase::{
    cardioid, cfi, mrl, phase_distribution, s_peak, FisherValue, PhaseDistribution,
    DEFAULT_CFI_FLOOR, DEFAULT_GRID_SIZE,
};
pub use qfi::{qfi, qfi_from_eigen, EigenDecomposition, DEFAULT_QFI_CUTOFF};
pub use wigner::{linspace, wigner, wigner_at, WignerGrid};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::density::DensityMatrix;
use crate::error::{CoreError, Result};

/// Mean photon numbers at or below this count as vacuum for `s_pcoh`.
pub const VACUUM_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCoherence {
    pub value: Complex64,
    /// Set when `Tr[a†aρ]` vanishes; `value` is then 0.
    pub undefined: bool,
}

/// `Tr[aρ] / √Tr[a†aρ]`.
pub fn phase_coherence(rho: &DensityMatrix) -> PhaseCoherence {
    let nbar = rho.mean_photon_number();
    if nbar <= VACUUM_THRESHOLD {
        return PhaseCoherence {
            value: Complex64::new(0.0, 0.0),
            undefined: true,
        };
    }
    let tr_a: Complex64 = (0..rho.dim() - 1)
        .map(|m| rho.get(m + 1, m) * ((m + 1) as f64).sqrt())
        .sum();
    PhaseCoherence {
        value: tr_a / nbar.sqrt(),
        undefined: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureConfig {
    pub grid_size: usize,
    pub cfi_floor: f64,
    pub qfi_cutoff: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID_SIZE,
            cfi_floor: DEFAULT_CFI_FLOOR,
            qfi_cutoff: DEFAULT_QFI_CUTOFF,
        }
    }
}

/// The six synchronization measures of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureSet {
    #[serde(serialize_with = "complex_pair")]
    pub s_pcoh_complex: Complex64,
    pub s_pcoh: f64,
    pub s_peak: f64,
    pub mrl1: f64,
    pub mrl2: f64,
    pub qfi: f64,
    pub cfi: f64,
    pub pcoh_undefined: bool,
    pub cfi_regularized: bool,
}

fn complex_pair<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Names of the scalar measures, in table-column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    SPcoh,
    SPeak,
    Mrl1,
    Mrl2,
    Qfi,
    Cfi,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::SPcoh,
        Measure::SPeak,
        Measure::Mrl1,
        Measure::Mrl2,
        Measure::Qfi,
        Measure::Cfi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::SPcoh => "s_pcoh",
            Measure::SPeak => "s_peak",
            Measure::Mrl1 => "mrl1",
            Measure::Mrl2 => "mrl2",
            Measure::Qfi => "qfi",
            Measure::Cfi => "cfi",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CoreError::UnknownColumn(s.to_string()))
    }
}

impl MeasureSet {
    pub fn get(&self, m: Measure) -> f64 {
        match m {
            Measure::SPcoh => self.s_pcoh,
            Measure::SPeak => self.s_peak,
            Measure::Mrl1 => self.mrl1,
            Measure::Mrl2 => self.mrl2,
            Measure::Qfi => self.qfi,
            Measure::Cfi => self.cfi,
        }
    }
}

/// Computes every measure, sharing one phase distribution and one
/// eigendecomposition.
pub fn measure_all(rho: &DensityMatrix, config: &MeasureConfig) -> Result<MeasureSet> {
    let pdist = phase_distribution(rho, config.grid_size)?;
    let eig = EigenDecomposition::new(rho);
    let pcoh = phase_coherence(rho);
    let fisher = cfi(&pdist, config.cfi_floor);
    Ok(MeasureSet {
        s_pcoh_complex: pcoh.value,
        s_pcoh: pcoh.value.norm(),
        s_peak: s_peak(&pdist),
        mrl1: mrl(&pdist, 1)?,
        mrl2: mrl(&pdist, 2)?,
        qfi: qfi_from_eigen(&eig, config.qfi_cutoff),
        cfi: fisher.value,
        pcoh_undefined: pcoh.undefined,
        cfi_regularized: fisher.regularized,
    })
}
