//! Config files and flag merging. Flags always win over file values.

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;
use std::path::Path;

use qsync_core::experiments::{Axis, SweepSpec};
use qsync_core::measures::Measure;
use qsync_core::{default_fock_dim, CoreError, MeasureConfig, OscillatorParams, SolverConfig};

/// Retries granted when the truncation is picked automatically.
const AUTO_RETRIES: u32 = 3;

/// Oscillator parameters, every one optional so file values can show through.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamArgs {
    /// Detuning Δ
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Coherent drive amplitude E
    #[arg(long = "drive")]
    #[serde(rename = "drive_e")]
    pub drive: Option<f64>,
    /// Squeezing amplitude η
    #[arg(long)]
    pub eta: Option<f64>,
    /// Squeezing phase φ in [0, 2π)
    #[arg(long)]
    pub phi: Option<f64>,
    /// Single-photon gain rate γ1
    #[arg(long, allow_negative_numbers = true)]
    pub gamma1: Option<f64>,
    /// Two-photon loss rate γ2
    #[arg(long, allow_negative_numbers = true)]
    pub gamma2: Option<f64>,
    /// Single-photon loss rate γ3
    #[arg(long, allow_negative_numbers = true)]
    pub gamma3: Option<f64>,
    /// White-noise mixing fraction p in [0, 1]
    #[arg(long = "white-noise")]
    #[serde(rename = "white_noise_p")]
    pub white_noise: Option<f64>,
    /// Fock-space truncation (default: chosen from γ2/γ1, grown on demand)
    #[arg(long = "fock-dim")]
    pub fock_dim: Option<usize>,
}

impl ParamArgs {
    /// `self` with unset fields filled from `other`.
    pub fn or(&self, other: &ParamArgs) -> ParamArgs {
        ParamArgs {
            delta: self.delta.or(other.delta),
            drive: self.drive.or(other.drive),
            eta: self.eta.or(other.eta),
            phi: self.phi.or(other.phi),
            gamma1: self.gamma1.or(other.gamma1),
            gamma2: self.gamma2.or(other.gamma2),
            gamma3: self.gamma3.or(other.gamma3),
            white_noise: self.white_noise.or(other.white_noise),
            fock_dim: self.fock_dim.or(other.fock_dim),
        }
    }

    /// Concrete parameters; the bool reports whether `fock_dim` was given.
    pub fn resolve(&self) -> (OscillatorParams, bool) {
        let d = OscillatorParams::default();
        let mut p = OscillatorParams {
            delta: self.delta.unwrap_or(d.delta),
            drive_e: self.drive.unwrap_or(d.drive_e),
            eta: self.eta.unwrap_or(d.eta),
            phi: self.phi.unwrap_or(d.phi),
            gamma1: self.gamma1.unwrap_or(d.gamma1),
            gamma2: self.gamma2.unwrap_or(d.gamma2),
            gamma3: self.gamma3.unwrap_or(d.gamma3),
            white_noise_p: self.white_noise.unwrap_or(d.white_noise_p),
            fock_dim: d.fock_dim,
        };
        match self.fock_dim {
            Some(n) => {
                p.fock_dim = n;
                (p, true)
            }
            None => {
                p.fock_dim = default_fock_dim(p.gamma1, p.gamma2);
                (p, false)
            }
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverArgs {
    /// Largest accepted ‖L·vec(ρ)‖∞
    #[arg(long = "residual-tol")]
    pub residual_tol: Option<f64>,
    /// Largest accepted population of the two top Fock levels
    #[arg(long = "truncation-tol")]
    pub truncation_tol: Option<f64>,
    /// Truncation retries, each adding 10 levels
    #[arg(long = "auto-retries")]
    pub auto_retries: Option<u32>,
}

impl SolverArgs {
    pub fn or(&self, other: &SolverArgs) -> SolverArgs {
        SolverArgs {
            residual_tol: self.residual_tol.or(other.residual_tol),
            truncation_tol: self.truncation_tol.or(other.truncation_tol),
            auto_retries: self.auto_retries.or(other.auto_retries),
        }
    }

    pub fn resolve(&self, explicit_dim: bool) -> Result<SolverConfig> {
        let d = SolverConfig::default();
        let cfg = SolverConfig {
            residual_tol: self.residual_tol.unwrap_or(d.residual_tol),
            truncation_tol: self.truncation_tol.unwrap_or(d.truncation_tol),
            auto_retries: self
                .auto_retries
                .unwrap_or(if explicit_dim { 0 } else { AUTO_RETRIES }),
            ..d
        };
        for (flag, v) in [
            ("--residual-tol", cfg.residual_tol),
            ("--truncation-tol", cfg.truncation_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                bail!("invalid value for {flag}: must be a positive number, got {v}");
            }
        }
        Ok(cfg)
    }
}

/// Config file shared by the single-state commands.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default)]
    pub params: ParamArgs,
    #[serde(default)]
    pub solver: SolverArgs,
    #[serde(default)]
    pub measures: Option<MeasureConfig>,
}

/// Sweep config file: the spec with an optional truncation.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    #[serde(default)]
    pub base: ParamArgs,
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub measures: Option<Vec<Measure>>,
    #[serde(default)]
    pub solver: SolverArgs,
    #[serde(default)]
    pub measure_config: Option<MeasureConfig>,
}

pub fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
}

impl SweepFile {
    /// Builds the spec, with `flags` overriding the file's base parameters.
    pub fn into_spec(self, flags: &ParamArgs, solver: &SolverArgs) -> Result<SweepSpec> {
        let merged = flags.or(&self.base);
        let (mut base, explicit) = merged.resolve();
        if !explicit {
            // Size for the smallest γ2 on any axis, the widest limit cycle.
            let mut g2 = base.gamma2;
            for a in &self.axes {
                if a.param == qsync_core::experiments::Param::Gamma2 {
                    g2 = g2.min(a.min);
                }
            }
            base.fock_dim = default_fock_dim(base.gamma1, g2);
        }
        let solver = solver.or(&self.solver).resolve(explicit)?;
        Ok(SweepSpec {
            base,
            axes: self.axes,
            measures: self.measures.unwrap_or_else(|| Measure::ALL.to_vec()),
            solver,
            measure_config: self.measure_config.unwrap_or_default(),
        })
    }
}

/// Flag spelling for a parameter field, for error messages.
pub fn flag_for_field(field: &str) -> &str {
    match field {
        "delta" => "--delta",
        "drive_e" => "--drive",
        "eta" => "--eta",
        "phi" => "--phi",
        "gamma1" => "--gamma1",
        "gamma2" => "--gamma2",
        "gamma3" => "--gamma3",
        "white_noise_p" => "--white-noise",
        "fock_dim" => "--fock-dim",
        other => other,
    }
}

/// Validates parameters, naming the offending flag on failure.
pub fn validate(params: &OscillatorParams) -> Result<()> {
    match params.validate() {
        Ok(()) => Ok(()),
        Err(CoreError::InvalidParameter { field, reason }) => {
            bail!("invalid value for {}: {reason}", flag_for_field(field))
        }
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let file = ParamArgs {
            drive: Some(0.5),
            gamma2: Some(10.0),
            ..Default::default()
        };
        let flags = ParamArgs {
            gamma2: Some(1.0),
            ..Default::default()
        };
        let (p, explicit) = flags.or(&file).resolve();
        assert_eq!(p.drive_e, 0.5);
        assert_eq!(p.gamma2, 1.0);
        assert!(!explicit);
        assert_eq!(p.fock_dim, 40);
    }

    #[test]
    fn sweep_file_parses() {
        let text = r#"
            measures = ["qfi", "cfi"]
            [base]
            gamma2 = 10.0
            [[axes]]
            param = "drive_e"
            min = 0.0
            max = 2.0
            points = 41
        "#;
        let f: SweepFile = toml::from_str(text).unwrap();
        let spec = f
            .into_spec(&ParamArgs::default(), &SolverArgs::default())
            .unwrap();
        assert_eq!(spec.base.fock_dim, 20);
        assert_eq!(spec.solver.auto_retries, AUTO_RETRIES);
        assert_eq!(spec.measures, vec![Measure::Qfi, Measure::Cfi]);
        assert!(toml::from_str::<SweepFile>("bogus = 1\naxes = []").is_err());
    }

    #[test]
    fn validation_names_the_flag() {
        let (p, _) = ParamArgs {
            gamma1: Some(0.0),
            ..Default::default()
        }
        .resolve();
        let msg = validate(&p).unwrap_err().to_string();
        assert!(
            msg.contains("--gamma1") && msg.contains("positive"),
            "{msg}"
        );
    }
}
