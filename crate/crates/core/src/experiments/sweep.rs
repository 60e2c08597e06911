use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{CoreError, Result};
use crate::hilbert::OscillatorParams;
use crate::measures::{measure_all, Measure, MeasureConfig};
use crate::steady::{solve_with, SolverConfig};

/// A sweepable field of [`OscillatorParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Delta,
    DriveE,
    Eta,
    Phi,
    Gamma1,
    Gamma2,
    Gamma3,
    WhiteNoiseP,
}

impl Param {
    pub const ALL: [Param; 8] = [
        Param::Delta,
        Param::DriveE,
        Param::Eta,
        Param::Phi,
        Param::Gamma1,
        Param::Gamma2,
        Param::Gamma3,
        Param::WhiteNoiseP,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Delta => "delta",
            Param::DriveE => "drive_e",
            Param::Eta => "eta",
            Param::Phi => "phi",
            Param::Gamma1 => "gamma1",
            Param::Gamma2 => "gamma2",
            Param::Gamma3 => "gamma3",
            Param::WhiteNoiseP => "white_noise_p",
        }
    }

    pub fn get(self, p: &OscillatorParams) -> f64 {
        match self {
            Param::Delta => p.delta,
            Param::DriveE => p.drive_e,
            Param::Eta => p.eta,
            Param::Phi => p.phi,
            Param::Gamma1 => p.gamma1,
            Param::Gamma2 => p.gamma2,
            Param::Gamma3 => p.gamma3,
            Param::WhiteNoiseP => p.white_noise_p,
        }
    }

    pub fn set(self, p: &mut OscillatorParams, v: f64) {
        let slot = match self {
            Param::Delta => &mut p.delta,
            Param::DriveE => &mut p.drive_e,
            Param::Eta => &mut p.eta,
            Param::Phi => &mut p.phi,
            Param::Gamma1 => &mut p.gamma1,
            Param::Gamma2 => &mut p.gamma2,
            Param::Gamma3 => &mut p.gamma3,
            Param::WhiteNoiseP => &mut p.white_noise_p,
        };
        *slot = v;
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CoreError::UnknownColumn(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(param: Param, min: f64, max: f64, points: usize) -> Self {
        Self {
            param,
            min,
            max,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.min];
        }
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }

    fn validate(&self, base: &OscillatorParams) -> Result<()> {
        let bad = |reason: String| CoreError::Sweep(format!("axis `{}`: {reason}", self.param));
        if self.points == 0 {
            return Err(bad("needs at least one point".into()));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(bad(format!("invalid range [{}, {}]", self.min, self.max)));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(bad("log spacing needs a positive minimum".into()));
        }
        for v in [self.min, self.max] {
            let mut p = *base;
            self.param.set(&mut p, v);
            p.validate()?;
        }
        Ok(())
    }
}

fn all_measures() -> Vec<Measure> {
    Measure::ALL.to_vec()
}

/// A rectangular grid of parameter points and the measures to record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: OscillatorParams,
    pub axes: Vec<Axis>,
    #[serde(default = "all_measures")]
    pub measures: Vec<Measure>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub measure_config: MeasureConfig,
}

impl SweepSpec {
    pub fn new(base: OscillatorParams, axes: Vec<Axis>) -> Self {
        Self {
            base,
            axes,
            measures: all_measures(),
            solver: SolverConfig::default(),
            measure_config: MeasureConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(CoreError::Sweep(format!(
                "expected 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(CoreError::Sweep(format!(
                "axis `{}` appears twice",
                self.axes[0].param
            )));
        }
        if self.measures.is_empty() {
            return Err(CoreError::Sweep("no measures requested".into()));
        }
        self.base.validate()?;
        for axis in &self.axes {
            axis.validate(&self.base)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in row-major order (last axis fastest).
    pub fn points(&self) -> Vec<(Vec<f64>, OscillatorParams)> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        (0..self.len())
            .map(|mut idx| {
                let mut coords = vec![0.0; self.axes.len()];
                for k in (0..self.axes.len()).rev() {
                    let n = values[k].len();
                    coords[k] = values[k][idx % n];
                    idx /= n;
                }
                let mut p = self.base;
                for (axis, &v) in self.axes.iter().zip(&coords) {
                    axis.param.set(&mut p, v);
                }
                (coords, p)
            })
            .collect()
    }
}

/// One grid point. Points whose solve failed outright carry NaN values.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
    pub converged: bool,
    pub residual: f64,
}

/// Long-format sweep output: one row per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axes: Vec<Param>,
    pub measures: Vec<Measure>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column_names(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|p| p.name().to_string())
            .chain(self.measures.iter().map(|m| m.name().to_string()))
            .chain(["converged".to_string(), "residual".to_string()])
            .collect()
    }

    /// Values of an axis or measure column, over every row.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        if let Some(k) = self.axes.iter().position(|p| p.name() == name) {
            return Ok(self.rows.iter().map(|r| r.coords[k]).collect());
        }
        if let Some(k) = self.measures.iter().position(|m| m.name() == name) {
            return Ok(self.rows.iter().map(|r| r.values[k]).collect());
        }
        if name == "residual" {
            return Ok(self.rows.iter().map(|r| r.residual).collect());
        }
        Err(CoreError::UnknownColumn(name.to_string()))
    }

    pub fn measure(&self, m: Measure) -> Result<Vec<f64>> {
        self.column(m.name())
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

fn run_point(spec: &SweepSpec, coords: Vec<f64>, params: &OscillatorParams) -> SweepRow {
    let failed = |coords: Vec<f64>| SweepRow {
        coords,
        values: vec![f64::NAN; spec.measures.len()],
        converged: false,
        residual: f64::NAN,
    };
    let Ok(report) = solve_with(params, &spec.solver) else {
        return failed(coords);
    };
    let rho = if params.white_noise_p > 0.0 {
        match report.rho.with_white_noise(params.white_noise_p) {
            Ok(r) => r,
            Err(_) => return failed(coords),
        }
    } else {
        report.rho
    };
    let Ok(m) = measure_all(&rho, &spec.measure_config) else {
        return failed(coords);
    };
    SweepRow {
        coords,
        values: spec.measures.iter().map(|&k| m.get(k)).collect(),
        converged: report.converged,
        residual: report.residual,
    }
}

/// Solves every grid point on a pool of `workers` threads (0 means one per
/// core). Output order never depends on scheduling.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepTable> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CoreError::Sweep(format!("worker pool: {e}")))?;
    let points = spec.points();
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .into_par_iter()
            .map(|(coords, p)| run_point(spec, coords, &p))
            .collect()
    });
    if !rows.iter().any(|r| r.converged) {
        return Err(CoreError::Sweep(format!(
            "none of the {} grid points converged",
            rows.len()
        )));
    }
    Ok(SweepTable {
        axes: spec.axes.iter().map(|a| a.param).collect(),
        measures: spec.measures.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady::solve_steady_state;

    fn small_base() -> OscillatorParams {
        OscillatorParams {
            gamma2: 10.0,
            fock_dim: 12,
            ..Default::default()
        }
    }

    #[test]
    fn axis_values() {
        let a = Axis::linear(Param::DriveE, 0.0, 2.0, 5);
        assert_eq!(a.values(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let l = Axis {
            spacing: Spacing::Log,
            ..Axis::linear(Param::Gamma2, 1.0, 100.0, 3)
        };
        let v = l.values();
        assert!((v[1] - 10.0).abs() < 1e-12 && v[2] == 100.0);
        assert_eq!(Axis::linear(Param::Eta, 0.3, 0.3, 1).values(), vec![0.3]);
    }

    #[test]
    fn row_major_order() {
        let spec = SweepSpec::new(
            small_base(),
            vec![
                Axis::linear(Param::DriveE, 0.0, 1.0, 2),
                Axis::linear(Param::Gamma3, 0.0, 0.2, 3),
            ],
        );
        let coords: Vec<Vec<f64>> = spec.points().into_iter().map(|(c, _)| c).collect();
        assert_eq!(coords[1], vec![0.0, 0.1]);
        assert_eq!(coords[3], vec![1.0, 0.0]);
        assert_eq!(spec.points()[5].1.gamma3, 0.2);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let base = small_base();
        let dup = SweepSpec::new(
            base,
            vec![
                Axis::linear(Param::Eta, 0.0, 1.0, 2),
                Axis::linear(Param::Eta, 0.0, 1.0, 2),
            ],
        );
        assert!(dup.validate().is_err());
        let neg = SweepSpec::new(base, vec![Axis::linear(Param::Gamma1, -1.0, 1.0, 3)]);
        assert!(matches!(
            neg.validate(),
            Err(CoreError::InvalidParameter {
                field: "gamma1",
                ..
            })
        ));
        let none = SweepSpec::new(base, vec![]);
        assert!(none.validate().is_err());
        assert!("gamma4".parse::<Param>().is_err());
    }

    #[test]
    fn single_point_sweep_matches_direct_solve() {
        let mut base = small_base();
        base.drive_e = 0.4;
        let spec = SweepSpec::new(base, vec![Axis::linear(Param::Eta, 0.2, 0.2, 1)]);
        let t = run_sweep(&spec, 1).unwrap();
        assert_eq!(t.rows.len(), 1);
        let mut p = base;
        p.eta = 0.2;
        let r = solve_steady_state(&p, 1e-9, 1e-6).unwrap();
        let m = measure_all(&r.rho, &MeasureConfig::default()).unwrap();
        for (k, &measure) in t.measures.iter().enumerate() {
            assert_eq!(t.rows[0].values[k], m.get(measure));
        }
    }

    #[test]
    fn unconverged_sweep_is_an_error() {
        let base = OscillatorParams {
            gamma2: 0.0,
            fock_dim: 4,
            ..Default::default()
        };
        let spec = SweepSpec::new(base, vec![Axis::linear(Param::DriveE, 0.0, 0.1, 2)]);
        assert!(matches!(run_sweep(&spec, 1), Err(CoreError::Sweep(_))));
    }
}
