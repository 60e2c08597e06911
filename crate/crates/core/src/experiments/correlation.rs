use std::io::Write;

use crate::error::{CoreError, Result};
use crate::experiments::SweepTable;

/// Standard deviations at or below this fraction of the mean magnitude (or
/// absolute, for near-zero means) count as zero variance.
const ZERO_VARIANCE_RTOL: f64 = 1e-14;

/// Pearson correlation with the population convention.
///
/// A constant input gives [`CoreError::UndefinedCorrelation`] rather than 0.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(CoreError::Dimension(format!(
            "pearson inputs differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(CoreError::Dimension(
            "pearson needs at least two samples".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let (sx, sy) = ((sxx / n).sqrt(), (syy / n).sqrt());
    for (name, s, m) in [("x", sx, mx), ("y", sy, my)] {
        if s.is_nan() || s <= ZERO_VARIANCE_RTOL * m.abs().max(1.0) {
            return Err(CoreError::UndefinedCorrelation(format!(
                "{name} has zero variance"
            )));
        }
    }
    Ok((sxy / n / (sx * sy)).clamp(-1.0, 1.0))
}

/// Symmetric correlation matrix; `None` marks undefined entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub entries: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Result<Option<f64>> {
        let idx = |s: &str| {
            self.names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| CoreError::UnknownColumn(s.to_string()))
        };
        Ok(self.entries[idx(a)?][idx(b)?])
    }

    /// Square CSV with a leading `column` header; undefined cells are written
    /// as `undefined`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "column,{}", self.names.join(","))?;
        for (name, row) in self.names.iter().zip(&self.entries) {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Some(v) => format!("{v:.16e}"),
                    None => "undefined".to_string(),
                })
                .collect();
            writeln!(w, "{name},{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Pairwise Pearson correlations of the named columns over converged rows.
pub fn correlation_matrix(table: &SweepTable, columns: &[&str]) -> Result<CorrelationMatrix> {
    let keep: Vec<bool> = table.rows.iter().map(|r| r.converged).collect();
    let data = columns
        .iter()
        .map(|c| {
            Ok(table
                .column(c)?
                .into_iter()
                .zip(&keep)
                .filter_map(|(v, &k)| k.then_some(v))
                .collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    if data.first().map_or(0, Vec::len) < 2 {
        return Err(CoreError::Dimension(
            "correlation needs at least two converged rows".into(),
        ));
    }
    let k = columns.len();
    let mut entries = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let r = match pearson(&data[i], &data[j]) {
                Ok(r) => Some(if i == j { 1.0 } else { r }),
                Err(CoreError::UndefinedCorrelation(_)) => None,
                Err(e) => return Err(e),
            };
            entries[i][j] = r;
            entries[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        names: columns.iter().map(|c| c.to_string()).collect(),
        entries,
    })
}
