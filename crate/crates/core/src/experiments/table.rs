//! CSV persistence of sweep tables plus a JSON metadata sidecar.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{CoreError, Result};
use crate::experiments::{Param, SweepRow, SweepSpec, SweepTable};
use crate::measures::Measure;

pub const LIBRARY_NAME: &str = env!("CARGO_PKG_NAME");
pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub library: String,
    pub version: String,
    pub spec_hash: String,
    pub spec: SweepSpec,
}

/// SHA-256 of the spec's canonical JSON encoding.
pub fn spec_hash(spec: &SweepSpec) -> Result<String> {
    let json = serde_json::to_vec(spec)?;
    Ok(hex::encode(Sha256::digest(&json)))
}

pub fn metadata_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn write_csv<W: Write>(table: &SweepTable, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| CoreError::Io(e.into());
    out.write_record(table.column_names()).map_err(csv_err)?;
    for row in &table.rows {
        let mut cells: Vec<String> = row
            .coords
            .iter()
            .chain(&row.values)
            .map(|v| format!("{v:.16e}"))
            .collect();
        cells.push(row.converged.to_string());
        cells.push(format!("{:.16e}", row.residual));
        out.write_record(&cells).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn parse_header(header: &csv::StringRecord) -> Result<(Vec<Param>, Vec<Measure>)> {
    let parse_err = |message: String| CoreError::Parse { line: 1, message };
    let names: Vec<&str> = header.iter().collect();
    let n = names.len();
    if n < 3 || names[n - 2] != "converged" || names[n - 1] != "residual" {
        return Err(parse_err(
            "header must end with `converged,residual`".into(),
        ));
    }
    let mut axes = Vec::new();
    let mut measures = Vec::new();
    for name in &names[..n - 2] {
        if let Ok(m) = name.parse::<Measure>() {
            measures.push(m);
        } else if let Ok(p) = name.parse::<Param>() {
            if !measures.is_empty() {
                return Err(parse_err(format!("axis `{name}` after measure columns")));
            }
            axes.push(p);
        } else {
            return Err(CoreError::UnknownColumn(name.to_string()));
        }
    }
    Ok((axes, measures))
}

pub fn read_csv<R: Read>(r: R) -> Result<SweepTable> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(r);
    let header = reader.headers().map_err(|e| CoreError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let (axes, measures) = parse_header(header)?;
    let width = axes.len() + measures.len() + 2;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CoreError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let err = |message: String| CoreError::Parse { line, message };
        if record.len() != width {
            return Err(err(format!(
                "expected {width} fields, found {}",
                record.len()
            )));
        }
        let num = |k: usize| {
            record[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| err(format!("field {} (`{}`): {e}", k + 1, &record[k])))
        };
        let coords = (0..axes.len()).map(num).collect::<Result<Vec<_>>>()?;
        let values = (axes.len()..width - 2)
            .map(num)
            .collect::<Result<Vec<_>>>()?;
        let converged = match record[width - 2].trim() {
            "true" => true,
            "false" => false,
            other => return Err(err(format!("converged flag `{other}` is not true/false"))),
        };
        let residual = num(width - 1)?;
        rows.push(SweepRow {
            coords,
            values,
            converged,
            residual,
        });
    }
    Ok(SweepTable {
        axes,
        measures,
        rows,
    })
}

/// Writes the table to `path` and, when `spec` is given, the metadata
/// sidecar next to it.
pub fn write_table(
    table: &SweepTable,
    path: impl AsRef<Path>,
    spec: Option<&SweepSpec>,
) -> Result<()> {
    let path = path.as_ref();
    write_csv(table, BufWriter::new(File::create(path)?))?;
    if let Some(spec) = spec {
        let meta = TableMetadata {
            library: LIBRARY_NAME.to_string(),
            version: LIBRARY_VERSION.to_string(),
            spec_hash: spec_hash(spec)?,
            spec: spec.clone(),
        };
        let mut f = BufWriter::new(File::create(metadata_path(path))?);
        serde_json::to_writer_pretty(&mut f, &meta)?;
        f.write_all(b"\n")?;
        f.flush()?;
    }
    Ok(())
}

pub fn read_table(path: impl AsRef<Path>) -> Result<SweepTable> {
    read_csv(File::open(path)?)
}

pub fn read_metadata(table_path: impl AsRef<Path>) -> Result<TableMetadata> {
    let f = File::open(metadata_path(table_path.as_ref()))?;
    Ok(serde_json::from_reader(f)?)
}

/// True when the sidecar's stored hash matches both its own spec and
/// `expected`.
pub fn verify_metadata(table_path: impl AsRef<Path>, expected: &SweepSpec) -> Result<bool> {
    let meta = read_metadata(table_path)?;
    let want = spec_hash(expected)?;
    Ok(meta.spec_hash == spec_hash(&meta.spec)? && meta.spec_hash == want)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Axis;
    use crate::hilbert::OscillatorParams;
    use proptest::prelude::*;

    fn table(rows: Vec<SweepRow>) -> SweepTable {
        SweepTable {
            axes: vec![Param::DriveE, Param::Gamma3],
            measures: vec![Measure::SPcoh, Measure::Cfi],
            rows,
        }
    }

    fn row(v: [f64; 5], converged: bool) -> SweepRow {
        SweepRow {
            coords: v[..2].to_vec(),
            values: v[2..4].to_vec(),
            converged,
            residual: v[4],
        }
    }

    fn round_trip(t: &SweepTable) -> SweepTable {
        let mut buf = Vec::new();
        write_csv(t, &mut buf).unwrap();
        read_csv(buf.as_slice()).unwrap()
    }

    #[test]
    fn header_and_round_trip() {
        let t = table(vec![
            row([0.1, 0.2, 1.0 / 3.0, 2e-300, 1e-17], true),
            row([0.3, 0.0, f64::NAN, f64::NAN, f64::NAN], false),
        ]);
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("drive_e,gamma3,s_pcoh,cfi,converged,residual\n"));
        let back = round_trip(&t);
        assert_eq!(back.rows[0], t.rows[0]);
        assert!(back.rows[1].values[0].is_nan() && !back.rows[1].converged);
    }

    #[test]
    fn truncated_file_reports_line() {
        let text = "drive_e,qfi,converged,residual\n0.1,0.2,true,0\n0.2,0.3\n";
        match read_csv(text.as_bytes()) {
            Err(CoreError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let bad = "drive_e,qfi,converged,residual\n0.1,zz,true,0\n";
        assert!(matches!(
            read_csv(bad.as_bytes()),
            Err(CoreError::Parse { line: 2, .. })
        ));
        let unknown = "drive_e,foo,converged,residual\n";
        assert!(matches!(
            read_csv(unknown.as_bytes()),
            Err(CoreError::UnknownColumn(_))
        ));
    }

    #[test]
    fn sidecar_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let spec = SweepSpec::new(
            OscillatorParams::default(),
            vec![Axis::linear(Param::DriveE, 0.0, 2.0, 41)],
        );
        let t = table(vec![row([0.1, 0.2, 0.3, 0.4, 0.5], true)]);
        write_table(&t, &path, Some(&spec)).unwrap();
        assert_eq!(read_table(&path).unwrap(), t);
        let meta = read_metadata(&path).unwrap();
        assert_eq!(meta.spec, spec);
        assert_eq!(meta.version, LIBRARY_VERSION);
        assert!(verify_metadata(&path, &spec).unwrap());
        let mut other = spec.clone();
        other.base.gamma2 = 10.0;
        assert!(!verify_metadata(&path, &other).unwrap());
    }

    proptest! {
        #[test]
        fn lossless_at_full_precision(
            vals in prop::collection::vec(prop::array::uniform5(-1e6..1e6f64), 1..10),
            flags in prop::collection::vec(any::<bool>(), 10),
        ) {
            let rows = vals.iter().zip(&flags).map(|(v, &c)| row(*v, c)).collect();
            let t = table(rows);
            prop_assert_eq!(round_trip(&t), t);
        }
    }
}
