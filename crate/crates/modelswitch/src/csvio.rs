//! CSV read/write for the numeric time-series schema shared by the pipeline:
//! a header row, a leading index column, and one numeric column per series.
//! Values are written with Rust's shortest round-trip float formatting, so a
//! write/read cycle is exact and output bytes are deterministic.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{io_err, Error, Result};
use crate::linalg::Matrix;

/// A parsed CSV: index column kept as strings, named numeric columns.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub index: Vec<String>,
    pub names: Vec<String>,
    pub values: Matrix,
}

pub fn write_matrix(
    path: &Path,
    index: &[String],
    names: &[String],
    values: &Matrix,
) -> Result<()> {
    if values.n_rows() != index.len() || values.n_cols() != names.len() {
        return Err(Error::DimensionMismatch(format!(
            "csv write: {}x{} values vs {} index rows and {} names",
            values.n_rows(),
            values.n_cols(),
            index.len(),
            names.len()
        )));
    }
    let mut out = String::new();
    out.push_str("index");
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for (t, idx) in index.iter().enumerate() {
        out.push_str(idx);
        for v in values.row(t) {
            out.push(',');
            out.push_str(&format_float(*v));
        }
        out.push('\n');
    }
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Shortest round-trip representation; NaN never appears in valid pipelines.
pub fn format_float(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

pub fn parse_float(s: &str) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Data(format!("unparseable numeric cell {s:?}"))),
    }
}

/// Read the schema above. Cells that are empty or literal `NA`/`NaN` are
/// returned as NaN; downstream decides whether that is allowed.
pub fn read_matrix(path: &Path) -> Result<CsvTable> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Data(format!("{}: empty file", path.display())))?;
    let mut names: Vec<String> = header.split(',').map(str::to_string).collect();
    if names.len() < 2 {
        return Err(Error::Data(format!(
            "{}: need an index column and at least one series",
            path.display()
        )));
    }
    names.remove(0);
    let mut index = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let idx = fields.next().unwrap_or("").trim().to_string();
        let mut row = Vec::with_capacity(names.len());
        for field in fields {
            let trimmed = field.trim();
            if trimmed.is_empty()
                || trimmed.eq_ignore_ascii_case("na")
                || trimmed.eq_ignore_ascii_case("nan")
            {
                row.push(f64::NAN);
            } else {
                row.push(parse_float(trimmed).map_err(|_| {
                    Error::Data(format!(
                        "{}: row {}: unparseable cell {trimmed:?}",
                        path.display(),
                        lineno + 2
                    ))
                })?);
            }
        }
        if row.len() != names.len() {
            return Err(Error::Data(format!(
                "{}: row {}: expected {} cells, found {}",
                path.display(),
                lineno + 2,
                names.len(),
                row.len()
            )));
        }
        index.push(idx);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{}: no data rows", path.display())));
    }
    Ok(CsvTable {
        index,
        names,
        values: Matrix::from_rows(rows)?,
    })
}

/// 1-based integer index strings `1..=n`.
pub fn integer_index(n: usize) -> Vec<String> {
    (1..=n).map(|t| t.to_string()).collect()
}

/// Column names `prefix_1..prefix_k`.
pub fn numbered_names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}_{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = Matrix::from_rows(vec![vec![0.1, -3.25e-7], vec![1.0 / 3.0, 42.0]]).unwrap();
        write_matrix(&path, &integer_index(2), &numbered_names("x", 2), &m).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(back.values, m);
        assert_eq!(back.names, vec!["x_1", "x_2"]);
        assert_eq!(back.index, vec!["1", "2"]);
    }

    #[test]
    fn missing_cells_become_nan() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "index,a,b\n1,0.5,\n2,NA,2.0\n").unwrap();
        let t = read_matrix(&path).unwrap();
        assert!(t.values[(0, 1)].is_nan());
        assert!(t.values[(1, 0)].is_nan());
        assert_eq!(t.values[(1, 1)], 2.0);
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "index,a\n1,0.5,9\n").unwrap();
        assert!(read_matrix(&path).is_err());
        std::fs::write(&path, "").unwrap();
        assert!(read_matrix(&path).is_err());
        std::fs::write(&path, "index,a\n1,zebra\n").unwrap();
        assert!(read_matrix(&path).is_err());
    }
}
