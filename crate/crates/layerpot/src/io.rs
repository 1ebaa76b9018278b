//! Artifact output: flat-binary and CSV matrix dumps, per-report CSV tables,
//! JSON records. All writes are atomic (write to a temp file, then rename).

use ndarray::Array2;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

use crate::error::LayerpotError;
use crate::nodal::NodalReport;

/// Writes `bytes` atomically: temp file in the destination directory, then
/// rename over the target.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), LayerpotError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| LayerpotError::Io(e.error))?;
    Ok(())
}

/// Flat binary matrix dump: one little-endian 8-byte integer N, then the
/// N x N entries as row-major little-endian 8-byte floats.
pub fn write_matrix_binary(path: &Path, a: &Array2<f64>) -> Result<(), LayerpotError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LayerpotError::InvalidShape("matrix must be square".into()));
    }
    let mut bytes = Vec::with_capacity(8 * (1 + n * n));
    bytes.extend_from_slice(&(n as u64).to_le_bytes());
    for row in a.rows() {
        for &v in row {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    atomic_write(path, &bytes)
}

/// Reads a flat binary matrix dump back.
pub fn read_matrix_binary(path: &Path) -> Result<Array2<f64>, LayerpotError> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 8 {
        return Err(LayerpotError::InvalidShape("truncated matrix file".into()));
    }
    let n = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
    if bytes.len() != 8 * (1 + n * n) {
        return Err(LayerpotError::InvalidShape(format!(
            "matrix file length {} does not match N = {n}",
            bytes.len()
        )));
    }
    let data: Vec<f64> = bytes[8..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Array2::from_shape_vec((n, n), data)
        .map_err(|e| LayerpotError::InvalidShape(e.to_string()))
}

/// CSV matrix dump for debugging; no header, one row per line, full
/// round-trip precision.
pub fn write_matrix_csv(path: &Path, a: &Array2<f64>) -> Result<(), LayerpotError> {
    let mut out = String::new();
    for row in a.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// Serializes any list of serde rows to a headered CSV, atomically.
pub fn write_csv_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), LayerpotError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in rows {
        wtr.serialize(row)?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| LayerpotError::InvalidArgument(e.to_string()))?;
    atomic_write(path, &bytes)
}

/// Serializes a report to pretty JSON, atomically.
pub fn write_json<T: Serialize>(path: &Path, report: &T) -> Result<(), LayerpotError> {
    let mut bytes = serde_json::to_vec_pretty(report)?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

/// Nodal report CSV row as documented: shape, N, lambda, real_zeros,
/// annulus_zeros, ratio, epsilon.
#[derive(Debug, Serialize)]
pub struct NodalCsvRow<'a> {
    pub shape: &'a str,
    pub n: usize,
    pub lambda: f64,
    pub real_zeros: usize,
    pub annulus_zeros: usize,
    pub ratio: f64,
    pub epsilon: f64,
}

/// Flattens nodal reports into CSV rows for one shape.
pub fn nodal_csv_rows<'a>(
    shape: &'a str,
    n: usize,
    reports: &[NodalReport],
) -> Vec<NodalCsvRow<'a>> {
    reports
        .iter()
        .map(|r| NodalCsvRow {
            shape,
            n,
            lambda: r.lambda,
            real_zeros: r.real_zeros,
            annulus_zeros: r.annulus_zeros,
            ratio: r.ratio,
            epsilon: r.epsilon,
        })
        .collect()
}

pub use crate::spectral::{spectrum_csv_rows, SpectrumCsvRow};

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn binary_matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        let a = array![[1.0, -0.25], [1e-15, 3.5e300]];
        write_matrix_binary(&path, &a).unwrap();
        let b = read_matrix_binary(&path).unwrap();
        assert_eq!(a, b);
        let len = std::fs::metadata(&path).unwrap().len();
        assert_eq!(len, 8 * (1 + 4));
    }

    #[test]
    fn binary_reader_rejects_bad_lengths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, [0u8; 20]).unwrap();
        assert!(read_matrix_binary(&path).is_err());
    }

    #[test]
    fn csv_matrix_has_full_precision() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let a = array![[std::f64::consts::PI, 1.0 / 3.0]];
        write_matrix_csv(&path, &a).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed: Vec<f64> = text.trim().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(parsed, vec![std::f64::consts::PI, 1.0 / 3.0]);
    }

    #[test]
    fn atomic_write_replaces_existing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        atomic_write(&path, b"first").unwrap();
        atomic_write(&path, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
    }

    #[test]
    fn identical_rows_give_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        let rows = nodal_csv_rows("ellipse(2,0.5)", 256, &[]);
        write_csv_rows(&p1, &rows).unwrap();
        write_csv_rows(&p2, &rows).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }
}
