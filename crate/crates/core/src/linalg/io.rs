//! Plain-text CSV matrix files: one row per line, comma-separated decimals.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::matrix::{Matrix, SymMatrix};

/// Formats a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_matrix_csv(text: &str) -> Result<Matrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|e| {
                    Error::Parse(format!("row {}: cannot parse {field:?}: {e}", line + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("matrix file is empty".into()));
    }
    Matrix::from_rows(&rows)
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<Matrix<f64>> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_matrix_csv(&text)
}

/// Reads an `n × n` matrix and symmetrizes it.
pub fn read_sym_matrix_csv(path: impl AsRef<Path>) -> Result<SymMatrix<f64>> {
    SymMatrix::from_matrix(read_matrix_csv(path)?)
}

/// Reads a vector stored either as one row or as one column.
pub fn read_vector_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let m = read_matrix_csv(path)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(Error::Parse(format!(
            "expected a single row or column, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.as_slice().to_vec())
}

pub fn write_matrix<W: Write>(out: W, m: &Matrix<f64>) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for i in 0..m.rows() {
        writer.write_record(m.row(i).iter().map(|&x| fmt_real(x)))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_matrix_csv(path: impl AsRef<Path>, m: &Matrix<f64>) -> Result<()> {
    write_matrix(BufWriter::new(File::create(path)?), m)
}
