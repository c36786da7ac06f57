//! CSV and JSON plumbing: numeric tables with fixed formatting, matrix
//! loading, and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// Formats like C's `%.6g`: six significant digits, trailing zeros removed,
/// scientific notation outside `[1e-4, 1e6)`.
pub fn format_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_g(*x),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

/// A table with named columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                context: "table row",
                expected: self.columns.len(),
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf-8"))
    }

    /// Reads a table written by [`emit_csv`]; numeric-looking fields become
    /// [`Cell::Int`] or [`Cell::Num`].
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(parse_cell).collect());
        }
        Ok(Self { columns, rows })
    }
}

fn parse_cell(s: &str) -> Cell {
    if let Ok(i) = s.parse::<i64>() {
        return Cell::Int(i);
    }
    match s {
        "nan" => Cell::Num(f64::NAN),
        "inf" => Cell::Num(f64::INFINITY),
        "-inf" => Cell::Num(f64::NEG_INFINITY),
        _ => s.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::Text(s.to_string())),
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    write_atomic(path, table.to_csv_string()?.as_bytes())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// Loads a numeric CSV; the first row is skipped when `header` is set.
pub fn read_matrix(path: &Path, header: bool) -> Result<DataMatrix> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, f)| {
                f.parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("{}: row {}, column {}: not a number: {f:?}", path.display(), i + 1, j + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("CSV file"));
    }
    DataMatrix::from_rows(&rows)
}

/// Splits a loaded matrix into its first column and the rest.
pub fn split_first_column(m: &DataMatrix) -> Result<(Vec<f64>, DataMatrix)> {
    if m.ncols() < 2 {
        return Err(Error::InvalidInput("expected a response column and at least one regressor".into()));
    }
    let y = m.column(0).to_vec();
    let rest: Vec<usize> = (1..m.ncols()).collect();
    Ok((y, m.select_columns(&rest)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_formatting() {
        assert_eq!(format_g(0.0), "0");
        assert_eq!(format_g(1.0), "1");
        assert_eq!(format_g(0.1), "0.1");
        assert_eq!(format_g(1.959963984540054), "1.95996");
        assert_eq!(format_g(123456.7), "123457");
        assert_eq!(format_g(1234567.0), "1.23457e+06");
        assert_eq!(format_g(0.0001234), "0.0001234");
        assert_eq!(format_g(0.00001234), "1.234e-05");
        assert_eq!(format_g(-2.5), "-2.5");
        assert_eq!(format_g(999999.5), "1e+06");
        assert_eq!(format_g(f64::NAN), "nan");
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = Table::new(["name", "count", "value"]);
        t.push(vec!["a".into(), 3usize.into(), 0.25.into()]).unwrap();
        t.push(vec!["b".into(), 0usize.into(), (-1.5e-7).into()]).unwrap();
        emit_csv(&t, &path).unwrap();
        assert_eq!(Table::read_csv(&path).unwrap(), t);
        assert!(t.push(vec![1.0.into()]).is_err());
    }

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        emit_csv(&Table::new(["x", "y"]), &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "x,y\n");
    }

    #[test]
    fn matrix_loading() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        fs::write(&path, "y,z1\n1, 2\n3,4\n").unwrap();
        let m = read_matrix(&path, true).unwrap();
        assert_eq!(m.nrows(), 2);
        assert!(read_matrix(&path, false).is_err());
        let (y, z) = split_first_column(&m).unwrap();
        assert_eq!(y, vec![1.0, 3.0]);
        assert_eq!(z.column(0).to_vec(), vec![2.0, 4.0]);
    }
}
