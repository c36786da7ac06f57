use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// An `n x p` matrix of observations; row `i` is observation `x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix {
    values: Array2<f64>,
}

impl DataMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::EmptyInput("data matrix needs n >= 1 and p >= 1"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let p = values.ncols();
            return Err(Error::InvalidInput(format!(
                "non-finite entry at row {}, column {}",
                pos / p,
                pos % p
            )));
        }
        Ok(Self {
            values: values.as_standard_layout().into_owned(),
        })
    }

    pub fn from_shape_vec(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        let arr = Array2::from_shape_vec((n, p), values)
            .map_err(|e| Error::InvalidInput(format!("bad data shape: {e}")))?;
        Self::new(arr)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(n * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {p}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        Self::from_shape_vec(n, p, flat)
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, f64> {
        self.values.column(j)
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.values
    }

    /// Column means, accumulated relative to the first row so that a
    /// constant column has exactly its constant as mean.
    pub fn column_means(&self) -> Vec<f64> {
        let n = self.nrows() as f64;
        let first = self.values.row(0);
        let mut acc = vec![0.0; self.ncols()];
        for row in self.values.rows() {
            for ((a, x), f) in acc.iter_mut().zip(row).zip(first) {
                *a += x - f;
            }
        }
        acc.iter().zip(first).map(|(a, f)| f + a / n).collect()
    }

    /// The data with column means removed.
    pub fn centered(&self) -> Self {
        let means = self.column_means();
        let mut values = self.values.clone();
        for mut row in values.rows_mut() {
            for (x, m) in row.iter_mut().zip(&means) {
                *x -= m;
            }
        }
        Self { values }
    }

    /// Multiplies row `i` by `weights[i]`.
    pub fn scale_rows(&self, weights: &[f64]) -> Result<Self> {
        crate::error::check_len("scale_rows", self.nrows(), weights.len())?;
        let mut values = self.values.clone();
        for (mut row, w) in values.rows_mut().into_iter().zip(weights) {
            row.mapv_inplace(|x| x * w);
        }
        Self::new(values)
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.mapv(|x| x * factor))
    }

    /// Keeps the listed columns, in order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if let Some(&bad) = columns.iter().find(|&&j| j >= self.ncols()) {
            return Err(Error::InvalidInput(format!("column {bad} out of range")));
        }
        Self::new(self.values.select(ndarray::Axis(1), columns))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_shape_and_values() {
        assert!(DataMatrix::from_shape_vec(0, 2, vec![]).is_err());
        assert!(DataMatrix::from_shape_vec(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DataMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn constant_column_has_exact_mean() {
        let d = DataMatrix::from_rows(&[vec![0.1, 1.0], vec![0.1, 2.0], vec![0.1, 6.0]]).unwrap();
        let m = d.column_means();
        assert_eq!(m[0], 0.1);
        assert!((m[1] - 3.0).abs() < 1e-15);
        let c = d.centered();
        assert!(c.column(0).iter().all(|&v| v == 0.0));
    }
}
