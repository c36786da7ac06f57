//! Max-type statistics of normalized sums.
//!
//! For data `x_1, ..., x_n` in `R^p` the basic statistic is
//! `T_0 = max_j n^{-1/2} sum_i x_ij`; the multiplier version `W_0` replaces
//! `x_ij` with `x_ij e_i`. Which max is taken (signed, absolute or
//! studentized) is chosen by [`MaxStatVariant`].

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{check_len, Error, Result};

/// Positive per-coordinate scales that studentize the sums.
#[derive(Clone, Debug, PartialEq)]
pub struct Studentizer(Vec<f64>);

impl Studentizer {
    pub fn new(scale: Vec<f64>) -> Result<Self> {
        if scale.is_empty() {
            return Err(Error::EmptyInput("studentizer"));
        }
        if let Some(j) = scale.iter().position(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "studentizer entry {j} must be positive and finite"
            )));
        }
        Ok(Self(scale))
    }

    pub fn scale(&self) -> &[f64] {
        &self.0
    }
}

/// How the coordinate-wise normalized sums are reduced to a scalar.
#[derive(Clone, Debug, PartialEq)]
pub enum MaxStatVariant {
    /// `max_j s_j`
    SignedMax,
    /// `max_j |s_j|`
    AbsoluteMax,
    /// `max_j |s_j| / scale_j`
    Studentized(Studentizer),
}

/// Serializable tag for [`MaxStatVariant`] (the studentizer is data, not config).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    SignedMax,
    AbsoluteMax,
    Studentized,
}

impl MaxStatVariant {
    pub fn kind(&self) -> VariantKind {
        match self {
            Self::SignedMax => VariantKind::SignedMax,
            Self::AbsoluteMax => VariantKind::AbsoluteMax,
            Self::Studentized(_) => VariantKind::Studentized,
        }
    }

    pub fn check_dim(&self, p: usize) -> Result<()> {
        match self {
            Self::Studentized(s) => check_len("studentizer", p, s.0.len()),
            _ => Ok(()),
        }
    }

    /// Reduces already-normalized sums `s_j` to the statistic.
    #[inline]
    pub fn reduce(&self, sums: &[f64]) -> f64 {
        match self {
            Self::SignedMax => sums.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Self::AbsoluteMax => sums.iter().fold(0.0, |m, s| m.max(s.abs())),
            Self::Studentized(st) => sums
                .iter()
                .zip(&st.0)
                .fold(0.0, |m, (s, d)| m.max(s.abs() / d)),
        }
    }

    /// Like [`reduce`](Self::reduce) but only over the coordinates in `active`.
    #[inline]
    pub fn reduce_over(&self, sums: &[f64], active: &[usize]) -> f64 {
        match self {
            Self::SignedMax => active.iter().fold(f64::NEG_INFINITY, |m, &j| m.max(sums[j])),
            Self::AbsoluteMax => active.iter().fold(0.0, |m, &j| m.max(sums[j].abs())),
            Self::Studentized(st) => active
                .iter()
                .fold(0.0, |m, &j| m.max(sums[j].abs() / st.0[j])),
        }
    }
}

/// `n^{-1/2} sum_i w_i x_ij` for each column (with `w_i = 1` when absent).
pub fn normalized_column_sums(data: ArrayView2<'_, f64>, weights: Option<&[f64]>) -> Vec<f64> {
    let p = data.ncols();
    let sqrt_n = (data.nrows() as f64).sqrt();
    let mut sums = vec![0.0; p];
    for (i, row) in data.rows().into_iter().enumerate() {
        match weights {
            Some(w) => {
                let wi = w[i];
                for (s, x) in sums.iter_mut().zip(row) {
                    *s += x * wi;
                }
            }
            None => {
                for (s, x) in sums.iter_mut().zip(row) {
                    *s += x;
                }
            }
        }
    }
    for s in &mut sums {
        *s /= sqrt_n;
    }
    sums
}

/// `T_0`: the max statistic of `n^{-1/2} sum_i x_i`.
pub fn compute_max_stat(data: &DataMatrix, variant: &MaxStatVariant) -> Result<f64> {
    variant.check_dim(data.ncols())?;
    Ok(variant.reduce(&normalized_column_sums(data.view(), None)))
}

/// `W_0`: the max statistic of `n^{-1/2} sum_i x_i e_i` for given multipliers.
pub fn compute_w0(data: &DataMatrix, multipliers: &[f64], variant: &MaxStatVariant) -> Result<f64> {
    check_len("multipliers", data.nrows(), multipliers.len())?;
    variant.check_dim(data.ncols())?;
    Ok(variant.reduce(&normalized_column_sums(data.view(), Some(multipliers))))
}

/// Smooth max `beta^{-1} log sum_j exp(beta z_j)`, evaluated stably.
///
/// Satisfies `0 <= smooth_max(z) - max(z) <= log(len(z)) / beta`.
pub fn smooth_max(z: &[f64], beta: f64) -> Result<f64> {
    if z.is_empty() {
        return Err(Error::EmptyInput("smooth max"));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("smooth max needs beta > 0, got {beta}")));
    }
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // the max term contributes exactly 1, so the sum is >= 1 and the log >= 0
    let sum: f64 = z.iter().map(|&v| (beta * (v - m)).exp()).sum();
    let excess = (sum.ln() / beta).min(((z.len() as f64).ln()) / beta);
    Ok(m + excess.max(0.0))
}

/// Largest entrywise deviation of `E_n[x_i x_i']` from a supplied `sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceGap {
    pub delta: f64,
}

pub fn covariance_gap(data: &DataMatrix, sigma: ArrayView2<'_, f64>) -> Result<CovarianceGap> {
    let p = data.ncols();
    check_len("covariance rows", p, sigma.nrows())?;
    check_len("covariance cols", p, sigma.ncols())?;
    let empirical = crate::linalg::gram(data.view());
    let delta = empirical
        .iter()
        .zip(sigma.iter())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(CovarianceGap { delta })
}
