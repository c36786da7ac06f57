//! The Dantzig selector
//!
//! `beta_hat in argmin ||b||_1  s.t.  sqrt(n) max_j |E_n[z_ij (y_i - z_i'b)]| <= lambda`
//!
//! solved as a linear program in the split variables `b = b+ - b-`, together
//! with the penalty rules ([`penalty`]), the identifiability-factor estimate
//! ([`kappa`]), simultaneous confidence rectangles and the portmanteau test
//! of `beta = 0`.

pub mod kappa;
pub mod penalty;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{check_len, Error, Result};
use crate::linalg::{cross_moment, gram};
use crate::lp::{solve, LpProblem, LpStatus, Sense};

pub use kappa::{estimate_kappa, KappaEstimate, NormKind};
pub use penalty::{
    canonical_penalty, compute_penalty, gar_penalty, gar_penalty_scaled, mb_penalty, MbPenalty, Penalty, PenaltySpec,
    ResidualMode,
};

const NORMALIZATION_TOL: f64 = 1e-8;
/// Coefficients with magnitude above this count as selected / nonzero.
pub const ZERO_TOL: f64 = 1e-8;

/// A regression sample with design columns normalized to `E_n[z_ij^2] = 1`.
#[derive(Clone, Debug)]
pub struct RegressionData {
    z: DataMatrix,
    y: Vec<f64>,
    gram: Array2<f64>,
    corr: Array1<f64>,
}

impl RegressionData {
    /// Wraps an already normalized design; fails if some column has
    /// `|E_n[z_ij^2] - 1| > 1e-8`.
    pub fn new(z: DataMatrix, y: Vec<f64>) -> Result<Self> {
        check_len("response length", z.nrows(), y.len())?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("response must be finite".into()));
        }
        let g = gram(z.view());
        for j in 0..z.ncols() {
            if (g[[j, j]] - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::InvalidInput(format!(
                    "design column {j} has E_n[z^2] = {}, expected 1",
                    g[[j, j]]
                )));
            }
        }
        let corr = cross_moment(z.view(), &y);
        Ok(Self { z, y, gram: g, corr })
    }

    /// Rescales each column of `z_raw` to unit empirical second moment.
    /// Returns the data and the scale that was divided out of each column.
    pub fn normalized(z_raw: DataMatrix, y: Vec<f64>) -> Result<(Self, Vec<f64>)> {
        let n = z_raw.nrows() as f64;
        let scales: Vec<f64> = (0..z_raw.ncols())
            .map(|j| (z_raw.column(j).iter().map(|v| v * v).sum::<f64>() / n).sqrt())
            .collect();
        if let Some(j) = scales.iter().position(|s| !(*s > 0.0)) {
            return Err(Error::InvalidInput(format!("design column {j} is identically zero")));
        }
        let mut values = z_raw.into_inner();
        for (mut col, s) in values.columns_mut().into_iter().zip(&scales) {
            col.mapv_inplace(|v| v / s);
        }
        Ok((Self::new(DataMatrix::new(values)?, y)?, scales))
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn p(&self) -> usize {
        self.z.ncols()
    }

    pub fn design(&self) -> &DataMatrix {
        &self.z
    }

    pub fn response(&self) -> &[f64] {
        &self.y
    }

    /// `E_n[z_i z_i']`.
    pub fn gram(&self) -> &Array2<f64> {
        &self.gram
    }

    /// `E_n[z_i y_i]`.
    pub fn correlations(&self) -> &Array1<f64> {
        &self.corr
    }

    pub fn fitted(&self, beta: &[f64]) -> Vec<f64> {
        self.z.view().dot(&Array1::from(beta.to_vec())).to_vec()
    }

    pub fn residuals(&self, beta: &[f64]) -> Vec<f64> {
        self.fitted(beta)
            .iter()
            .zip(&self.y)
            .map(|(f, y)| y - f)
            .collect()
    }

    /// `sqrt(n) max_j |E_n[z_ij (y_i - z_i'b)]|`, evaluated from the raw data.
    pub fn score_sup_norm(&self, beta: &[f64]) -> f64 {
        let r = self.residuals(beta);
        let sqrt_n = (self.n() as f64).sqrt();
        cross_moment(self.z.view(), &r)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            * sqrt_n
    }

    /// Prediction seminorm `sqrt(E_n[(z_i'delta)^2])`.
    pub fn prediction_norm(&self, delta: &[f64]) -> f64 {
        let f = self.fitted(delta);
        (f.iter().map(|v| v * v).sum::<f64>() / self.n() as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    Canonical,
    Gar,
    MultiplierBootstrap,
    /// Supplied directly by the caller.
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DantzigResult {
    pub beta_hat: Vec<f64>,
    pub lambda: f64,
    pub penalty_kind: PenaltyKind,
    pub status: LpStatus,
    /// `max(0, sqrt(n) max_j |E_n[z_ij(y_i - z_i'beta_hat)]| - lambda)`.
    pub constraint_residual: f64,
}

impl DantzigResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn l1_norm(&self) -> f64 {
        self.beta_hat.iter().map(|b| b.abs()).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        self.beta_hat
            .iter()
            .enumerate()
            .filter(|(_, b)| b.abs() > ZERO_TOL)
            .map(|(j, _)| j)
            .collect()
    }
}

/// The split-variable LP: variables `(b+, b-) >= 0`, two rows per regressor.
pub fn dantzig_lp(data: &RegressionData, lambda: f64) -> Result<LpProblem> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("penalty level must be finite and >= 0, got {lambda}")));
    }
    let p = data.p();
    let t = lambda / (data.n() as f64).sqrt();
    let g = &data.gram;
    let mut a = Array2::zeros((2 * p, 2 * p));
    let mut rhs = Vec::with_capacity(2 * p);
    for j in 0..p {
        for k in 0..p {
            a[[2 * j, k]] = g[[j, k]];
            a[[2 * j, p + k]] = -g[[j, k]];
            a[[2 * j + 1, k]] = -g[[j, k]];
            a[[2 * j + 1, p + k]] = g[[j, k]];
        }
        rhs.push(data.corr[j] + t);
        rhs.push(t - data.corr[j]);
    }
    LpProblem::new(vec![1.0; 2 * p], a, rhs, vec![Sense::Le; 2 * p])
}

/// Fits the Dantzig selector at penalty level `lambda`.
///
/// The minimizer need not be unique; any optimal vertex of the LP is
/// returned. A non-optimal LP status is reported in the result, with a zero
/// coefficient vector.
pub fn fit_dantzig(data: &RegressionData, lambda: f64) -> Result<DantzigResult> {
    fit_with_kind(data, lambda, PenaltyKind::Explicit)
}

pub(crate) fn fit_with_kind(
    data: &RegressionData,
    lambda: f64,
    penalty_kind: PenaltyKind,
) -> Result<DantzigResult> {
    let problem = dantzig_lp(data, lambda)?;
    let p = data.p();
    let limit = 200 * (4 * p) + 1000;
    let sol = solve(&problem, limit)?;
    let beta_hat: Vec<f64> = if sol.status == LpStatus::Optimal {
        (0..p).map(|k| sol.x[k] - sol.x[p + k]).collect()
    } else {
        vec![0.0; p]
    };
    let constraint_residual = (data.score_sup_norm(&beta_hat) - lambda).max(0.0);
    Ok(DantzigResult {
        beta_hat,
        lambda,
        penalty_kind,
        status: sol.status,
        constraint_residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// Simultaneous rectangle `beta_hat_j +- 2 lambda / (sqrt(n) kappa_j)`.
pub fn confidence_rectangle(result: &DantzigResult, kappa_jc: &[f64], n: usize) -> Result<Vec<Interval>> {
    check_len("kappa_jc", result.beta_hat.len(), kappa_jc.len())?;
    if let Some(j) = kappa_jc.iter().position(|k| !(*k > 0.0)) {
        return Err(Error::Domain(format!("kappa entry {j} must be positive")));
    }
    if n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    let sqrt_n = (n as f64).sqrt();
    Ok(result
        .beta_hat
        .iter()
        .zip(kappa_jc)
        .map(|(b, k)| {
            let h = 2.0 * result.lambda / (sqrt_n * k);
            Interval {
                lower: b - h,
                upper: b + h,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PortmanteauResult {
    pub reject: bool,
    pub penalty: Penalty,
    pub fit: DantzigResult,
}

/// Test of `beta = 0`: reject iff the Dantzig fit at the chosen penalty has
/// a coefficient with `|beta_hat_j| > 1e-8`.
pub fn portmanteau_test(data: &RegressionData, spec: &PenaltySpec) -> Result<PortmanteauResult> {
    let penalty = compute_penalty(data, spec)?;
    let fit = fit_with_kind(data, penalty.lambda, penalty.kind)?;
    if !fit.is_optimal() {
        return Err(Error::Solver(format!("Dantzig LP ended with status {:?}", fit.status)));
    }
    let reject = fit.beta_hat.iter().any(|b| b.abs() > ZERO_TOL);
    Ok(PortmanteauResult {
        reject,
        penalty,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthonormal(y: Vec<f64>) -> RegressionData {
        // columns of a 4x3 Hadamard-type design: E_n[z_j z_k] = 1{j = k}
        let z = DataMatrix::from_rows(&[
            vec![1.0, 1.0, 1.0],
            vec![1.0, -1.0, -1.0],
            vec![-1.0, 1.0, -1.0],
            vec![-1.0, -1.0, 1.0],
        ])
        .unwrap();
        RegressionData::new(z, y).unwrap()
    }

    #[test]
    fn rejects_unnormalized_design() {
        let z = DataMatrix::from_rows(&[vec![2.0], vec![0.0]]).unwrap();
        assert!(RegressionData::new(z.clone(), vec![1.0, 0.0]).is_err());
        let (d, scales) = RegressionData::normalized(z, vec![1.0, 0.0]).unwrap();
        assert!((scales[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!((d.gram()[[0, 0]] - 1.0).abs() < 1e-15);
        let zero = DataMatrix::from_rows(&[vec![0.0], vec![0.0]]).unwrap();
        assert!(RegressionData::normalized(zero, vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn large_penalty_gives_zero() {
        let d = orthonormal(vec![3.0, -1.0, 0.5, 2.0]);
        let lam = d.score_sup_norm(&[0.0; 3]);
        let fit = fit_dantzig(&d, lam * 1.0001).unwrap();
        assert!(fit.is_optimal());
        assert!(fit.beta_hat.iter().all(|b| b.abs() < 1e-12));
    }

    #[test]
    fn orthonormal_design_soft_thresholds() {
        let d = orthonormal(vec![3.0, -1.0, 0.5, 2.0]);
        let lam = 0.8;
        let t = lam / 2.0;
        let fit = fit_dantzig(&d, lam).unwrap();
        for (b, c) in fit.beta_hat.iter().zip(d.correlations()) {
            let soft = c.signum() * (c.abs() - t).max(0.0);
            assert!((b - soft).abs() < 1e-6, "{b} vs {soft}");
        }
        assert!(fit.constraint_residual <= 1e-9);
    }

    #[test]
    fn negative_penalty_is_an_error() {
        let d = orthonormal(vec![1.0, 0.0, 0.0, 0.0]);
        assert!(fit_dantzig(&d, -1.0).is_err());
    }

    #[test]
    fn rectangle_examples() {
        let fit = DantzigResult {
            beta_hat: vec![1.0, 0.0],
            lambda: 2.0,
            penalty_kind: PenaltyKind::Explicit,
            status: LpStatus::Optimal,
            constraint_residual: 0.0,
        };
        let r = confidence_rectangle(&fit, &[1.0, 1.0], 4).unwrap();
        assert_eq!(r[0], Interval { lower: -1.0, upper: 3.0 });
        assert_eq!(r[1].half_width(), 2.0);
        let doubled = DantzigResult { lambda: 4.0, ..fit.clone() };
        let r2 = confidence_rectangle(&doubled, &[1.0, 0.5], 4).unwrap();
        assert_eq!(r2[0].half_width(), 2.0 * r[0].half_width());
        let zero = DantzigResult { lambda: 0.0, ..fit.clone() };
        let r0 = confidence_rectangle(&zero, &[1.0, 1.0], 4).unwrap();
        assert_eq!(r0[0].lower, r0[0].upper);
        assert!(confidence_rectangle(&fit, &[1.0, 0.0], 4).is_err());
        assert!(confidence_rectangle(&fit, &[1.0], 4).is_err());
    }
}
