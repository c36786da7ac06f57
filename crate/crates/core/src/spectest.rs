//! Adaptive specification test of a linear mean model `E[y_i] = v_i'beta`.
//!
//! Test functions `z_ij = P_j(v_i)` are orthogonalized against `v` and
//! normalized. With OLS residuals `eps_hat_i = y_i - v_i'beta_hat`,
//!
//! `T = max_j |n^{-1/2} sum_i z_ij eps_hat_i| / sqrt(E_n[z_ij^2 eps_hat_i^2])`
//!
//! and the critical value is the multiplier-bootstrap quantile of the same
//! expression with `eps_hat_i e_i` in place of `eps_hat_i`.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::bootstrap::{multiplier_bootstrap_quantile, BootstrapConfig};
use crate::data::DataMatrix;
use crate::error::{check_len, Error, Result};
use crate::linalg::{cholesky, cholesky_solve, cross_moment, gram, symmetric_eigenvalues};
use crate::maxstat::{normalized_column_sums, MaxStatVariant, Studentizer};

const MIN_EIGENVALUE: f64 = 1e-10;
const DROP_TOL: f64 = 1e-10;
const DEGENERATE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SpecTestInput {
    v: DataMatrix,
    y: Vec<f64>,
    p_raw: DataMatrix,
    vv_chol: Array2<f64>,
}

impl SpecTestInput {
    pub fn new(v: DataMatrix, y: Vec<f64>, p_raw: DataMatrix) -> Result<Self> {
        let n = v.nrows();
        check_len("response length", n, y.len())?;
        check_len("test function rows", n, p_raw.nrows())?;
        if y.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("response must be finite".into()));
        }
        if v.ncols() > n {
            return Err(Error::InvalidInput(format!("{} regressors exceed {n} observations", v.ncols())));
        }
        let vv = gram(v.view());
        let min_eig = symmetric_eigenvalues(vv.view())[0];
        if !(min_eig > MIN_EIGENVALUE) {
            return Err(Error::InvalidInput(format!(
                "E_n[v v'] is near singular (minimum eigenvalue {min_eig:e})"
            )));
        }
        let vv_chol = cholesky(vv.view(), 0.0)?;
        Ok(Self { v, y, p_raw, vv_chol })
    }

    pub fn regressors(&self) -> &DataMatrix {
        &self.v
    }

    pub fn response(&self) -> &[f64] {
        &self.y
    }

    pub fn raw_test_functions(&self) -> &DataMatrix {
        &self.p_raw
    }

    /// OLS coefficients of `target` on `v`.
    fn ols(&self, target: &[f64]) -> Vec<f64> {
        let rhs = cross_moment(self.v.view(), target);
        cholesky_solve(&self.vv_chol, rhs.as_slice().expect("contiguous"))
    }

    fn residualize(&self, target: &[f64]) -> Vec<f64> {
        let coef = self.ols(target);
        let fit = self.v.view().dot(&Array1::from(coef));
        target.iter().zip(fit.iter()).map(|(a, b)| a - b).collect()
    }
}

/// Orthogonalized, normalized test functions.
#[derive(Clone, Debug)]
pub struct TestFunctions {
    pub z: DataMatrix,
    /// Raw column index of each column of `z`.
    pub kept: Vec<usize>,
    /// Raw columns (numerically) in the span of `v`.
    pub dropped: Vec<usize>,
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Residualizes each raw column on `v` (two projection passes) and rescales
/// it to `E_n[z^2] = 1`. Columns whose residual is below `1e-10` times their
/// original size are dropped.
pub fn build_test_functions(input: &SpecTestInput) -> Result<TestFunctions> {
    let n = input.v.nrows();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut cols: Vec<f64> = Vec::new();
    for j in 0..input.p_raw.ncols() {
        let raw = input.p_raw.column(j).to_vec();
        let before = rms(&raw);
        let once = input.residualize(&raw);
        let resid = input.residualize(&once);
        let after = rms(&resid);
        if !(after > DROP_TOL * before) {
            dropped.push(j);
            continue;
        }
        kept.push(j);
        cols.extend(resid.iter().map(|r| r / after));
    }
    if kept.is_empty() {
        return Err(Error::InvalidInput("every test function lies in the span of the regressors".into()));
    }
    // `cols` is column-major
    let z = Array2::from_shape_vec((kept.len(), n), cols)
        .expect("shape")
        .reversed_axes()
        .as_standard_layout()
        .into_owned();
    if !dropped.is_empty() {
        log::warn!("dropped {} test functions in the span of the regressors", dropped.len());
    }
    Ok(TestFunctions {
        z: DataMatrix::new(z)?,
        kept,
        dropped,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecTestResult {
    pub statistic: f64,
    pub critical_value: f64,
    pub reject: bool,
    /// `|n^{-1/2} sum_i z_ij eps_hat_i| / sqrt(E_n[z_ij^2 eps_hat_i^2])` per raw
    /// column; `None` for dropped or degenerate columns.
    pub per_function_scores: Vec<Option<f64>>,
    /// Raw columns in the span of the regressors.
    pub dropped: Vec<usize>,
    /// Raw columns with a vanishing studentizer.
    pub excluded: Vec<usize>,
    pub beta_hat: Vec<f64>,
    pub replications: usize,
}

/// Runs the test at level `alpha`; only `replications` and `seed` of
/// `config` are used.
pub fn run_spec_test(input: &SpecTestInput, alpha: f64, config: &BootstrapConfig) -> Result<SpecTestResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let tf = build_test_functions(input)?;
    let beta_hat = input.ols(&input.y);
    let fit = input.v.view().dot(&Array1::from(beta_hat.clone()));
    let resid: Vec<f64> = input.y.iter().zip(fit.iter()).map(|(y, f)| y - f).collect();
    let weighted = tf.z.scale_rows(&resid)?;
    let n = input.v.nrows() as f64;
    let threshold = DEGENERATE_TOL * rms(&input.y);
    let mut active = Vec::new();
    let mut excluded = Vec::new();
    let mut scales = Vec::new();
    for (k, &raw) in tf.kept.iter().enumerate() {
        let s = (weighted.column(k).iter().map(|x| x * x).sum::<f64>() / n).sqrt();
        if s > threshold && s > 0.0 {
            active.push(k);
            scales.push(s);
        } else {
            excluded.push(raw);
        }
    }
    let mut per_function_scores = vec![None; input.p_raw.ncols()];
    if active.is_empty() {
        log::warn!("all studentizers vanish; the test cannot reject");
        return Ok(SpecTestResult {
            statistic: 0.0,
            critical_value: 0.0,
            reject: false,
            per_function_scores,
            dropped: tf.dropped,
            excluded,
            beta_hat,
            replications: config.replications,
        });
    }
    let x = weighted.select_columns(&active)?;
    let variant = MaxStatVariant::Studentized(Studentizer::new(scales.clone())?);
    let sums = normalized_column_sums(x.view(), None);
    for ((k, s), sum) in active.iter().zip(&scales).zip(&sums) {
        per_function_scores[tf.kept[*k]] = Some(sum.abs() / s);
    }
    let statistic = variant.reduce(&sums);
    let boot = BootstrapConfig {
        variant,
        ..config.clone()
    };
    let critical_value = multiplier_bootstrap_quantile(&x, 1.0 - alpha, &boot)?.value;
    Ok(SpecTestResult {
        statistic,
        critical_value,
        reject: statistic > critical_value,
        per_function_scores,
        dropped: tf.dropped,
        excluded,
        beta_hat,
        replications: config.replications,
    })
}

/// Built-in test-function families, evaluated on every non-constant column
/// of `v` after mapping its range to `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFamily {
    /// Legendre polynomials of degree `1..=degree` of each covariate, plus
    /// products `P_a(v_k) P_b(v_l)`, `k < l`, with `a + b <= degree`.
    Legendre { degree: usize },
    /// Chebyshev polynomials `T_a`, with the same products as `Legendre`.
    /// Bounded by one everywhere, so no column piles its mass on the few
    /// observations at the ends of the range.
    Chebyshev { degree: usize },
    /// `count` cubic B-spline bumps per covariate on an equispaced grid.
    BSpline { count: usize },
}

fn legendre_all(x: f64, degree: usize) -> Vec<f64> {
    let mut out = vec![1.0, x];
    for k in 1..degree {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * out[out.len() - 1] - k * out[out.len() - 2]) / (k + 1.0);
        out.push(next);
    }
    out.truncate(degree + 1);
    out
}

fn chebyshev_all(x: f64, degree: usize) -> Vec<f64> {
    let mut out = vec![1.0, x];
    for _ in 1..degree {
        let next = 2.0 * x * out[out.len() - 1] - out[out.len() - 2];
        out.push(next);
    }
    out.truncate(degree + 1);
    out
}

/// Degree-`1..=degree` terms of each covariate, then pairwise products
/// `f_a(x_k) f_b(x_l)` with `a + b <= degree`.
fn polynomial_columns(
    scaled: &[Vec<f64>],
    degree: usize,
    basis: fn(f64, usize) -> Vec<f64>,
    cols: &mut Vec<Vec<f64>>,
) -> Result<()> {
    if degree == 0 {
        return Err(Error::InvalidInput("polynomial degree must be at least 1".into()));
    }
    let evals: Vec<Vec<Vec<f64>>> = scaled
        .iter()
        .map(|c| c.iter().map(|x| basis(*x, degree)).collect())
        .collect();
    for e in &evals {
        for a in 1..=degree {
            cols.push(e.iter().map(|row| row[a]).collect());
        }
    }
    for k in 0..evals.len() {
        for l in (k + 1)..evals.len() {
            for a in 1..degree {
                for b in 1..=(degree - a) {
                    cols.push((0..evals[k].len()).map(|i| evals[k][i][a] * evals[l][i][b]).collect());
                }
            }
        }
    }
    Ok(())
}

fn cubic_bspline(t: f64) -> f64 {
    let a = t.abs();
    if a < 1.0 {
        (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0
    } else if a < 2.0 {
        (2.0 - a).powi(3) / 6.0
    } else {
        0.0
    }
}

impl TestFamily {
    pub fn evaluate(&self, v: &DataMatrix) -> Result<DataMatrix> {
        let n = v.nrows();
        let mut scaled: Vec<Vec<f64>> = Vec::new();
        for k in 0..v.ncols() {
            let col = v.column(k);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                scaled.push(col.iter().map(|x| 2.0 * (x - lo) / (hi - lo) - 1.0).collect());
            }
        }
        if scaled.is_empty() {
            return Err(Error::InvalidInput("no non-constant covariate to build test functions from".into()));
        }
        let mut cols: Vec<Vec<f64>> = Vec::new();
        match *self {
            TestFamily::Legendre { degree } => polynomial_columns(&scaled, degree, legendre_all, &mut cols)?,
            TestFamily::Chebyshev { degree } => polynomial_columns(&scaled, degree, chebyshev_all, &mut cols)?,
            TestFamily::BSpline { count } => {
                if count < 2 {
                    return Err(Error::InvalidInput("B-spline family needs at least 2 bumps".into()));
                }
                let h = 2.0 / (count - 1) as f64;
                for c in &scaled {
                    for m in 0..count {
                        let center = -1.0 + m as f64 * h;
                        cols.push(c.iter().map(|x| cubic_bspline((x - center) / h)).collect());
                    }
                }
            }
        }
        let p = cols.len();
        let flat: Vec<f64> = cols.concat();
        let a = Array2::from_shape_vec((p, n), flat)
            .expect("shape")
            .reversed_axes()
            .as_standard_layout()
            .into_owned();
        DataMatrix::new(a)
    }
}
