//! Monte Carlo harness for the distributional claims at desk scale.
//!
//! Every experiment is a pure function of its config: outer replication `r`
//! draws from seeds derived from `(seed, r)`, results are collected in
//! replication order, and nested bootstraps are thread-count invariant.

mod coverage;
mod fwer;
mod ppplot;
mod spec_size;
mod table;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::dist::{fill_normal, sample_normal, sample_student_t};
use crate::error::{Error, Result};
use crate::io::Table;
use crate::rng::{derive_seed, SeededRng};

pub use coverage::{run_bootstrap_agreement, run_coverage, AgreementConfig, AgreementResult, CoverageConfig, CoverageResult, MeanData};
pub use fwer::{run_fwer, FwerConfig, FwerResult};
pub use ppplot::{run_ppplot, PpPlotConfig, PpPlotData};
pub use spec_size::{run_spec_size, SpecSizeConfig, SpecSizeResult};
pub use table::{run_dantzig_table, DantzigTable, DantzigTableConfig, PenaltyRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    /// `t(5)` rescaled to unit variance.
    StudentT5Normalized,
    /// Raw `t(4)`, variance 2.
    StudentT4,
}

impl NoiseKind {
    pub fn sample(&self, rng: &mut SeededRng, count: usize) -> Vec<f64> {
        match self {
            NoiseKind::Gaussian => sample_normal(rng, count),
            NoiseKind::StudentT5Normalized => sample_student_t(rng, 5, count, true).expect("dof 5"),
            NoiseKind::StudentT4 => sample_student_t(rng, 4, count, false).expect("dof 4"),
        }
    }

    /// Standard deviation of one draw.
    pub fn sd(&self) -> f64 {
        match self {
            NoiseKind::StudentT4 => 2f64.sqrt(),
            _ => 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::StudentT5Normalized => "student_t5_normalized",
            NoiseKind::StudentT4 => "student_t4",
        }
    }
}

/// Equicorrelated regression design with an intercept and optional
/// heteroscedasticity `sigma(z_i) = 2 exp(gamma z_i2) / (1 + exp(gamma z_i2))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McDesign {
    pub n: usize,
    pub p: usize,
    pub rho: f64,
    pub sigma0: f64,
    pub noise: NoiseKind,
    pub gamma: f64,
    pub reps: usize,
    pub seed: u64,
}

/// One simulated regression sample.
#[derive(Clone, Debug)]
pub struct McSample {
    pub z: DataMatrix,
    pub y: Vec<f64>,
    pub beta: Vec<f64>,
    /// `sigma0 * sigma(z_i)`.
    pub noise_scale: Vec<f64>,
}

impl McDesign {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.p < 2 {
            return Err(Error::InvalidInput("design needs n >= 2 and p >= 2".into()));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::Domain(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(Error::Domain("sigma0 must be positive".into()));
        }
        if !self.gamma.is_finite() {
            return Err(Error::Domain("gamma must be finite".into()));
        }
        if self.reps == 0 {
            return Err(Error::InvalidInput("reps must be at least 1".into()));
        }
        Ok(())
    }

    /// Upper bound on the noise scale: `sigma0 (1 + 1{gamma != 0})`.
    pub fn sigma_bar(&self) -> f64 {
        self.sigma0 * if self.gamma != 0.0 { 2.0 } else { 1.0 }
    }

    /// Draws replication `rep` with `s` unit coefficients on a random support.
    pub fn simulate(&self, rep: usize, s: usize) -> Result<McSample> {
        let (n, p) = (self.n, self.p);
        if s > p {
            return Err(Error::InvalidInput(format!("sparsity {s} exceeds p = {p}")));
        }
        let mut rng = SeededRng::new(derive_seed(self.seed, rep as u64));
        let a = self.rho.sqrt();
        let b = (1.0 - self.rho).sqrt();
        let mut w = vec![0.0; n * (p - 1)];
        fill_normal(&mut rng, &mut w);
        let f = sample_normal(&mut rng, n);
        for (row, fi) in w.chunks_mut(p - 1).zip(&f) {
            row.iter_mut().for_each(|v| *v = a * fi + b * *v);
        }
        let mut norms = vec![0.0; p - 1];
        for row in w.chunks(p - 1) {
            norms.iter_mut().zip(row).for_each(|(s, v)| *s += v * v);
        }
        norms.iter_mut().for_each(|s| *s = (*s / n as f64).sqrt());
        let mut values = Vec::with_capacity(n * p);
        for row in w.chunks(p - 1) {
            values.push(1.0);
            values.extend(row.iter().zip(&norms).map(|(v, s)| v / s));
        }
        let z = DataMatrix::from_shape_vec(n, p, values)?;
        let mut beta = vec![0.0; p];
        for j in rand::seq::index::sample(&mut rng, p, s) {
            beta[j] = 1.0;
        }
        let noise_scale: Vec<f64> = (0..n)
            .map(|i| {
                let t = self.gamma * z.view()[[i, 1]];
                self.sigma0 * 2.0 / (1.0 + (-t).exp())
            })
            .collect();
        let e = self.noise.sample(&mut rng, n);
        let y = (0..n)
            .map(|i| {
                let row = z.row(i);
                let signal: f64 = beta.iter().zip(row).map(|(bj, zj)| bj * zj).sum();
                signal + noise_scale[i] * e[i]
            })
            .collect();
        Ok(McSample { z, y, beta, noise_scale })
    }
}

/// Experiment configurations accepted by the `montecarlo` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Ppplot(PpPlotConfig),
    DantzigTable(DantzigTableConfig),
    Coverage(CoverageConfig),
    Fwer(FwerConfig),
    SpecSize(SpecSizeConfig),
    BootstrapAgreement(AgreementConfig),
}

/// Tabular output plus a JSON summary.
pub struct ExperimentOutput {
    pub name: &'static str,
    pub table: Table,
    pub summary: serde_json::Value,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    Ok(match config {
        ExperimentConfig::Ppplot(c) => {
            let r = run_ppplot(c)?;
            ExperimentOutput {
                name: "ppplot",
                table: r.to_table(),
                summary: serde_json::json!({ "ks": r.ks, "reps": c.reps, "n": c.n, "p": c.p }),
            }
        }
        ExperimentConfig::DantzigTable(c) => {
            let r = run_dantzig_table(c)?;
            ExperimentOutput {
                name: "dantzig_table",
                table: r.to_table(),
                summary: serde_json::to_value(&r)?,
            }
        }
        ExperimentConfig::Coverage(c) => {
            let r = run_coverage(c)?;
            ExperimentOutput {
                name: "coverage",
                table: r.to_table(),
                summary: serde_json::to_value(&r)?,
            }
        }
        ExperimentConfig::Fwer(c) => {
            let r = run_fwer(c)?;
            ExperimentOutput {
                name: "fwer",
                table: r.to_table(),
                summary: serde_json::to_value(&r)?,
            }
        }
        ExperimentConfig::SpecSize(c) => {
            let r = run_spec_size(c)?;
            ExperimentOutput {
                name: "spec_size",
                table: r.to_table(),
                summary: serde_json::to_value(&r)?,
            }
        }
        ExperimentConfig::BootstrapAgreement(c) => {
            let r = run_bootstrap_agreement(c)?;
            ExperimentOutput {
                name: "bootstrap_agreement",
                table: r.to_table(),
                summary: serde_json::json!({
                    "datasets": r.rows.len(),
                    "agreement_rate": r.agreement_rate(3.0),
                }),
            }
        }
    })
}

/// Runs `f(rep)` for every replication in parallel, in replication order.
pub(crate) fn par_reps<T: Send, F>(reps: usize, f: F) -> Result<Vec<T>>
where
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..reps).into_par_iter().map(f).collect()
}

/// Binomial standard error of a proportion.
pub(crate) fn proportion_se(p: f64, reps: usize) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

/// Equicorrelated rows `sqrt(rho) a_i + sqrt(1 - rho) b_ij` where `a`, `b`
/// are drawn by `draw`.
pub(crate) fn equicorrelated<F>(rng: &mut SeededRng, n: usize, p: usize, rho: f64, mut draw: F) -> Result<DataMatrix>
where
    F: FnMut(&mut SeededRng) -> f64,
{
    let a = rho.sqrt();
    let b = (1.0 - rho).sqrt();
    let mut values = Vec::with_capacity(n * p);
    for _ in 0..n {
        let common = draw(rng);
        for _ in 0..p {
            values.push(a * common + b * draw(rng));
        }
    }
    DataMatrix::from_shape_vec(n, p, values)
}

/// Bounded, mean-zero, unit-variance draw: an even mixture of
/// `U[-sqrt 3, sqrt 3]` and a Rademacher sign.
pub(crate) fn bounded_mixture(rng: &mut SeededRng) -> f64 {
    if rng.gen::<bool>() {
        3f64.sqrt() * (2.0 * rng.gen::<f64>() - 1.0)
    } else if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}
