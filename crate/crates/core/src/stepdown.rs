//! Stepdown multiple testing of `H_j: beta_j <= beta0_j` with
//! multiplier-bootstrap critical values.
//!
//! With `t_j = sqrt(n)(beta_hat_j - beta0_j)`, step `l` rejects every `j` in
//! the surviving set `w(l)` with `t_j > c_{1-alpha, w(l)}`, the conditional
//! `(1 - alpha)`-quantile of `max_{j in w(l)} n^{-1/2} sum_i x_hat_ij e_i`.
//! The multiplier draws are generated once and shared by all steps, so the
//! critical values are exactly nonincreasing.

use serde::{Deserialize, Serialize};

use crate::bootstrap::{BootstrapConfig, MultiplierSums};
use crate::data::DataMatrix;
use crate::error::{check_len, Error, Result};
use crate::maxstat::MaxStatVariant;

#[derive(Clone, Debug)]
pub struct MhtProblem {
    pub beta_hat: Vec<f64>,
    pub beta_null: Vec<f64>,
    /// Per-observation influence estimates `x_hat_i` (`n x p`).
    pub influence: DataMatrix,
    /// Tests `beta_j = beta0_j` through `|t_j|` and absolute maxima.
    pub two_sided: bool,
}

impl MhtProblem {
    pub fn new(beta_hat: Vec<f64>, beta_null: Vec<f64>, influence: DataMatrix, two_sided: bool) -> Result<Self> {
        let p = influence.ncols();
        check_len("beta_hat", p, beta_hat.len())?;
        check_len("beta_null", p, beta_null.len())?;
        if beta_hat.iter().chain(&beta_null).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("estimates and null values must be finite".into()));
        }
        Ok(Self {
            beta_hat,
            beta_null,
            influence,
            two_sided,
        })
    }

    /// Means model: `beta_hat_j = E_n[z_ij]` with influence `z_ij - E_n[z_ij]`.
    pub fn from_sample_means(z: &DataMatrix, beta_null: Vec<f64>, two_sided: bool) -> Result<Self> {
        Self::new(z.column_means(), beta_null, z.centered(), two_sided)
    }

    pub fn n(&self) -> usize {
        self.influence.nrows()
    }

    pub fn p(&self) -> usize {
        self.influence.ncols()
    }

    pub fn t_stats(&self) -> Vec<f64> {
        let sqrt_n = (self.n() as f64).sqrt();
        self.beta_hat
            .iter()
            .zip(&self.beta_null)
            .map(|(b, b0)| {
                let t = sqrt_n * (b - b0);
                if self.two_sided {
                    t.abs()
                } else {
                    t
                }
            })
            .collect()
    }

    fn variant(&self) -> MaxStatVariant {
        if self.two_sided {
            MaxStatVariant::AbsoluteMax
        } else {
            MaxStatVariant::SignedMax
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepdownResult {
    pub rejected: Vec<bool>,
    /// 1-based step at which each hypothesis was rejected.
    pub rejection_step: Vec<Option<usize>>,
    pub critical_values: Vec<f64>,
    pub steps: usize,
    pub t_stats: Vec<f64>,
}

impl StepdownResult {
    pub fn rejections(&self) -> usize {
        self.rejected.iter().filter(|r| **r).count()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// `c_{1-alpha, w}` for a single active set, with the signed maximum (the
/// variant in `config` is ignored).
pub fn stepdown_critical_value(
    influence: &DataMatrix,
    active: &[usize],
    alpha: f64,
    config: &BootstrapConfig,
) -> Result<f64> {
    check_alpha(alpha)?;
    if active.is_empty() {
        return Err(Error::EmptyInput("active coordinate set"));
    }
    if let Some(&j) = active.iter().find(|&&j| j >= influence.ncols()) {
        return Err(Error::InvalidInput(format!("active index {j} out of range")));
    }
    let sums = MultiplierSums::compute(influence, config.replications, config.seed)?;
    Ok(sums.quantile(&MaxStatVariant::SignedMax, Some(active), 1.0 - alpha)?.value)
}

/// Runs the stepdown procedure. Only `replications` and `seed` of `config`
/// are used.
pub fn run_stepdown(problem: &MhtProblem, alpha: f64, config: &BootstrapConfig) -> Result<StepdownResult> {
    check_alpha(alpha)?;
    let sums = MultiplierSums::compute(&problem.influence, config.replications, config.seed)?;
    let variant = problem.variant();
    let t = problem.t_stats();
    let p = problem.p();
    let mut rejection_step = vec![None; p];
    let mut critical_values = Vec::new();
    let mut active: Vec<usize> = (0..p).collect();
    while !active.is_empty() {
        let step = critical_values.len() + 1;
        let c = sums.quantile(&variant, Some(&active), 1.0 - alpha)?.value;
        critical_values.push(c);
        let (rejected_now, kept): (Vec<usize>, Vec<usize>) = active.iter().partition(|&&j| t[j] > c);
        if rejected_now.is_empty() {
            break;
        }
        for j in rejected_now {
            rejection_step[j] = Some(step);
        }
        active = kept;
    }
    Ok(StepdownResult {
        rejected: rejection_step.iter().map(Option::is_some).collect(),
        rejection_step,
        steps: critical_values.len(),
        critical_values,
        t_stats: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::sample_normal;
    use crate::rng::SeededRng;

    fn config(reps: usize) -> BootstrapConfig {
        BootstrapConfig::new(reps, 7, MaxStatVariant::SignedMax).unwrap()
    }

    fn noise(n: usize, p: usize, seed: u64) -> DataMatrix {
        DataMatrix::from_shape_vec(n, p, sample_normal(&mut SeededRng::new(seed), n * p)).unwrap()
    }

    #[test]
    fn constant_column_critical_value() {
        let c = 2.5;
        let x = DataMatrix::from_shape_vec(30, 1, vec![c; 30]).unwrap();
        let v = stepdown_critical_value(&x, &[0], 0.05, &config(100_000)).unwrap();
        assert!((v - 1.645 * c).abs() < 0.03 * c, "{v}");
    }

    #[test]
    fn subset_critical_values_are_ordered() {
        let x = noise(50, 6, 1);
        let cfg = config(2000);
        let small = stepdown_critical_value(&x, &[1, 4], 0.1, &cfg).unwrap();
        let big = stepdown_critical_value(&x, &[0, 1, 3, 4], 0.1, &cfg).unwrap();
        assert!(small <= big);
        assert!(stepdown_critical_value(&x, &[], 0.1, &cfg).is_err());
    }

    #[test]
    fn no_signal_stops_after_one_step() {
        let x = noise(40, 5, 2);
        let problem = MhtProblem::new(vec![0.0; 5], vec![0.0; 5], x, false).unwrap();
        let r = run_stepdown(&problem, 0.05, &config(1000)).unwrap();
        assert_eq!(r.steps, 1);
        assert_eq!(r.rejections(), 0);
    }

    #[test]
    fn dominant_coordinate_rejected_first() {
        let x = noise(40, 5, 3);
        let mut beta_hat = vec![0.0; 5];
        beta_hat[2] = 100.0;
        let problem = MhtProblem::new(beta_hat, vec![0.0; 5], x, false).unwrap();
        let r = run_stepdown(&problem, 0.05, &config(1000)).unwrap();
        assert_eq!(r.rejection_step[2], Some(1));
        assert_eq!(r.rejections(), 1);
        assert_eq!(r.steps, 2);
        assert!(r.critical_values[1] <= r.critical_values[0]);
    }

    #[test]
    fn two_sided_uses_absolute_values() {
        let x = noise(40, 3, 4);
        let problem = MhtProblem::new(vec![-5.0, 0.0, 0.0], vec![0.0; 3], x, true).unwrap();
        let r = run_stepdown(&problem, 0.05, &config(1000)).unwrap();
        assert!(r.rejected[0]);
        assert!(r.t_stats[0] > 0.0);
    }

    #[test]
    fn sample_means_constructor() {
        let z = DataMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 2.0]]).unwrap();
        let problem = MhtProblem::from_sample_means(&z, vec![0.0, 0.0], false).unwrap();
        assert_eq!(problem.beta_hat, vec![2.0, 2.0]);
        assert_eq!(problem.influence.column(1).to_vec(), vec![0.0, 0.0]);
    }
}
