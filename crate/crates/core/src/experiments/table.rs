use serde::{Deserialize, Serialize};

use super::{par_reps, McDesign};
use crate::bootstrap::{BootstrapConfig, NoiseScale};
use crate::dantzig::{
    canonical_penalty, fit_dantzig, gar_penalty_scaled, mb_penalty, PenaltyKind, PenaltySpec, RegressionData, ResidualMode,
};
use crate::error::{Error, Result};
use crate::io::Table;
use crate::maxstat::MaxStatVariant;
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DantzigTableConfig {
    pub design: McDesign,
    /// Number of unit coefficients in the true `beta`.
    pub sparsity: usize,
    pub alpha: f64,
    pub bootstrap_reps: usize,
    pub penalties: Vec<PenaltyKind>,
    /// Residuals for the bootstrap rule; post-selection OLS by default.
    #[serde(default = "default_mode")]
    pub residual_mode: ResidualMode,
}

fn default_mode() -> ResidualMode {
    ResidualMode::PostSelectionOls
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyRow {
    pub penalty: PenaltyKind,
    /// Mean of `||beta_hat - beta||_pr` over replications with an optimal fit.
    pub mean_error: f64,
    pub sd_error: f64,
    pub mean_lambda: f64,
    pub completed: usize,
    pub lp_failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DantzigTable {
    pub design: McDesign,
    pub rows: Vec<PenaltyRow>,
}

impl DantzigTable {
    pub fn row(&self, kind: PenaltyKind) -> Option<&PenaltyRow> {
        self.rows.iter().find(|r| r.penalty == kind)
    }

    /// Columns
    /// `noise,gamma,sigma0,rho,n,p,reps,penalty,mean_error,sd_error,mean_lambda,completed,lp_failures`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "noise", "gamma", "sigma0", "rho", "n", "p", "reps", "penalty", "mean_error", "sd_error",
            "mean_lambda", "completed", "lp_failures",
        ]);
        let d = &self.design;
        for r in &self.rows {
            let name = serde_json::to_value(r.penalty).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            t.rows.push(vec![
                d.noise.name().into(),
                d.gamma.into(),
                d.sigma0.into(),
                d.rho.into(),
                d.n.into(),
                d.p.into(),
                d.reps.into(),
                name.into(),
                r.mean_error.into(),
                r.sd_error.into(),
                r.mean_lambda.into(),
                r.completed.into(),
                r.lp_failures.into(),
            ]);
        }
        t
    }
}

/// `(lambda, error)` per penalty, `None` on a failed LP.
type RepOutcome = Vec<Option<(f64, f64)>>;

fn one_rep(config: &DantzigTableConfig, rep: usize) -> Result<RepOutcome> {
    let d = &config.design;
    let sample = d.simulate(rep, config.sparsity)?;
    let data = RegressionData::new(sample.z, sample.y)?;
    let rep_seed = derive_seed(derive_seed(d.seed, rep as u64), 1);
    let boot = |k: u64| BootstrapConfig::new(config.bootstrap_reps, derive_seed(rep_seed, k), MaxStatVariant::AbsoluteMax);
    let sigma_bar = d.sigma_bar();
    let mut out = Vec::with_capacity(config.penalties.len());
    for kind in &config.penalties {
        let lambda = match kind {
            PenaltyKind::Canonical => canonical_penalty(sigma_bar, config.alpha, d.p)?,
            PenaltyKind::Gar => {
                let scale = if d.gamma == 0.0 {
                    NoiseScale::Homoscedastic(d.sigma0)
                } else {
                    NoiseScale::PerObservation(sample.noise_scale.clone())
                };
                gar_penalty_scaled(data.design(), scale, config.alpha, &boot(1)?)?.value
            }
            PenaltyKind::MultiplierBootstrap => {
                let spec = PenaltySpec::multiplier_bootstrap(sigma_bar, config.alpha, boot(2)?, config.residual_mode)
                    .with_prelim_alpha(config.alpha);
                match mb_penalty(&data, &spec) {
                    Ok(mb) => mb.quantile.value,
                    Err(Error::Solver(_)) => {
                        out.push(None);
                        continue;
                    }
                    Err(e) => return Err(e),
                }
            }
            PenaltyKind::Explicit => {
                return Err(Error::InvalidInput("tables compare data-driven penalty rules only".into()))
            }
        };
        let fit = fit_dantzig(&data, lambda)?;
        if fit.is_optimal() {
            let diff: Vec<f64> = fit.beta_hat.iter().zip(&sample.beta).map(|(a, b)| a - b).collect();
            out.push(Some((lambda, data.prediction_norm(&diff))));
        } else {
            out.push(None);
        }
    }
    Ok(out)
}

/// Mean prediction error of the Dantzig selector under each penalty rule.
///
/// The canonical rule uses `sigma_bar = sigma0 (1 + 1{gamma != 0})`, the GAR
/// rule the true per-observation noise scale, and the bootstrap rule a
/// preliminary fit at the canonical level followed by `residual_mode`.
pub fn run_dantzig_table(config: &DantzigTableConfig) -> Result<DantzigTable> {
    config.design.validate()?;
    if config.penalties.is_empty() {
        return Err(Error::InvalidInput("no penalty rules requested".into()));
    }
    let outcomes = par_reps(config.design.reps, |rep| one_rep(config, rep))?;
    let rows = config
        .penalties
        .iter()
        .enumerate()
        .map(|(k, kind)| {
            let ok: Vec<(f64, f64)> = outcomes.iter().filter_map(|o| o[k]).collect();
            let m = ok.len() as f64;
            let mean_error = ok.iter().map(|(_, e)| e).sum::<f64>() / m;
            let mean_lambda = ok.iter().map(|(l, _)| l).sum::<f64>() / m;
            let var = ok.iter().map(|(_, e)| (e - mean_error).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
            PenaltyRow {
                penalty: *kind,
                mean_error,
                sd_error: var.sqrt(),
                mean_lambda,
                completed: ok.len(),
                lp_failures: outcomes.len() - ok.len(),
            }
        })
        .collect();
    Ok(DantzigTable {
        design: config.design.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::NoiseKind;

    #[test]
    fn small_table_is_deterministic_and_ordered() {
        let cfg = DantzigTableConfig {
            design: McDesign {
                n: 40,
                p: 30,
                rho: 0.5,
                sigma0: 1.0,
                noise: NoiseKind::StudentT5Normalized,
                gamma: 1.0,
                reps: 12,
                seed: 4,
            },
            sparsity: 3,
            alpha: 0.05,
            bootstrap_reps: 200,
            penalties: vec![PenaltyKind::Canonical, PenaltyKind::Gar, PenaltyKind::MultiplierBootstrap],
            residual_mode: ResidualMode::PostSelectionOls,
        };
        let a = run_dantzig_table(&cfg).unwrap();
        assert_eq!(a, run_dantzig_table(&cfg).unwrap());
        assert!(a.rows.iter().all(|r| r.lp_failures == 0 && r.mean_error.is_finite()));
        let canon = a.row(PenaltyKind::Canonical).unwrap();
        let gar = a.row(PenaltyKind::Gar).unwrap();
        assert!(gar.mean_lambda < canon.mean_lambda);
        assert_eq!(a.to_table().rows.len(), 3);
    }
}
