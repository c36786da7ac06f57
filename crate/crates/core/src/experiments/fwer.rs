use serde::{Deserialize, Serialize};

use super::{par_reps, proportion_se, MeanData};
use crate::bootstrap::BootstrapConfig;
use crate::error::{Error, Result};
use crate::io::Table;
use crate::maxstat::MaxStatVariant;
use crate::rng::{derive_seed, SeededRng};
use crate::stepdown::{run_stepdown, MhtProblem};

/// One-sided tests of `H_j: mu_j <= 0` on sample means. The first
/// `true_nulls` coordinates have mean zero, the remaining `false_nulls` mean
/// `effect / sqrt(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FwerConfig {
    pub n: usize,
    pub true_nulls: usize,
    #[serde(default)]
    pub false_nulls: usize,
    #[serde(default)]
    pub effect: f64,
    pub rho: f64,
    #[serde(default = "gaussian")]
    pub data: MeanData,
    pub alpha: f64,
    pub reps: usize,
    pub bootstrap_reps: usize,
    pub seed: u64,
}

fn gaussian() -> MeanData {
    MeanData::Gaussian
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FwerResult {
    pub config: FwerConfig,
    /// Share of replications rejecting at least one true null.
    pub fwer: f64,
    pub se: f64,
    /// Mean share of false nulls rejected (`NaN` without false nulls).
    pub power: f64,
    pub mean_steps: f64,
}

impl FwerResult {
    /// Columns `n,true_nulls,false_nulls,effect,rho,alpha,reps,fwer,se,power,mean_steps`.
    pub fn to_table(&self) -> Table {
        let c = &self.config;
        let mut t = Table::new([
            "n", "true_nulls", "false_nulls", "effect", "rho", "alpha", "reps", "fwer", "se", "power", "mean_steps",
        ]);
        t.rows.push(vec![
            c.n.into(),
            c.true_nulls.into(),
            c.false_nulls.into(),
            c.effect.into(),
            c.rho.into(),
            c.alpha.into(),
            c.reps.into(),
            self.fwer.into(),
            self.se.into(),
            self.power.into(),
            self.mean_steps.into(),
        ]);
        t
    }
}

pub fn run_fwer(config: &FwerConfig) -> Result<FwerResult> {
    let p = config.true_nulls + config.false_nulls;
    if config.n < 2 || p == 0 || config.reps == 0 || config.bootstrap_reps == 0 {
        return Err(Error::InvalidInput("n >= 2 and positive hypotheses, reps, bootstrap_reps required".into()));
    }
    if !(0.0..1.0).contains(&config.rho) {
        return Err(Error::Domain("rho must lie in [0, 1)".into()));
    }
    let shift = config.effect / (config.n as f64).sqrt();
    let outcomes = par_reps(config.reps, |rep| {
        let seed = derive_seed(config.seed, rep as u64);
        let noise = config.data.draw(&mut SeededRng::new(seed), config.n, p, config.rho)?;
        let mut values = noise.into_inner();
        for mut row in values.rows_mut() {
            for v in row.iter_mut().skip(config.true_nulls) {
                *v += shift;
            }
        }
        let x = crate::data::DataMatrix::new(values)?;
        let problem = MhtProblem::from_sample_means(&x, vec![0.0; p], false)?;
        let boot = BootstrapConfig::new(config.bootstrap_reps, derive_seed(seed, 1), MaxStatVariant::SignedMax)?;
        let r = run_stepdown(&problem, config.alpha, &boot)?;
        let false_rejection = r.rejected[..config.true_nulls].iter().any(|v| *v);
        let true_rejections = r.rejected[config.true_nulls..].iter().filter(|v| **v).count();
        Ok((false_rejection, true_rejections, r.steps))
    })?;
    let reps = config.reps as f64;
    let fwer = outcomes.iter().filter(|o| o.0).count() as f64 / reps;
    let power = if config.false_nulls == 0 {
        f64::NAN
    } else {
        outcomes.iter().map(|o| o.1 as f64).sum::<f64>() / (reps * config.false_nulls as f64)
    };
    Ok(FwerResult {
        config: config.clone(),
        fwer,
        se: proportion_se(fwer, config.reps),
        power,
        mean_steps: outcomes.iter().map(|o| o.2 as f64).sum::<f64>() / reps,
    })
}
