use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{bounded_mixture, equicorrelated, par_reps, proportion_se};
use crate::bootstrap::{empirical_bootstrap_quantile, multiplier_bootstrap_quantile, BootstrapConfig};
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::io::Table;
use crate::maxstat::{compute_max_stat, MaxStatVariant};
use crate::rng::{derive_seed, SeededRng};

/// Distribution of the mean-zero observations in the means experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanData {
    /// Equicorrelated even mixture of a uniform and a Rademacher sign.
    BoundedMixture,
    Gaussian,
}

impl MeanData {
    pub(crate) fn draw(&self, rng: &mut SeededRng, n: usize, p: usize, rho: f64) -> Result<DataMatrix> {
        match self {
            MeanData::BoundedMixture => equicorrelated(rng, n, p, rho, bounded_mixture),
            MeanData::Gaussian => equicorrelated(rng, n, p, rho, |r| StandardNormal.sample(r)),
        }
    }
}

fn check_common(n: usize, p: usize, rho: f64, reps: usize, bootstrap_reps: usize) -> Result<()> {
    if n < 2 || p == 0 || reps == 0 || bootstrap_reps == 0 {
        return Err(Error::InvalidInput("n >= 2 and positive p, reps, bootstrap_reps required".into()));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("rho must lie in [0, 1), got {rho}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageConfig {
    pub n: usize,
    pub p: usize,
    pub rho: f64,
    pub data: MeanData,
    pub alpha: f64,
    pub reps: usize,
    pub bootstrap_reps: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub config: CoverageConfig,
    /// Share of replications with `T_0 <= c_{W_0}(1 - alpha)`.
    pub coverage: f64,
    pub se: f64,
}

impl CoverageResult {
    /// Columns `n,p,rho,alpha,reps,bootstrap_reps,coverage,se`.
    pub fn to_table(&self) -> Table {
        let c = &self.config;
        let mut t = Table::new(["n", "p", "rho", "alpha", "reps", "bootstrap_reps", "coverage", "se"]);
        t.rows.push(vec![
            c.n.into(),
            c.p.into(),
            c.rho.into(),
            c.alpha.into(),
            c.reps.into(),
            c.bootstrap_reps.into(),
            self.coverage.into(),
            self.se.into(),
        ]);
        t
    }
}

/// Monte Carlo estimate of `Pr(T_0 <= c_{W_0}(1 - alpha))` for the signed
/// maximum of a normalized sum of mean-zero vectors.
pub fn run_coverage(config: &CoverageConfig) -> Result<CoverageResult> {
    check_common(config.n, config.p, config.rho, config.reps, config.bootstrap_reps)?;
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::Domain("alpha must lie in (0, 1)".into()));
    }
    let hits = par_reps(config.reps, |rep| {
        let rep_seed = derive_seed(config.seed, rep as u64);
        let mut rng = SeededRng::new(rep_seed);
        let x = config.data.draw(&mut rng, config.n, config.p, config.rho)?;
        let t0 = compute_max_stat(&x, &MaxStatVariant::SignedMax)?;
        let boot = BootstrapConfig::new(config.bootstrap_reps, derive_seed(rep_seed, 1), MaxStatVariant::SignedMax)?;
        let c = multiplier_bootstrap_quantile(&x.centered(), 1.0 - config.alpha, &boot)?.value;
        Ok(t0 <= c)
    })?;
    let coverage = hits.iter().filter(|h| **h).count() as f64 / config.reps as f64;
    Ok(CoverageResult {
        config: config.clone(),
        coverage,
        se: proportion_se(coverage, config.reps),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementConfig {
    pub n: usize,
    pub p: usize,
    pub rho: f64,
    pub data: MeanData,
    pub level: f64,
    pub datasets: usize,
    pub bootstrap_reps: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub empirical: f64,
    pub empirical_se: f64,
    pub multiplier: f64,
    pub multiplier_se: f64,
}

impl AgreementRow {
    /// `|q_emp - q_mb| / sqrt(se_emp^2 + se_mb^2)`.
    pub fn z_score(&self) -> f64 {
        let se = self.empirical_se.hypot(self.multiplier_se);
        let d = (self.empirical - self.multiplier).abs();
        if se > 0.0 {
            d / se
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementResult {
    pub config: AgreementConfig,
    pub rows: Vec<AgreementRow>,
}

impl AgreementResult {
    /// Share of datasets whose two quantiles differ by at most `k` combined
    /// standard errors.
    pub fn agreement_rate(&self, k: f64) -> f64 {
        self.rows.iter().filter(|r| r.z_score() <= k).count() as f64 / self.rows.len() as f64
    }

    /// Columns `dataset,q_empirical,se_empirical,q_multiplier,se_multiplier,z_score`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["dataset", "q_empirical", "se_empirical", "q_multiplier", "se_multiplier", "z_score"]);
        for (i, r) in self.rows.iter().enumerate() {
            t.rows.push(vec![
                i.into(),
                r.empirical.into(),
                r.empirical_se.into(),
                r.multiplier.into(),
                r.multiplier_se.into(),
                r.z_score().into(),
            ]);
        }
        t
    }
}

/// Compares the conditional `level`-quantiles of the Efron statistic `T_0^*`
/// and the multiplier statistic `W_0` on independent datasets.
pub fn run_bootstrap_agreement(config: &AgreementConfig) -> Result<AgreementResult> {
    check_common(config.n, config.p, config.rho, config.datasets, config.bootstrap_reps)?;
    let rows = par_reps(config.datasets, |d| {
        let seed = derive_seed(config.seed, d as u64);
        let x = config.data.draw(&mut SeededRng::new(seed), config.n, config.p, config.rho)?;
        let emp_cfg = BootstrapConfig::new(config.bootstrap_reps, derive_seed(seed, 1), MaxStatVariant::SignedMax)?;
        let mb_cfg = BootstrapConfig::new(config.bootstrap_reps, derive_seed(seed, 2), MaxStatVariant::SignedMax)?;
        let e = empirical_bootstrap_quantile(&x, config.level, &emp_cfg)?;
        let m = multiplier_bootstrap_quantile(&x.centered(), config.level, &mb_cfg)?;
        Ok(AgreementRow {
            empirical: e.value,
            empirical_se: e.standard_error(),
            multiplier: m.value,
            multiplier_se: m.standard_error(),
        })
    })?;
    Ok(AgreementResult {
        config: config.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_gaussian_coverage() {
        let cfg = CoverageConfig {
            n: 50,
            p: 1,
            rho: 0.0,
            data: MeanData::Gaussian,
            alpha: 0.1,
            reps: 400,
            bootstrap_reps: 500,
            seed: 2,
        };
        let r = run_coverage(&cfg).unwrap();
        assert!((r.coverage - 0.9).abs() < 4.0 * 0.015, "{}", r.coverage);
        assert_eq!(r, run_coverage(&cfg).unwrap());
    }

    #[test]
    fn agreement_on_small_data() {
        let cfg = AgreementConfig {
            n: 100,
            p: 10,
            rho: 0.3,
            data: MeanData::BoundedMixture,
            level: 0.95,
            datasets: 10,
            bootstrap_reps: 500,
            seed: 1,
        };
        let r = run_bootstrap_agreement(&cfg).unwrap();
        assert_eq!(r.rows.len(), 10);
        assert!(r.agreement_rate(4.0) >= 0.8);
    }
}
