use serde::{Deserialize, Serialize};

use super::{par_reps, proportion_se, NoiseKind};
use crate::bootstrap::BootstrapConfig;
use crate::data::DataMatrix;
use crate::dist::sample_uniform;
use crate::error::{Error, Result};
use crate::io::Table;
use crate::maxstat::MaxStatVariant;
use crate::rng::{derive_seed, SeededRng};
use crate::spectest::{run_spec_test, SpecTestInput, TestFamily};

/// `y_i = 1 + v_i + amplitude * sin(4 v_i) + eps_i` with `v_i ~ U[0,1]`
/// drawn once; regressors `(1, v_i)`. The null holds when `amplitude = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecSizeConfig {
    pub n: usize,
    pub family: TestFamily,
    #[serde(default)]
    pub amplitude: f64,
    pub noise: NoiseKind,
    pub alpha: f64,
    pub reps: usize,
    pub bootstrap_reps: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecSizeResult {
    pub config: SpecSizeConfig,
    pub test_functions: usize,
    pub rejection_rate: f64,
    pub se: f64,
}

impl SpecSizeResult {
    /// Columns `n,test_functions,amplitude,alpha,reps,rejection_rate,se`.
    pub fn to_table(&self) -> Table {
        let c = &self.config;
        let mut t = Table::new(["n", "test_functions", "amplitude", "alpha", "reps", "rejection_rate", "se"]);
        t.rows.push(vec![
            c.n.into(),
            self.test_functions.into(),
            c.amplitude.into(),
            c.alpha.into(),
            c.reps.into(),
            self.rejection_rate.into(),
            self.se.into(),
        ]);
        t
    }
}

pub fn run_spec_size(config: &SpecSizeConfig) -> Result<SpecSizeResult> {
    if config.n < 3 || config.reps == 0 || config.bootstrap_reps == 0 {
        return Err(Error::InvalidInput("n >= 3 and positive reps, bootstrap_reps required".into()));
    }
    let v1 = sample_uniform(&mut SeededRng::new(derive_seed(config.seed, u64::MAX)), config.n);
    let rows: Vec<Vec<f64>> = v1.iter().map(|x| vec![1.0, *x]).collect();
    let v = DataMatrix::from_rows(&rows)?;
    let p_raw = config.family.evaluate(&v)?;
    let test_functions = p_raw.ncols();
    let hits = par_reps(config.reps, |rep| {
        let seed = derive_seed(config.seed, rep as u64);
        let e = config.noise.sample(&mut SeededRng::new(seed), config.n);
        let y: Vec<f64> = v1
            .iter()
            .zip(&e)
            .map(|(x, ei)| 1.0 + x + config.amplitude * (4.0 * x).sin() + ei)
            .collect();
        let input = SpecTestInput::new(v.clone(), y, p_raw.clone())?;
        let boot = BootstrapConfig::new(config.bootstrap_reps, derive_seed(seed, 1), MaxStatVariant::AbsoluteMax)?;
        Ok(run_spec_test(&input, config.alpha, &boot)?.reject)
    })?;
    let rate = hits.iter().filter(|h| **h).count() as f64 / config.reps as f64;
    Ok(SpecSizeResult {
        config: config.clone(),
        test_functions,
        rejection_rate: rate,
        se: proportion_se(rate, config.reps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strong_alternative_is_detected() {
        let cfg = SpecSizeConfig {
            n: 150,
            family: TestFamily::Legendre { degree: 8 },
            amplitude: 2.0,
            noise: NoiseKind::Gaussian,
            alpha: 0.05,
            reps: 40,
            bootstrap_reps: 300,
            seed: 3,
        };
        let r = run_spec_size(&cfg).unwrap();
        assert!(r.rejection_rate > 0.9, "{}", r.rejection_rate);
        assert_eq!(r.test_functions, 8);
    }
}
