use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::NoiseKind;
use crate::bootstrap::{multiplier_replicates, BootstrapConfig, BLOCK};
use crate::data::DataMatrix;
use crate::diagnostics::{ks_distance, paired_cdfs};
use crate::dist::sample_uniform;
use crate::error::{Error, Result};
use crate::io::Table;
use crate::maxstat::MaxStatVariant;
use crate::rng::{derive_seed, SeededRng};

/// `x_ij = z_ij eps_i` with `z` drawn once from `U[0,1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PpPlotConfig {
    pub n: usize,
    pub p: usize,
    pub reps: usize,
    pub seed: u64,
    pub noise: NoiseKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PpPlotData {
    /// `(t_k, F_T0(t_k), F_Z0(t_k))` over the pooled sorted draws.
    pub points: Vec<(f64, f64, f64)>,
    pub ks: f64,
    pub t0: Vec<f64>,
    pub z0: Vec<f64>,
}

impl PpPlotData {
    /// Columns `t,cdf_t0,cdf_z0`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["t", "cdf_t0", "cdf_z0"]);
        t.rows = self
            .points
            .iter()
            .map(|(x, a, b)| vec![(*x).into(), (*a).into(), (*b).into()])
            .collect();
        t
    }
}

/// Draws of `T_0 = max_j n^{-1/2} sum_i z_ij eps_i` under fresh errors,
/// replication `r` using stream `r` of `seed`.
pub(crate) fn simulate_t0(z: &DataMatrix, noise: NoiseKind, reps: usize, seed: u64) -> Vec<f64> {
    let n = z.nrows();
    let sqrt_n = (n as f64).sqrt();
    let blocks = reps.div_ceil(BLOCK);
    let parts: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let (start, end) = (b * BLOCK, ((b + 1) * BLOCK).min(reps));
            let mut e = Array2::zeros((end - start, n));
            for (r, mut row) in e.rows_mut().into_iter().enumerate() {
                let mut rng = SeededRng::with_stream(seed, (start + r) as u64);
                row.assign(&ndarray::Array1::from(noise.sample(&mut rng, n)));
            }
            let s = e.dot(&z.view());
            s.rows()
                .into_iter()
                .map(|row| row.iter().fold(f64::NEG_INFINITY, |m, v| m.max(v / sqrt_n)))
                .collect()
        })
        .collect();
    parts.concat()
}

/// Simulates `T_0` and its Gaussian analog `Z_0` (same `z`, Gaussian
/// multipliers scaled by the noise standard deviation) and pairs their
/// empirical CDFs.
pub fn run_ppplot(config: &PpPlotConfig) -> Result<PpPlotData> {
    if config.reps < 100 {
        return Err(Error::InvalidInput("P-P data needs at least 100 replications".into()));
    }
    if config.n == 0 || config.p == 0 {
        return Err(Error::InvalidInput("n and p must be positive".into()));
    }
    let mut rng = SeededRng::new(derive_seed(config.seed, 0));
    let z = DataMatrix::from_shape_vec(config.n, config.p, sample_uniform(&mut rng, config.n * config.p))?;
    let t0 = simulate_t0(&z, config.noise, config.reps, derive_seed(config.seed, 1));
    let boot = BootstrapConfig::new(config.reps, derive_seed(config.seed, 2), MaxStatVariant::SignedMax)?;
    let z0 = multiplier_replicates(&z.scaled(config.noise.sd())?, &boot)?;
    Ok(PpPlotData {
        points: paired_cdfs(&t0, &z0)?,
        ks: ks_distance(&t0, &z0)?,
        t0,
        z0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_errors_match_analog() {
        let cfg = PpPlotConfig {
            n: 50,
            p: 20,
            reps: 2000,
            seed: 5,
            noise: NoiseKind::Gaussian,
        };
        let d = run_ppplot(&cfg).unwrap();
        // two-sample 95% KS critical value is 1.358 sqrt(2 / reps)
        assert!(d.ks <= 2.0 * 1.358 * (2.0 / 2000.0f64).sqrt(), "{}", d.ks);
        assert_eq!(run_ppplot(&cfg).unwrap().points, d.points);
        let mut prev = (0.0, 0.0);
        for (_, a, b) in &d.points {
            assert!(*a >= prev.0 && *b >= prev.1 && *a <= 1.0 && *b <= 1.0);
            prev = (*a, *b);
        }
    }
}
