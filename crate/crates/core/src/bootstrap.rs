//! Multiplier and empirical bootstrap engines and Gaussian-analog simulation.
//!
//! Replication `b` always draws its randomness from stream `b` of the
//! configured seed. Replications are processed in fixed-size blocks (a block
//! is one dense matrix product), so results are bit-identical for any number
//! of worker threads.

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::dist::fill_normal;
use crate::error::{Error, Result};
use crate::linalg::psd_factor;
use crate::maxstat::{normalized_column_sums, MaxStatVariant};
use crate::quantile::{check_level, QuantileEstimate};
use crate::rng::SeededRng;

/// Replications per dense block.
pub const BLOCK: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapConfig {
    pub replications: usize,
    pub seed: u64,
    pub variant: MaxStatVariant,
}

impl BootstrapConfig {
    pub fn new(replications: usize, seed: u64, variant: MaxStatVariant) -> Result<Self> {
        if replications == 0 {
            return Err(Error::InvalidInput("bootstrap needs at least one replication".into()));
        }
        Ok(Self {
            replications,
            seed,
            variant,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidInput("bootstrap needs at least one replication".into()));
        }
        Ok(())
    }
}

/// The `N(0,1)` multipliers used by replication `rep`.
pub fn multiplier_draws(seed: u64, rep: u64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    fill_normal(&mut SeededRng::with_stream(seed, rep), &mut out);
    out
}

fn blocks(replications: usize) -> impl IndexedParallelIterator<Item = (usize, usize)> {
    let count = replications.div_ceil(BLOCK);
    (0..count)
        .into_par_iter()
        .map(move |b| (b * BLOCK, ((b + 1) * BLOCK).min(replications)))
}

/// `weights (len x n)` times `x (n x p)`, scaled by `1/sqrt(n)`.
fn block_sums(weights: &Array2<f64>, x: ArrayView2<'_, f64>) -> Array2<f64> {
    let sqrt_n = (x.nrows() as f64).sqrt();
    let mut s = weights.dot(&x);
    s.mapv_inplace(|v| v / sqrt_n);
    s
}

fn multiplier_block(seed: u64, start: usize, end: usize, n: usize) -> Array2<f64> {
    let mut e = Array2::zeros((end - start, n));
    for (r, mut row) in e.rows_mut().into_iter().enumerate() {
        let mut rng = SeededRng::with_stream(seed, (start + r) as u64);
        fill_normal(&mut rng, row.as_slice_mut().expect("standard layout"));
    }
    e
}

/// Multiplier-bootstrap replicates of `W_0`, in replication order.
pub fn multiplier_replicates(data: &DataMatrix, config: &BootstrapConfig) -> Result<Vec<f64>> {
    config.validate()?;
    config.variant.check_dim(data.ncols())?;
    let n = data.nrows();
    let x = data.view();
    let parts: Vec<Vec<f64>> = blocks(config.replications)
        .map(|(start, end)| {
            let e = multiplier_block(config.seed, start, end, n);
            let s = block_sums(&e, x);
            s.rows()
                .into_iter()
                .map(|row| config.variant.reduce(row.as_slice().expect("standard layout")))
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

/// Multiplier-bootstrap estimate of the `level`-quantile of `W_0` given the data.
pub fn multiplier_bootstrap_quantile(
    data: &DataMatrix,
    level: f64,
    config: &BootstrapConfig,
) -> Result<QuantileEstimate> {
    check_level(level)?;
    QuantileEstimate::from_replicates(multiplier_replicates(data, config)?, level)
}

/// All coordinate sums of a multiplier bootstrap, kept so that maxima over
/// different coordinate subsets share the same draws.
#[derive(Clone, Debug)]
pub struct MultiplierSums {
    /// `replications x p`; row `b` is `n^{-1/2} sum_i x_i e_i^{(b)}`.
    sums: Array2<f64>,
}

impl MultiplierSums {
    pub fn compute(data: &DataMatrix, replications: usize, seed: u64) -> Result<Self> {
        if replications == 0 {
            return Err(Error::InvalidInput("bootstrap needs at least one replication".into()));
        }
        let n = data.nrows();
        let x = data.view();
        let parts: Vec<Array2<f64>> = blocks(replications)
            .map(|(start, end)| block_sums(&multiplier_block(seed, start, end, n), x))
            .collect();
        let views: Vec<_> = parts.iter().map(|a| a.view()).collect();
        let sums = ndarray::concatenate(ndarray::Axis(0), &views)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(Self { sums })
    }

    pub fn replications(&self) -> usize {
        self.sums.nrows()
    }

    pub fn dim(&self) -> usize {
        self.sums.ncols()
    }

    pub fn sums(&self) -> ArrayView2<'_, f64> {
        self.sums.view()
    }

    /// Per-replication maxima over `active` (all coordinates when `None`).
    pub fn maxima(&self, variant: &MaxStatVariant, active: Option<&[usize]>) -> Vec<f64> {
        self.sums
            .rows()
            .into_iter()
            .map(|row| {
                let row = row.as_slice().expect("standard layout");
                match active {
                    Some(a) => variant.reduce_over(row, a),
                    None => variant.reduce(row),
                }
            })
            .collect()
    }

    pub fn quantile(
        &self,
        variant: &MaxStatVariant,
        active: Option<&[usize]>,
        level: f64,
    ) -> Result<QuantileEstimate> {
        check_level(level)?;
        if active.is_some_and(|a| a.is_empty()) {
            return Err(Error::EmptyInput("active coordinate set"));
        }
        QuantileEstimate::from_replicates(self.maxima(variant, active), level)
    }
}

/// Per-observation noise scale for Gaussian-analog simulation.
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseScale {
    Homoscedastic(f64),
    PerObservation(Vec<f64>),
}

/// Where the covariance of the Gaussian analog comes from.
#[derive(Clone, Debug)]
pub enum Z0Source<'a> {
    /// `Z_0 = max_j n^{-1/2} sum_i z_ij sigma_i e_i`, covariance `E_n[sigma_i^2 z_i z_i']`.
    Design { z: &'a DataMatrix, scale: NoiseScale },
    /// `Z_0 = max_j (scale * L g)_j` with `L L' = sigma`.
    Covariance { sigma: ArrayView2<'a, f64>, scale: f64 },
}

/// Simulated quantile of the Gaussian analog `Z_0`.
///
/// The design form uses the multiplier representation directly (no
/// factorization); the covariance form factors `sigma` with a pivoted
/// Cholesky and maps standard normal vectors through the factor.
pub fn simulate_z0(
    source: &Z0Source<'_>,
    level: f64,
    config: &BootstrapConfig,
) -> Result<QuantileEstimate> {
    check_level(level)?;
    config.validate()?;
    match source {
        Z0Source::Design { z, scale } => {
            let weighted = match scale {
                NoiseScale::Homoscedastic(s) => {
                    check_scale(*s)?;
                    z.scaled(*s)?
                }
                NoiseScale::PerObservation(s) => {
                    s.iter().try_for_each(|v| check_scale(*v))?;
                    z.scale_rows(s)?
                }
            };
            multiplier_bootstrap_quantile(&weighted, level, config)
        }
        Z0Source::Covariance { sigma, scale } => {
            check_scale(*scale)?;
            let factor = psd_factor(*sigma)?;
            config.variant.check_dim(factor.dim())?;
            let rank = factor.rank();
            let lt = factor.factor().t().to_owned();
            let parts: Vec<Vec<f64>> = blocks(config.replications)
                .map(|(start, end)| {
                    let mut g = Array2::zeros((end - start, rank));
                    if rank > 0 {
                        for (r, mut row) in g.rows_mut().into_iter().enumerate() {
                            let mut rng = SeededRng::with_stream(config.seed, (start + r) as u64);
                            fill_normal(&mut rng, row.as_slice_mut().expect("standard layout"));
                        }
                    }
                    let mut y = g.dot(&lt);
                    y.mapv_inplace(|v| v * scale);
                    y.rows()
                        .into_iter()
                        .map(|row| config.variant.reduce(row.as_slice().expect("standard layout")))
                        .collect()
                })
                .collect();
            QuantileEstimate::from_replicates(parts.concat(), level)
        }
    }
}

fn check_scale(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("noise scale must be finite and >= 0, got {s}")))
    }
}

fn resample_counts(rng: &mut SeededRng, n: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|c| *c = 0.0);
    for _ in 0..n {
        out[rng.gen_range(0..n)] += 1.0;
    }
}

/// One draw of Efron's bootstrap statistic
/// `T_0^* = max_j n^{-1/2} sum_i (x*_ij - E_n[x_ij])`.
///
/// Resampled rows are represented by their multiplicities, so the statistic
/// is a weighted sum of the centered original rows.
pub fn empirical_bootstrap_stat(
    data: &DataMatrix,
    rng: &mut SeededRng,
    variant: &MaxStatVariant,
) -> Result<f64> {
    variant.check_dim(data.ncols())?;
    let n = data.nrows();
    let mut counts = vec![0.0; n];
    resample_counts(rng, n, &mut counts);
    let centered = data.centered();
    Ok(variant.reduce(&normalized_column_sums(centered.view(), Some(&counts))))
}

/// Efron-bootstrap replicates of `T_0^*`; replication `b` uses stream `b`.
pub fn empirical_replicates(data: &DataMatrix, config: &BootstrapConfig) -> Result<Vec<f64>> {
    config.validate()?;
    config.variant.check_dim(data.ncols())?;
    let n = data.nrows();
    let centered = data.centered();
    let x = centered.view();
    let parts: Vec<Vec<f64>> = blocks(config.replications)
        .map(|(start, end)| {
            let mut w = Array2::zeros((end - start, n));
            for (r, mut row) in w.rows_mut().into_iter().enumerate() {
                let mut rng = SeededRng::with_stream(config.seed, (start + r) as u64);
                resample_counts(&mut rng, n, row.as_slice_mut().expect("standard layout"));
            }
            let s = block_sums(&w, x);
            s.rows()
                .into_iter()
                .map(|row| config.variant.reduce(row.as_slice().expect("standard layout")))
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

pub fn empirical_bootstrap_quantile(
    data: &DataMatrix,
    level: f64,
    config: &BootstrapConfig,
) -> Result<QuantileEstimate> {
    check_level(level)?;
    QuantileEstimate::from_replicates(empirical_replicates(data, config)?, level)
}
