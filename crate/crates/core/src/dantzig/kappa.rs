//! Sampling upper bound on the identifiability factor
//!
//! `kappa_I(beta) = inf { max_j |E_n[z_ij (z_i'delta)]| / ||delta||_I : delta in R(beta) }`
//! with `R(beta) = { delta : ||beta + delta||_1 <= ||beta||_1 }`.
//!
//! The ratio is scale invariant, so it suffices to sample the tangent cone
//! `{ delta : sum_{j in S} sgn(beta_j) delta_j + ||delta_{S^c}||_1 <= 0 }`,
//! every element of which is a positive multiple of a point of `R(beta)`.

use ndarray::Array1;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::RegressionData;
use crate::error::{check_len, Error, Result};
use crate::rng::SeededRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `||delta||_pr = sqrt(E_n[(z_i'delta)^2])`.
    Prediction,
    /// `|delta_j|`.
    Component(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub norm_kind: NormKind,
    /// Minimum sampled ratio; an upper bound on `kappa_I(beta)`. Infinite when
    /// `beta = 0`.
    pub value: f64,
    pub samples_used: usize,
}

impl KappaEstimate {
    /// Always true: sampling can only overestimate the infimum.
    pub fn is_upper_bound(&self) -> bool {
        true
    }
}

/// Draws the `k`-th cone direction. The first `|S|` directions are the
/// deterministic candidates `-sgn(beta_j) e_j`.
fn cone_direction(k: usize, support: &[usize], signs: &[f64], off: &[usize], p: usize, rng: &mut SeededRng) -> Vec<f64> {
    let mut delta = vec![0.0; p];
    if k < support.len() {
        delta[support[k]] = -signs[k];
        return delta;
    }
    let max_off = off.len().min(support.len() + 1);
    let m = rng.gen_range(0..=max_off);
    let mut off_l1 = 0.0;
    if m > 0 {
        for idx in sample(rng, off.len(), m) {
            let v: f64 = StandardNormal.sample(rng);
            delta[off[idx]] = v;
            off_l1 += v.abs();
        }
    }
    let u: Vec<f64> = (0..support.len()).map(|_| StandardNormal.sample(rng)).collect();
    let slack: f64 = Exp1.sample(rng);
    let slack = slack * rng.gen::<f64>();
    let inner: f64 = u.iter().zip(signs).map(|(a, s)| a * s).sum();
    let tau = (inner + off_l1 + slack) / support.len() as f64;
    for ((j, s), a) in support.iter().zip(signs).zip(&u) {
        delta[*j] = a - tau * s;
    }
    delta
}

/// Running minimum of the defining ratio over `n_samples` cone directions.
///
/// Sample `k` depends only on the stream state after samples `0..k`, so
/// appending samples never increases the estimate.
pub fn estimate_kappa(
    data: &RegressionData,
    beta: &[f64],
    norm: NormKind,
    n_samples: usize,
    rng: &mut SeededRng,
) -> Result<KappaEstimate> {
    let p = data.p();
    check_len("beta", p, beta.len())?;
    if n_samples == 0 {
        return Err(Error::InvalidInput("estimate_kappa needs at least one sample".into()));
    }
    if let NormKind::Component(j) = norm {
        if j >= p {
            return Err(Error::InvalidInput(format!("component {j} out of range")));
        }
    }
    let support: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0).collect();
    if support.is_empty() {
        return Ok(KappaEstimate {
            norm_kind: norm,
            value: f64::INFINITY,
            samples_used: 0,
        });
    }
    let signs: Vec<f64> = support.iter().map(|&j| beta[j].signum()).collect();
    let off: Vec<usize> = (0..p).filter(|&j| beta[j] == 0.0).collect();
    let g = data.gram();
    let mut best = f64::INFINITY;
    for k in 0..n_samples {
        let delta = cone_direction(k, &support, &signs, &off, p, rng);
        let gd = g.dot(&Array1::from(delta.clone()));
        let num = gd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let den = match norm {
            NormKind::Prediction => gd.iter().zip(&delta).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt(),
            NormKind::Component(j) => delta[j].abs(),
        };
        let scale = delta.iter().map(|v| v * v).sum::<f64>().sqrt();
        if den > 1e-12 * scale {
            best = best.min(num / den);
        }
    }
    Ok(KappaEstimate {
        norm_kind: norm,
        value: best,
        samples_used: n_samples,
    })
}
