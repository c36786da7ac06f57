//! Distributional distances between Monte Carlo samples.

use crate::error::{Error, Result};

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Exact two-sample Kolmogorov distance `sup_t |F_a(t) - F_b(t)|` between
/// the empirical cdfs (right-continuous), by a merge scan over pooled values.
pub fn ks_distance(samples_a: &[f64], samples_b: &[f64]) -> Result<f64> {
    if samples_a.is_empty() || samples_b.is_empty() {
        return Err(Error::EmptyInput("ks distance"));
    }
    let a = sorted(samples_a);
    let b = sorted(samples_b);
    Ok(ks_sorted(&a, &b))
}

pub(crate) fn ks_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    // once one sample is exhausted its cdf is 1; the other only approaches 1
    if i < a.len() {
        d = d.max(1.0 - i as f64 / na);
    }
    if j < b.len() {
        d = d.max(1.0 - j as f64 / nb);
    }
    d
}

/// Paired empirical cdf values of two samples at every pooled sorted point.
pub fn paired_cdfs(samples_a: &[f64], samples_b: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    if samples_a.is_empty() || samples_b.is_empty() {
        return Err(Error::EmptyInput("paired cdfs"));
    }
    let a = sorted(samples_a);
    let b = sorted(samples_b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        out.push((t, i as f64 / na, j as f64 / nb));
    }
    Ok(out)
}

/// Empirical Levy concentration `sup_z #{ |s - z| <= width } / N`.
///
/// An interval of length `2 * width` is slid over the sorted sample.
pub fn anticoncentration_diagnostic(samples: &[f64], width: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("anti-concentration diagnostic"));
    }
    if !(width > 0.0) {
        return Err(Error::Domain(format!("width must be positive, got {width}")));
    }
    let s = sorted(samples);
    let mut best = 0;
    let mut hi = 0;
    for lo in 0..s.len() {
        if hi < lo {
            hi = lo;
        }
        while hi < s.len() && s[hi] - s[lo] <= 2.0 * width {
            hi += 1;
        }
        best = best.max(hi - lo);
    }
    Ok(best as f64 / s.len() as f64)
}
