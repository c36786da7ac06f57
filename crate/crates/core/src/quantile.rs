//! Empirical quantiles with the left-continuous inverse convention
//! `q(level) = inf { t : F_N(t) >= level }`, i.e. the `ceil(level * N)`-th
//! order statistic. No interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn empirical_quantile(samples: &[f64], level: f64) -> Result<f64> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    quantile_sorted(&sorted, level)
}

/// Same as [`empirical_quantile`] for input already sorted ascending.
pub fn quantile_sorted(sorted: &[f64], level: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput("empirical quantile"));
    }
    check_level(level)?;
    Ok(sorted[order_index(sorted.len(), level)])
}

/// Zero-based index of the `ceil(level * n)`-th order statistic.
pub fn order_index(n: usize, level: f64) -> usize {
    let nf = n as f64;
    let mut k = ((level * nf).ceil() as usize).clamp(1, n);
    // `level * n` can round across an integer; settle on the smallest k with k/n >= level
    while k > 1 && (k - 1) as f64 / nf >= level {
        k -= 1;
    }
    while k < n && (k as f64 / nf) < level {
        k += 1;
    }
    k - 1
}

pub(crate) fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("quantile level must lie in (0,1), got {level}")))
    }
}

/// A bootstrap or Monte Carlo quantile together with its replicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileEstimate {
    pub level: f64,
    pub value: f64,
    pub replications: usize,
    /// Sorted ascending.
    #[serde(skip)]
    pub replicate_values: Vec<f64>,
}

impl QuantileEstimate {
    pub fn from_replicates(mut replicates: Vec<f64>, level: f64) -> Result<Self> {
        replicates.sort_by(|a, b| a.total_cmp(b));
        let value = quantile_sorted(&replicates, level)?;
        Ok(Self {
            level,
            value,
            replications: replicates.len(),
            replicate_values: replicates,
        })
    }

    /// Re-reads the quantile at another level from the same replicates.
    pub fn at_level(&self, level: f64) -> Result<f64> {
        quantile_sorted(&self.replicate_values, level)
    }

    /// Monte Carlo standard error of the quantile, from the spread of the
    /// order statistics one binomial standard deviation either side.
    pub fn standard_error(&self) -> f64 {
        let n = self.replicate_values.len();
        if n < 2 {
            return 0.0;
        }
        let sd = (n as f64 * self.level * (1.0 - self.level)).sqrt();
        let k = (self.level * n as f64).ceil();
        let lo = ((k - sd).floor().max(1.0) as usize).min(n) - 1;
        let hi = ((k + sd).ceil().max(1.0) as usize).min(n) - 1;
        0.5 * (self.replicate_values[hi] - self.replicate_values[lo])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            level: self.level,
            value: self.value * factor,
            replications: self.replications,
            replicate_values: self.replicate_values.iter().map(|v| v * factor).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        assert_eq!(empirical_quantile(&[3.0, 1.0, 2.0], 0.5).unwrap(), 2.0);
        let xs: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(empirical_quantile(&xs, 0.95).unwrap(), 95.0);
        for level in [0.01, 0.5, 0.99] {
            assert_eq!(empirical_quantile(&[5.0], level).unwrap(), 5.0);
        }
    }

    #[test]
    fn errors() {
        assert!(empirical_quantile(&[], 0.5).is_err());
        assert!(empirical_quantile(&[1.0], 0.0).is_err());
        assert!(empirical_quantile(&[1.0], 1.0).is_err());
    }

    #[test]
    fn exact_multiples() {
        // 0.3 * 10 = 3.0000000000000004 in floating point; still the 3rd order statistic
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(empirical_quantile(&xs, 0.3).unwrap(), 3.0);
        assert_eq!(empirical_quantile(&xs, 0.7).unwrap(), 7.0);
    }

    #[test]
    fn estimate_carries_sorted_replicates() {
        let q = QuantileEstimate::from_replicates(vec![4.0, 1.0, 3.0, 2.0], 0.5).unwrap();
        assert_eq!(q.replicate_values, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(q.value, 2.0);
        assert_eq!(q.at_level(0.75).unwrap(), 3.0);
    }
}
