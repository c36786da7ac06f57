//! Penalty levels for the Dantzig selector.
//!
//! * canonical: `sigma * Phi^{-1}(1 - alpha / (2p))`
//! * GAR: simulated `(1 - alpha)`-quantile of `Z_0 = sigma sqrt(n) max_j |E_n[z_ij e_i]|`
//! * multiplier bootstrap: `(1 - alpha)`-quantile of
//!   `W = sqrt(n) max_j |E_n[z_ij eps_hat_i e_i]|` with residuals from a
//!   preliminary fit.

use serde::{Deserialize, Serialize};

use super::{fit_with_kind, DantzigResult, PenaltyKind, RegressionData};
use crate::bootstrap::{multiplier_bootstrap_quantile, simulate_z0, BootstrapConfig, NoiseScale, Z0Source};
use crate::data::DataMatrix;
use crate::dist::normal_quantile;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, cross_moment, gram};
use crate::maxstat::MaxStatVariant;
use crate::quantile::{check_level, QuantileEstimate};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualMode {
    /// Residuals of the preliminary Dantzig fit.
    #[default]
    PrelimDantzig,
    /// Residuals of OLS on the regressors selected by the preliminary fit.
    PostSelectionOls,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PenaltySpec {
    pub kind: PenaltyKind,
    pub alpha: f64,
    /// Noise scale (canonical, GAR) or known upper bound on it (preliminary
    /// stage of the bootstrap rule).
    pub sigma: Option<f64>,
    /// Replications and seed for the simulated rules. The variant is ignored;
    /// these statistics are always absolute maxima.
    pub bootstrap: Option<BootstrapConfig>,
    pub residual_mode: ResidualMode,
    /// Level of the canonical penalty used by the preliminary fit; `None`
    /// means `1/n`.
    pub prelim_alpha: Option<f64>,
}

impl PenaltySpec {
    pub fn canonical(sigma: f64, alpha: f64) -> Self {
        Self {
            kind: PenaltyKind::Canonical,
            alpha,
            sigma: Some(sigma),
            bootstrap: None,
            residual_mode: ResidualMode::default(),
            prelim_alpha: None,
        }
    }

    pub fn gar(sigma: f64, alpha: f64, bootstrap: BootstrapConfig) -> Self {
        Self {
            kind: PenaltyKind::Gar,
            bootstrap: Some(bootstrap),
            ..Self::canonical(sigma, alpha)
        }
    }

    pub fn multiplier_bootstrap(
        sigma: f64,
        alpha: f64,
        bootstrap: BootstrapConfig,
        residual_mode: ResidualMode,
    ) -> Self {
        Self {
            kind: PenaltyKind::MultiplierBootstrap,
            bootstrap: Some(bootstrap),
            residual_mode,
            ..Self::canonical(sigma, alpha)
        }
    }

    pub fn with_prelim_alpha(mut self, alpha: f64) -> Self {
        self.prelim_alpha = Some(alpha);
        self
    }

    fn sigma(&self) -> Result<f64> {
        let s = self
            .sigma
            .ok_or_else(|| Error::InvalidInput("penalty rule requires sigma".into()))?;
        check_sigma(s)?;
        Ok(s)
    }

    fn bootstrap(&self) -> Result<&BootstrapConfig> {
        self.bootstrap
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("penalty rule requires a bootstrap config".into()))
    }
}

/// Details of the two-stage bootstrap rule.
#[derive(Clone, Debug, PartialEq)]
pub struct MbPenalty {
    pub quantile: QuantileEstimate,
    /// The mode whose residuals were actually used.
    pub residual_mode: ResidualMode,
    /// Set when post-selection OLS was requested but the selected design was
    /// rank deficient, so preliminary residuals were used instead.
    pub ols_fallback: bool,
    pub prelim: DantzigResult,
}

/// A resolved penalty level.
#[derive(Clone, Debug, PartialEq)]
pub struct Penalty {
    pub lambda: f64,
    pub kind: PenaltyKind,
    pub quantile: Option<QuantileEstimate>,
    pub mb: Option<MbPenalty>,
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("sigma must be finite and > 0, got {sigma}")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn abs_max_config(config: &BootstrapConfig) -> BootstrapConfig {
    BootstrapConfig {
        variant: MaxStatVariant::AbsoluteMax,
        ..config.clone()
    }
}

pub fn canonical_penalty(sigma: f64, alpha: f64, p: usize) -> Result<f64> {
    check_sigma(sigma)?;
    check_alpha(alpha)?;
    if p == 0 {
        return Err(Error::Domain("p must be at least 1".into()));
    }
    Ok(sigma * normal_quantile(1.0 - alpha / (2.0 * p as f64))?)
}

/// GAR penalty for homoscedastic noise with scale `sigma`.
pub fn gar_penalty(z: &DataMatrix, sigma: f64, alpha: f64, config: &BootstrapConfig) -> Result<QuantileEstimate> {
    check_sigma(sigma)?;
    gar_penalty_scaled(z, NoiseScale::Homoscedastic(sigma), alpha, config)
}

/// GAR penalty with a general (possibly per-observation) noise scale.
pub fn gar_penalty_scaled(
    z: &DataMatrix,
    scale: NoiseScale,
    alpha: f64,
    config: &BootstrapConfig,
) -> Result<QuantileEstimate> {
    check_alpha(alpha)?;
    simulate_z0(&Z0Source::Design { z, scale }, 1.0 - alpha, &abs_max_config(config))
}

/// Least-squares residuals of `y` on the columns `support` of the design,
/// or `None` when that design is rank deficient.
fn ols_residuals(data: &RegressionData, support: &[usize]) -> Result<Option<Vec<f64>>> {
    if support.is_empty() {
        return Ok(Some(data.response().to_vec()));
    }
    if support.len() >= data.n() {
        return Ok(None);
    }
    let zs = data.design().select_columns(support)?;
    let g = gram(zs.view());
    let l = match cholesky(g.view(), 1e-10) {
        Ok(l) => l,
        Err(_) => return Ok(None),
    };
    let rhs = cross_moment(zs.view(), data.response());
    let coef = cholesky_solve(&l, rhs.as_slice().expect("contiguous"));
    let fitted = zs.view().dot(&ndarray::Array1::from(coef));
    Ok(Some(
        data.response()
            .iter()
            .zip(fitted.iter())
            .map(|(y, f)| y - f)
            .collect(),
    ))
}

/// Two-stage multiplier-bootstrap penalty.
pub fn mb_penalty(data: &RegressionData, spec: &PenaltySpec) -> Result<MbPenalty> {
    if spec.kind != PenaltyKind::MultiplierBootstrap {
        return Err(Error::InvalidInput("mb_penalty needs a multiplier-bootstrap spec".into()));
    }
    check_alpha(spec.alpha)?;
    let sigma = spec.sigma()?;
    let config = spec.bootstrap()?;
    let prelim_alpha = spec.prelim_alpha.unwrap_or(1.0 / data.n() as f64);
    let lambda0 = canonical_penalty(sigma, prelim_alpha, data.p())?;
    let prelim = fit_with_kind(data, lambda0, PenaltyKind::Canonical)?;
    if !prelim.is_optimal() {
        return Err(Error::Solver(format!(
            "preliminary Dantzig LP ended with status {:?}",
            prelim.status
        )));
    }
    let prelim_resid = data.residuals(&prelim.beta_hat);
    let (residuals, residual_mode, ols_fallback) = match spec.residual_mode {
        ResidualMode::PrelimDantzig => (prelim_resid, ResidualMode::PrelimDantzig, false),
        ResidualMode::PostSelectionOls => match ols_residuals(data, &prelim.support())? {
            Some(r) => (r, ResidualMode::PostSelectionOls, false),
            None => {
                log::warn!("post-selection OLS is rank deficient; using preliminary residuals");
                (prelim_resid, ResidualMode::PrelimDantzig, true)
            }
        },
    };
    let weighted = data.design().scale_rows(&residuals)?;
    let quantile = multiplier_bootstrap_quantile(&weighted, 1.0 - spec.alpha, &abs_max_config(config))?;
    Ok(MbPenalty {
        quantile,
        residual_mode,
        ols_fallback,
        prelim,
    })
}

/// Resolves `spec` to a penalty level for `data`.
pub fn compute_penalty(data: &RegressionData, spec: &PenaltySpec) -> Result<Penalty> {
    check_alpha(spec.alpha)?;
    check_level(1.0 - spec.alpha)?;
    match spec.kind {
        PenaltyKind::Canonical => Ok(Penalty {
            lambda: canonical_penalty(spec.sigma()?, spec.alpha, data.p())?,
            kind: PenaltyKind::Canonical,
            quantile: None,
            mb: None,
        }),
        PenaltyKind::Gar => {
            let q = gar_penalty(data.design(), spec.sigma()?, spec.alpha, spec.bootstrap()?)?;
            Ok(Penalty {
                lambda: q.value,
                kind: PenaltyKind::Gar,
                quantile: Some(q),
                mb: None,
            })
        }
        PenaltyKind::MultiplierBootstrap => {
            let mb = mb_penalty(data, spec)?;
            Ok(Penalty {
                lambda: mb.quantile.value,
                kind: PenaltyKind::MultiplierBootstrap,
                quantile: Some(mb.quantile.clone()),
                mb: Some(mb),
            })
        }
        PenaltyKind::Explicit => Err(Error::InvalidInput(
            "explicit penalties are passed to fit_dantzig directly".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::sample_normal;
    use crate::rng::SeededRng;

    fn abs_config(reps: usize, seed: u64) -> BootstrapConfig {
        BootstrapConfig::new(reps, seed, MaxStatVariant::AbsoluteMax).unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert!((canonical_penalty(1.0, 0.05, 1).unwrap() - 1.959964).abs() < 1e-6);
        assert!((canonical_penalty(2.0, 0.05, 1).unwrap() - 3.919928).abs() < 1e-6);
        assert!((canonical_penalty(1.0, 0.05, 100).unwrap() - 3.480756).abs() < 1e-6);
        assert!(canonical_penalty(0.0, 0.05, 1).is_err());
        assert!(canonical_penalty(1.0, 1.0, 1).is_err());
        assert!(canonical_penalty(1.0, 0.05, 0).is_err());
    }

    #[test]
    fn gar_constant_column() {
        let z = DataMatrix::from_shape_vec(50, 1, vec![1.0; 50]).unwrap();
        let q = gar_penalty(&z, 1.0, 0.05, &abs_config(100_000, 3)).unwrap();
        assert!((q.value - 1.96).abs() < 0.03, "{}", q.value);
    }

    #[test]
    fn gar_duplicated_columns_match_single() {
        let mut rng = SeededRng::new(5);
        let col = sample_normal(&mut rng, 40);
        let one = DataMatrix::from_shape_vec(40, 1, col.clone()).unwrap();
        let dup: Vec<f64> = col.iter().flat_map(|v| [*v; 4]).collect();
        let four = DataMatrix::from_shape_vec(40, 4, dup).unwrap();
        let cfg = abs_config(4096, 8);
        let a = gar_penalty(&one, 1.0, 0.1, &cfg).unwrap();
        let b = gar_penalty(&four, 1.0, 0.1, &cfg).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn mb_zero_noise_gives_zero_penalty() {
        let mut rng = SeededRng::new(9);
        let raw = DataMatrix::from_shape_vec(30, 5, sample_normal(&mut rng, 150)).unwrap();
        let (data, _) = RegressionData::normalized(raw, vec![0.0; 30]).unwrap();
        for mode in [ResidualMode::PrelimDantzig, ResidualMode::PostSelectionOls] {
            let spec = PenaltySpec::multiplier_bootstrap(1.0, 0.05, abs_config(256, 1), mode);
            let mb = mb_penalty(&data, &spec).unwrap();
            assert_eq!(mb.quantile.value, 0.0);
            assert!(!mb.ols_fallback);
        }
    }

    #[test]
    fn mb_is_deterministic() {
        let mut rng = SeededRng::new(11);
        let raw = DataMatrix::from_shape_vec(40, 8, sample_normal(&mut rng, 320)).unwrap();
        let y = sample_normal(&mut rng, 40);
        let (data, _) = RegressionData::normalized(raw, y).unwrap();
        let spec = PenaltySpec::multiplier_bootstrap(1.0, 0.1, abs_config(500, 2), ResidualMode::PostSelectionOls);
        let a = compute_penalty(&data, &spec).unwrap();
        let b = compute_penalty(&data, &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn specs_require_their_fields() {
        let mut rng = SeededRng::new(1);
        let raw = DataMatrix::from_shape_vec(10, 2, sample_normal(&mut rng, 20)).unwrap();
        let (data, _) = RegressionData::normalized(raw, vec![1.0; 10]).unwrap();
        let mut spec = PenaltySpec::canonical(1.0, 0.05);
        spec.kind = PenaltyKind::Gar;
        assert!(compute_penalty(&data, &spec).is_err());
        spec.sigma = None;
        spec.kind = PenaltyKind::Canonical;
        assert!(compute_penalty(&data, &spec).is_err());
    }
}
