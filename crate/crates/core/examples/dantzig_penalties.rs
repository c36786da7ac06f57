//! Dantzig selector under the canonical, GAR and multiplier-bootstrap
//! penalties on one simulated heteroscedastic design, plus a confidence
//! rectangle from estimated identifiability factors.
use maxinfer::bootstrap::BootstrapConfig;
use maxinfer::dantzig::{
    compute_penalty, confidence_rectangle, estimate_kappa, fit_dantzig, NormKind, PenaltySpec, RegressionData,
    ResidualMode,
};
use maxinfer::experiments::{McDesign, NoiseKind};
use maxinfer::maxstat::MaxStatVariant;
use maxinfer::rng::SeededRng;

fn main() -> maxinfer::error::Result<()> {
    let design = McDesign { n: 100, p: 120, rho: 0.5, sigma0: 1.0, noise: NoiseKind::StudentT5Normalized, gamma: 1.0, reps: 1, seed: 21 };
    let sample = design.simulate(0, 5)?;
    let data = RegressionData::new(sample.z.clone(), sample.y.clone())?;
    let boot = BootstrapConfig::new(1000, 4, MaxStatVariant::AbsoluteMax)?;
    let sigma_bar = design.sigma_bar();
    let specs = [
        ("canonical", PenaltySpec::canonical(sigma_bar, 0.05)),
        ("gar", PenaltySpec::gar(sigma_bar, 0.05, boot.clone())),
        ("mb", PenaltySpec::multiplier_bootstrap(sigma_bar, 0.05, boot.clone(), ResidualMode::PostSelectionOls)),
    ];
    let mut last = None;
    for (name, spec) in specs {
        let penalty = compute_penalty(&data, &spec)?;
        let fit = fit_dantzig(&data, penalty.lambda)?;
        let delta: Vec<f64> = fit.beta_hat.iter().zip(&sample.beta).map(|(a, b)| a - b).collect();
        println!("{name:>9}: lambda {:.3}  support {:>3}  prediction error {:.4}",
            penalty.lambda, fit.support().len(), data.prediction_norm(&delta));
        last = Some(fit);
    }
    let fit = last.expect("three fits");
    let mut rng = SeededRng::new(8);
    let kappas: Vec<f64> = (0..data.p())
        .map(|j| estimate_kappa(&data, &fit.beta_hat, NormKind::Component(j), 300, &mut rng).map(|k| k.value))
        .collect::<maxinfer::error::Result<_>>()?;
    let rectangle = confidence_rectangle(&fit, &kappas, data.n())?;
    for j in (0..data.p()).filter(|&j| sample.beta[j] != 0.0) {
        let iv = &rectangle[j];
        println!("beta[{j}] = {:.3} (true {}), interval [{:.3}, {:.3}]", fit.beta_hat[j], sample.beta[j], iv.lower, iv.upper);
    }
    Ok(())
}
