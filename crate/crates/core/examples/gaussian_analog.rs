//! Quantiles of the Gaussian analog Z0, from a design and from a covariance.
use maxinfer::bootstrap::{simulate_z0, BootstrapConfig, NoiseScale, Z0Source};
use maxinfer::data::DataMatrix;
use maxinfer::dist::sample_uniform;
use maxinfer::maxstat::MaxStatVariant;
use maxinfer::rng::SeededRng;
use ndarray::Array2;

fn main() -> maxinfer::error::Result<()> {
    let cfg = BootstrapConfig::new(5000, 3, MaxStatVariant::SignedMax)?;

    let p = 50;
    let sigma = Array2::from_shape_fn((p, p), |(i, j)| 0.8f64.powi((i as i32 - j as i32).abs()));
    let q = simulate_z0(&Z0Source::Covariance { sigma: sigma.view(), scale: 1.0 }, 0.95, &cfg)?;
    println!("AR(1) covariance, p={p}: 95% quantile of max Z = {:.4}", q.value);

    let n = 120;
    let z = DataMatrix::from_shape_vec(n, p, sample_uniform(&mut SeededRng::new(1), n * p))?;
    let scales: Vec<f64> = (0..n).map(|i| 0.5 + i as f64 / n as f64).collect();
    let q = simulate_z0(&Z0Source::Design { z: &z, scale: NoiseScale::PerObservation(scales) }, 0.95, &cfg)?;
    println!("fixed design with heteroscedastic scale: 95% quantile = {:.4}", q.value);
    Ok(())
}
