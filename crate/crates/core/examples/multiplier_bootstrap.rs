//! Multiplier-bootstrap critical value for the max of 500 sample means,
//! compared with the Bonferroni value that ignores correlation.
use maxinfer::bootstrap::{multiplier_bootstrap_quantile, BootstrapConfig};
use maxinfer::data::DataMatrix;
use maxinfer::dist::{normal_quantile, sample_normal};
use maxinfer::maxstat::{compute_max_stat, MaxStatVariant};
use maxinfer::rng::SeededRng;

fn main() -> maxinfer::error::Result<()> {
    let (n, p, rho) = (200, 500, 0.6f64);
    let mut rng = SeededRng::new(11);
    let common = sample_normal(&mut rng, n);
    let idio = sample_normal(&mut rng, n * p);
    let values: Vec<f64> = (0..n * p)
        .map(|k| rho.sqrt() * common[k / p] + (1.0 - rho).sqrt() * idio[k])
        .collect();
    let x = DataMatrix::from_shape_vec(n, p, values)?;

    let variant = MaxStatVariant::AbsoluteMax;
    let cfg = BootstrapConfig::new(2000, 7, variant.clone())?;
    let q = multiplier_bootstrap_quantile(&x.centered(), 0.95, &cfg)?;
    let t0 = compute_max_stat(&x, &variant)?;
    println!("T0 = {t0:.4}");
    println!("bootstrap 95% critical value = {:.4} (MC se {:.4})", q.value, q.standard_error());
    println!("Bonferroni critical value    = {:.4}", normal_quantile(1.0 - 0.05 / (2.0 * p as f64))?);
    println!("reject joint null: {}", t0 > q.value);
    Ok(())
}
