//! Efron and multiplier bootstrap quantiles side by side on skewed data.
use maxinfer::bootstrap::{empirical_bootstrap_quantile, multiplier_bootstrap_quantile, BootstrapConfig};
use maxinfer::data::DataMatrix;
use maxinfer::dist::sample_chi_square;
use maxinfer::maxstat::MaxStatVariant;
use maxinfer::rng::SeededRng;

fn main() -> maxinfer::error::Result<()> {
    let (n, p) = (300, 80);
    let draws = sample_chi_square(&mut SeededRng::new(5), 3, n * p)?;
    let x = DataMatrix::from_shape_vec(n, p, draws.iter().map(|v| v - 3.0).collect())?.centered();
    let cfg = BootstrapConfig::new(2000, 9, MaxStatVariant::SignedMax)?;
    for level in [0.9, 0.95, 0.99] {
        let e = empirical_bootstrap_quantile(&x, level, &cfg)?;
        let m = multiplier_bootstrap_quantile(&x, level, &cfg)?;
        println!("level {level}: empirical {:.4} (se {:.4})  multiplier {:.4} (se {:.4})",
            e.value, e.standard_error(), m.value, m.standard_error());
    }
    Ok(())
}
