//! P-P comparison of T0 (t(4) errors) with its Gaussian analog.
use maxinfer::experiments::{run_ppplot, NoiseKind, PpPlotConfig};

fn main() -> maxinfer::error::Result<()> {
    for n in [50, 200, 400] {
        let d = run_ppplot(&PpPlotConfig { n, p: 100, reps: 1000, seed: 1, noise: NoiseKind::StudentT4 })?;
        println!("n = {n:>3}: KS distance {:.4}", d.ks);
    }
    Ok(())
}
