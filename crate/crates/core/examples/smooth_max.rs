//! The smooth max sits between max(z) and max(z) + ln(p)/beta.
use maxinfer::maxstat::smooth_max;

fn main() -> maxinfer::error::Result<()> {
    let z = [0.3, -1.2, 2.5, 2.4, 0.0];
    let max = 2.5;
    println!("{:>8} {:>10} {:>10}", "beta", "F_beta", "bound");
    for beta in [0.5, 1.0, 4.0, 16.0, 64.0] {
        let f = smooth_max(&z, beta)?;
        println!("{beta:>8} {f:>10.5} {:>10.5}", max + (z.len() as f64).ln() / beta);
    }
    Ok(())
}
