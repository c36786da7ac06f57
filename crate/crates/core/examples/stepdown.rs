//! Stepdown multiple testing of 200 means, 10 of which are shifted.
use maxinfer::bootstrap::BootstrapConfig;
use maxinfer::data::DataMatrix;
use maxinfer::dist::sample_normal;
use maxinfer::maxstat::MaxStatVariant;
use maxinfer::rng::SeededRng;
use maxinfer::stepdown::{run_stepdown, MhtProblem};

fn main() -> maxinfer::error::Result<()> {
    let (n, p) = (250, 200);
    let mut values = sample_normal(&mut SeededRng::new(2), n * p);
    for i in 0..n {
        for j in 0..10 {
            values[i * p + j] += 0.35;
        }
    }
    let z = DataMatrix::from_shape_vec(n, p, values)?;
    let problem = MhtProblem::from_sample_means(&z, vec![0.0; p], true)?;
    let cfg = BootstrapConfig::new(2000, 6, MaxStatVariant::AbsoluteMax)?;
    let result = run_stepdown(&problem, 0.05, &cfg)?;
    println!("{} rejections in {} steps", result.rejections(), result.steps);
    for (step, c) in result.critical_values.iter().enumerate() {
        println!("step {}: critical value {c:.4}", step + 1);
    }
    let rejected: Vec<usize> = (0..p).filter(|&j| result.rejected[j]).collect();
    println!("rejected hypotheses: {rejected:?}");
    Ok(())
}
