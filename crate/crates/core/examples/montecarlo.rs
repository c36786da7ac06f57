//! A small Monte Carlo run driven by the same JSON config the CLI reads.
use maxinfer::experiments::{run_experiment, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config: ExperimentConfig = serde_json::from_str(
        r#"{"kind": "coverage", "n": 200, "p": 50, "rho": 0.3, "data": "bounded_mixture",
            "alpha": 0.05, "reps": 200, "bootstrap_reps": 300, "seed": 1}"#,
    )?;
    let out = run_experiment(&config)?;
    print!("{}", out.table.to_csv_string()?);
    println!("{}", serde_json::to_string_pretty(&out.summary)?);
    Ok(())
}
