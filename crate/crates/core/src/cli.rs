//! The `maxinfer` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 solver failure. Every command that writes an output directory also
//! writes the resolved configuration as `config.json`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bootstrap::{
    empirical_bootstrap_quantile, multiplier_bootstrap_quantile, simulate_z0, BootstrapConfig, Z0Source,
};
use crate::dantzig::{
    compute_penalty, fit_dantzig, PenaltyKind, PenaltySpec, RegressionData, ResidualMode,
};
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::experiments::{run_experiment, run_ppplot, ExperimentConfig, NoiseKind, PpPlotConfig};
use crate::io::{emit_csv, read_matrix, split_first_column, write_atomic, write_json, Cell, Table};
use crate::maxstat::MaxStatVariant;
use crate::spectest::{run_spec_test, SpecTestInput, TestFamily};
use crate::stepdown::{run_stepdown, MhtProblem};

#[derive(Parser, Debug)]
#[command(name = "maxinfer", version, about = "Inference for maxima of high-dimensional sums")]
pub struct Cli {
    /// Worker threads (falls back to MAXINFER_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bootstrap quantile of a max statistic of column sums.
    Quantile(QuantileArgs),
    /// Dantzig selector fit with a chosen penalty rule.
    Dantzig(DantzigArgs),
    /// Stepdown multiple testing.
    Stepdown(StepdownArgs),
    /// Adaptive specification test of a linear mean model.
    Spectest(SpectestArgs),
    /// P-P data comparing T_0 with its Gaussian analog.
    Ppplot(PpplotArgs),
    /// Run a Monte Carlo experiment from a JSON config.
    Montecarlo(MontecarloArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct QuantileArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// The first CSV row is a header.
    #[arg(long)]
    pub header: bool,
    /// Quantile level in (0, 1).
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = VariantArg::Signed)]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Multiplier)]
    pub method: MethodArg,
    /// Remove column means before the multiplier or Gaussian simulation.
    #[arg(long)]
    pub center: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Signed,
    Absolute,
}

impl VariantArg {
    fn variant(self) -> MaxStatVariant {
        match self {
            VariantArg::Signed => MaxStatVariant::SignedMax,
            VariantArg::Absolute => MaxStatVariant::AbsoluteMax,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    /// Gaussian multipliers on the rows.
    Multiplier,
    /// Efron resampling of rows (always centered).
    Empirical,
    /// Gaussian analog with covariance E_n[x x'].
    Gaussian,
}

#[derive(Args, Debug, Serialize)]
pub struct DantzigArgs {
    /// CSV with y in the first column and the design after it.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub header: bool,
    /// Rescale design columns to unit second moment instead of requiring it.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, value_enum, default_value_t = PenaltyArg::Canonical)]
    pub penalty: PenaltyArg,
    /// Penalty level for `--penalty explicit`.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Noise scale, or its known upper bound for the bootstrap rule.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ResidualArg::Prelim)]
    pub residual_mode: ResidualArg,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyArg {
    Canonical,
    Gar,
    Mb,
    Explicit,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualArg {
    Prelim,
    Ols,
}

#[derive(Args, Debug, Serialize)]
pub struct StepdownArgs {
    /// CSV of per-observation influence estimates (n x p).
    #[arg(long)]
    pub influence: PathBuf,
    /// CSV with one row per hypothesis: beta_hat, beta_null.
    #[arg(long)]
    pub estimates: PathBuf,
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub two_sided: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectestArgs {
    /// CSV with y in the first column and the regressors v after it.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub header: bool,
    /// CSV of raw test-function values (n x p); overrides `--family`.
    #[arg(long)]
    pub test_functions: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FamilyArg::Chebyshev)]
    pub family: FamilyArg,
    /// Degree (polynomial families) or number of bumps (B-spline).
    #[arg(long, default_value_t = 10)]
    pub size: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyArg {
    Legendre,
    Chebyshev,
    Bspline,
}

#[derive(Args, Debug, Serialize)]
pub struct PpplotArgs {
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub p: usize,
    #[arg(long, default_value_t = 5000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = NoiseArg::StudentT4)]
    pub noise: NoiseArg,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseArg {
    Gaussian,
    StudentT5Normalized,
    StudentT4,
}

impl From<NoiseArg> for NoiseKind {
    fn from(n: NoiseArg) -> Self {
        match n {
            NoiseArg::Gaussian => NoiseKind::Gaussian,
            NoiseArg::StudentT5Normalized => NoiseKind::StudentT5Normalized,
            NoiseArg::StudentT4 => NoiseKind::StudentT4,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct MontecarloArgs {
    /// JSON experiment config with a `kind` field.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Exit status of a failed command.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Solver(_)) { 3 } else { 2 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn thread_count(flag: Option<usize>) -> std::result::Result<usize, Failure> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("MAXINFER_THREADS") {
        Ok(v) => v.trim().parse().map_err(|_| Failure {
            code: 1,
            message: format!("MAXINFER_THREADS must be a non-negative integer, got {v:?}"),
        }),
        Err(_) => Ok(0),
    }
}

pub fn run(cli: Cli) -> std::result::Result<(), Failure> {
    let threads = thread_count(cli.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure {
            code: 2,
            message: e.to_string(),
        })?;
    pool.install(|| match &cli.command {
        Command::Quantile(a) => quantile(a),
        Command::Dantzig(a) => dantzig(a),
        Command::Stepdown(a) => stepdown(a),
        Command::Spectest(a) => spectest(a),
        Command::Ppplot(a) => ppplot(a),
        Command::Montecarlo(a) => montecarlo(a),
    })
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_config<T: Serialize>(out: &Path, command: &str, args: &T) -> Result<()> {
    write_json(&json!({ "command": command, "args": args }), &out.join("config.json"))
}

fn bootstrap(reps: usize, seed: u64, variant: MaxStatVariant) -> Result<BootstrapConfig> {
    BootstrapConfig::new(reps, seed, variant)
}

fn quantile(a: &QuantileArgs) -> std::result::Result<(), Failure> {
    let data = read_matrix(&a.input, a.header)?;
    let data = if a.center { data.centered() } else { data };
    let cfg = bootstrap(a.reps, a.seed, a.variant.variant())?;
    let q = match a.method {
        MethodArg::Multiplier => multiplier_bootstrap_quantile(&data, a.alpha, &cfg)?,
        MethodArg::Empirical => empirical_bootstrap_quantile(&data, a.alpha, &cfg)?,
        MethodArg::Gaussian => {
            let sigma = crate::linalg::gram(data.view());
            simulate_z0(&Z0Source::Covariance { sigma: sigma.view(), scale: 1.0 }, a.alpha, &cfg)?
        }
    };
    let summary = json!({
        "level": q.level,
        "value": q.value,
        "replications": q.replications,
        "standard_error": q.standard_error(),
    });
    if let Some(out) = &a.out {
        write_json(&summary, &out.join("quantile.json"))?;
        write_config(out, "quantile", a)?;
    }
    print_json(&summary)?;
    Ok(())
}

fn load_regression(path: &Path, header: bool, normalize: bool) -> Result<RegressionData> {
    let (y, z) = split_first_column(&read_matrix(path, header)?)?;
    if normalize {
        Ok(RegressionData::normalized(z, y)?.0)
    } else {
        RegressionData::new(z, y)
    }
}

fn dantzig(a: &DantzigArgs) -> std::result::Result<(), Failure> {
    let data = load_regression(&a.input, a.header, a.normalize)?;
    let boot = || bootstrap(a.reps, a.seed, MaxStatVariant::AbsoluteMax);
    let residual_mode = match a.residual_mode {
        ResidualArg::Prelim => ResidualMode::PrelimDantzig,
        ResidualArg::Ols => ResidualMode::PostSelectionOls,
    };
    let need_sigma = || {
        a.sigma
            .ok_or_else(|| Error::InvalidInput("this penalty rule needs --sigma".into()))
    };
    let (lambda, kind) = match a.penalty {
        PenaltyArg::Explicit => (
            a.lambda
                .ok_or_else(|| Error::InvalidInput("--penalty explicit needs --lambda".into()))?,
            PenaltyKind::Explicit,
        ),
        rule => {
            let spec = match rule {
                PenaltyArg::Canonical => PenaltySpec::canonical(need_sigma()?, a.alpha),
                PenaltyArg::Gar => PenaltySpec::gar(need_sigma()?, a.alpha, boot()?),
                _ => PenaltySpec::multiplier_bootstrap(need_sigma()?, a.alpha, boot()?, residual_mode),
            };
            let p = compute_penalty(&data, &spec)?;
            (p.lambda, p.kind)
        }
    };
    let mut fit = fit_dantzig(&data, lambda)?;
    fit.penalty_kind = kind;
    if let Some(out) = &a.out {
        write_json(&fit, &out.join("dantzig.json"))?;
        let mut t = Table::new(["j", "beta_hat"]);
        for (j, b) in fit.beta_hat.iter().enumerate() {
            t.rows.push(vec![j.into(), (*b).into()]);
        }
        emit_csv(&t, &out.join("coefficients.csv"))?;
        write_config(out, "dantzig", a)?;
    }
    print_json(&fit)?;
    if !fit.is_optimal() {
        return Err(Error::Solver(format!("Dantzig LP ended with status {:?}", fit.status)).into());
    }
    Ok(())
}

fn stepdown(a: &StepdownArgs) -> std::result::Result<(), Failure> {
    let influence = read_matrix(&a.influence, a.header)?;
    let est = read_matrix(&a.estimates, a.header)?;
    if est.ncols() != 2 {
        return Err(Error::InvalidInput("estimates CSV needs two columns: beta_hat, beta_null".into()).into());
    }
    let problem = MhtProblem::new(est.column(0).to_vec(), est.column(1).to_vec(), influence, a.two_sided)?;
    let r = run_stepdown(&problem, a.alpha, &bootstrap(a.reps, a.seed, MaxStatVariant::SignedMax)?)?;
    if let Some(out) = &a.out {
        write_json(&r, &out.join("stepdown.json"))?;
        let mut t = Table::new(["j", "t_stat", "rejected", "step"]);
        for j in 0..r.rejected.len() {
            t.rows.push(vec![
                j.into(),
                r.t_stats[j].into(),
                r.rejected[j].into(),
                r.rejection_step[j].map_or(Cell::Text(String::new()), Cell::from),
            ]);
        }
        emit_csv(&t, &out.join("hypotheses.csv"))?;
        write_config(out, "stepdown", a)?;
    }
    print_json(&r)?;
    Ok(())
}

fn spectest(a: &SpectestArgs) -> std::result::Result<(), Failure> {
    let (y, v) = split_first_column(&read_matrix(&a.input, a.header)?)?;
    let p_raw: DataMatrix = match &a.test_functions {
        Some(path) => read_matrix(path, a.header)?,
        None => match a.family {
            FamilyArg::Legendre => TestFamily::Legendre { degree: a.size },
            FamilyArg::Chebyshev => TestFamily::Chebyshev { degree: a.size },
            FamilyArg::Bspline => TestFamily::BSpline { count: a.size },
        }
        .evaluate(&v)?,
    };
    let input = SpecTestInput::new(v, y, p_raw)?;
    let r = run_spec_test(&input, a.alpha, &bootstrap(a.reps, a.seed, MaxStatVariant::AbsoluteMax)?)?;
    if let Some(out) = &a.out {
        write_json(&r, &out.join("spectest.json"))?;
        let mut t = Table::new(["j", "score", "status"]);
        for (j, s) in r.per_function_scores.iter().enumerate() {
            let status = if r.dropped.contains(&j) {
                "dropped"
            } else if r.excluded.contains(&j) {
                "degenerate"
            } else {
                "active"
            };
            t.rows.push(vec![j.into(), s.map_or(Cell::Text(String::new()), Cell::from), status.into()]);
        }
        emit_csv(&t, &out.join("scores.csv"))?;
        write_config(out, "spectest", a)?;
    }
    print_json(&r)?;
    Ok(())
}

fn ppplot(a: &PpplotArgs) -> std::result::Result<(), Failure> {
    let cfg = PpPlotConfig {
        n: a.n,
        p: a.p,
        reps: a.reps,
        seed: a.seed,
        noise: a.noise.into(),
    };
    let d = run_ppplot(&cfg)?;
    emit_csv(&d.to_table(), &a.out.join("ppplot.csv"))?;
    let summary = json!({ "ks": d.ks, "n": a.n, "p": a.p, "reps": a.reps });
    write_json(&summary, &a.out.join("summary.json"))?;
    write_config(&a.out, "ppplot", a)?;
    print_json(&summary)?;
    Ok(())
}

fn montecarlo(a: &MontecarloArgs) -> std::result::Result<(), Failure> {
    let text = std::fs::read_to_string(&a.config).map_err(Error::from)?;
    let mut config: ExperimentConfig = serde_json::from_str(&text).map_err(Error::from)?;
    if let Some(seed) = a.seed {
        set_seed(&mut config, seed);
    }
    let out = run_experiment(&config)?;
    emit_csv(&out.table, &a.out.join(format!("{}.csv", out.name)))?;
    write_json(&out.summary, &a.out.join("summary.json"))?;
    let mut resolved = serde_json::to_string_pretty(&config).map_err(Error::from)?;
    resolved.push('\n');
    write_atomic(&a.out.join("config.json"), resolved.as_bytes())?;
    print_json(&out.summary)?;
    Ok(())
}

fn set_seed(config: &mut ExperimentConfig, seed: u64) {
    match config {
        ExperimentConfig::Ppplot(c) => c.seed = seed,
        ExperimentConfig::DantzigTable(c) => c.design.seed = seed,
        ExperimentConfig::Coverage(c) => c.seed = seed,
        ExperimentConfig::Fwer(c) => c.seed = seed,
        ExperimentConfig::SpecSize(c) => c.seed = seed,
        ExperimentConfig::BootstrapAgreement(c) => c.seed = seed,
    }
}
