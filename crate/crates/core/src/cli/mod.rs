//! Command-line front end for the five pipelines `nf`, `freq`, `bruno`,
//! `density` and `verify`.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 when the mathematics
//! aborts (small divisor, resonance, failed integration).

mod config;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::arithmetic::{
    bruno_sequence, bruno_sum, density_estimate, ArithmeticError, DensityOptions, SamplingMode,
};
use crate::dynamics::{drift_exponent, DriftOptions, DynamicsError};
use crate::frequency::{frequency_space, FrequencyError, DEFAULT_RANK_TOL};
use crate::normalform::{
    birkhoff_with, certify, frequency_map, NormalFormError, NormalFormOptions, NormalFormResult,
};
use crate::series::{SeriesError, TruncatedSeries};

pub use config::{JobConfig, PartialConfig};
pub use report::{BrunoReport, Format, NfReport, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("mathematical abort: {0}")]
    Math(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Math(_) => 2,
            _ => 1,
        }
    }
}

impl From<NormalFormError> for CliError {
    fn from(e: NormalFormError) -> Self {
        match e {
            NormalFormError::SmallDivisor { .. } | NormalFormError::TExpansionOverflow { .. } => {
                CliError::Math(e.to_string())
            }
            NormalFormError::Series(SeriesError::NonTerminatingGenerator(_)) => {
                CliError::Math(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ArithmeticError> for CliError {
    fn from(e: ArithmeticError) -> Self {
        match e {
            ArithmeticError::Resonant { .. } => CliError::Math(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<FrequencyError> for CliError {
    fn from(e: FrequencyError) -> Self {
        match e {
            FrequencyError::NormalForm(e) => e.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::NormalForm(e) => e.into(),
            DynamicsError::NewtonFailure { .. } | DynamicsError::OutsideValidity { .. } => {
                CliError::Math(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Birkhoff normal form, frequency map and frequency space
    Nf,
    /// Frequency map and frequency space only
    Freq,
    /// Bruno sequence and partial sums of alpha
    Bruno,
    /// Density of the arithmetic class pulled back by the frequency map
    Density,
    /// Action drift of normal-form tori under the flow of H
    Verify,
}

/// Flags mirroring the fields of [`JobConfig`].
#[derive(Clone, Debug, Default, Args)]
pub struct JobArgs {
    /// Number of degrees of freedom
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Frequencies as decimal strings, comma separated
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<String>>,
    /// Hamiltonian in the series grammar, e.g. "q1^2*p1^2"
    #[arg(long, global = true)]
    pub hamiltonian: Option<String>,
    /// Truncation degree of the series
    #[arg(global = true, long = "N")]
    pub degree: Option<u32>,
    /// Truncation degree in the unfolding parameters t (default N/2)
    #[arg(global = true, long = "N_t")]
    pub t_degree: Option<u32>,
    /// Normal-form order (default N)
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Coefficient precision; only 53 is supported
    #[arg(long, global = true)]
    pub precision_bits: Option<u32>,
    /// Small divisors below this abort the normal form
    #[arg(long, global = true)]
    pub divisor_threshold: Option<f64>,
    /// Exponent of the arithmetic class a_k = a_k(alpha) 2^(-tau k)
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Number of dyadic lattice levels
    #[arg(global = true, long = "K")]
    pub levels: Option<u32>,
    /// First level at which class membership is checked
    #[arg(long, global = true)]
    pub first_level: Option<u32>,
    /// Strictly decreasing radii, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Monte Carlo samples per radius
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Use a grid with this many points per axis instead of Monte Carlo
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Seed of the random streams
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Integration time
    #[arg(global = true, long = "T")]
    pub t_end: Option<f64>,
    /// Time step
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Integrator: gauss2 or midpoint
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// Action direction of the starting torus, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub lambda0: Option<Vec<f64>>,
}

impl From<JobArgs> for PartialConfig {
    fn from(a: JobArgs) -> Self {
        PartialConfig {
            n: a.n,
            alpha: a.alpha,
            hamiltonian: a.hamiltonian,
            degree: a.degree,
            t_degree: a.t_degree,
            k: a.k,
            precision_bits: a.precision_bits,
            divisor_threshold: a.divisor_threshold,
            tau: a.tau,
            levels: a.levels,
            first_level: a.first_level,
            radii: a.radii,
            samples: a.samples,
            grid: a.grid,
            seed: a.seed,
            t_end: a.t_end,
            dt: a.dt,
            method: a.method,
            lambda0: a.lambda0,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "kamnf",
    version,
    about = "Normal forms, frequency spaces and Bruno sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub job: JobArgs,
    /// JSON file whose fields override the flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving every report format
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Format printed on standard output
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
}

/// A finished pipeline.
pub enum Outcome {
    Nf(NfReport),
    Freq(crate::frequency::FrequencyMapResult),
    Bruno(BrunoReport),
    Density(crate::arithmetic::DensityReport),
    Verify(crate::dynamics::DriftReport),
}

impl Outcome {
    pub fn report(&self) -> &dyn ReportDyn {
        match self {
            Outcome::Nf(r) => r,
            Outcome::Freq(r) => r,
            Outcome::Bruno(r) => r,
            Outcome::Density(r) => r,
            Outcome::Verify(r) => r,
        }
    }

    /// Mathematical aborts that still produce a report (resonant `alpha`).
    pub fn abort(&self) -> Option<String> {
        match self {
            Outcome::Bruno(b) => b.profile.resonance().map(|(k, j)| {
                let parts: Vec<String> = j.iter().map(|v| v.to_string()).collect();
                format!("resonant alpha at level {k}, witness ({})", parts.join(","))
            }),
            _ => None,
        }
    }
}

/// Object-safe view of [`Report`].
pub trait ReportDyn {
    fn name(&self) -> &'static str;
    fn render(&self, format: Format) -> Result<Vec<u8>, CliError>;
    fn formats(&self) -> Vec<Format>;
}

impl<T: Report> ReportDyn for T {
    fn name(&self) -> &'static str {
        Report::name(self)
    }

    fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        Report::render(self, format)
    }

    fn formats(&self) -> Vec<Format> {
        Report::formats(self)
    }
}

type NfParts = (NormalFormResult, Vec<TruncatedSeries>, f64);

fn ghat_of(config: &JobConfig) -> Result<NfParts, CliError> {
    let h = config.hamiltonian()?;
    let alpha = config.frequency();
    let opts = NormalFormOptions {
        divisor_threshold: config.divisor_threshold,
    };
    let nf = birkhoff_with(&h, &alpha, config.k, opts)?;
    let residual = certify(&h, &nf)?;
    let ghat = frequency_map(&nf.normal_form, &alpha)?;
    Ok((nf, ghat, residual))
}

/// Runs one pipeline.
pub fn run(command: Command, config: &JobConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Nf => {
            let (nf, ghat, residual) = ghat_of(config)?;
            Ok(Outcome::Nf(NfReport {
                normal_form: nf,
                frequency: frequency_space(&ghat, DEFAULT_RANK_TOL)?,
                certified_residual: residual,
            }))
        }
        Command::Freq => {
            let (_, ghat, _) = ghat_of(config)?;
            Ok(Outcome::Freq(frequency_space(&ghat, DEFAULT_RANK_TOL)?))
        }
        Command::Bruno => {
            let profile = bruno_sequence(&config.alpha_real(), config.levels)?;
            let sum = bruno_sum(&profile);
            Ok(Outcome::Bruno(BrunoReport { profile, sum }))
        }
        Command::Density => {
            let (_, ghat, _) = ghat_of(config)?;
            let mode = match config.grid {
                Some(per_axis) => SamplingMode::Grid { per_axis },
                None => SamplingMode::MonteCarlo,
            };
            let report = density_estimate(
                &ghat,
                &config.alpha_real(),
                config.tau,
                config.levels,
                &config.radii,
                config.samples,
                config.seed,
                DensityOptions {
                    mode,
                    first_level: config.first_level,
                },
            )?;
            Ok(Outcome::Density(report))
        }
        Command::Verify => {
            let h = config.hamiltonian()?;
            let opts = DriftOptions {
                t_end: config.t_end,
                dt: config.dt,
                method: config.method,
                ..DriftOptions::default()
            };
            let report = drift_exponent(
                &h,
                &config.frequency(),
                config.k,
                &config.lambda0,
                &config.radii,
                &opts,
            )?;
            Ok(Outcome::Verify(report))
        }
    }
}

/// Writes every supported format of `outcome` into `dir`.
pub fn write_reports(outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let report = outcome.report();
    let mut written = Vec::new();
    for format in report.formats() {
        let path = dir.join(format!("{}.{}", report.name(), format.extension()));
        std::fs::write(&path, report.render(format)?)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

/// Parses arguments, runs the job and returns `(exit code, stdout, stderr)`.
pub fn execute<I, T>(args: I) -> (i32, Vec<u8>, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (code, Vec::new(), e.render().to_string());
        }
    };
    match execute_parsed(&cli) {
        Ok((code, out, err)) => (code, out, err),
        Err(e) => (e.exit_code(), Vec::new(), format!("{e}\n")),
    }
}

fn execute_parsed(cli: &Cli) -> Result<(i32, Vec<u8>, String), CliError> {
    let mut partial = PartialConfig::from(cli.job.clone());
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
        partial = partial.merged_with(PartialConfig::from_json(&text)?);
    }
    let config = JobConfig::from_partial(partial)?;
    let outcome = run(cli.command, &config)?;
    if let Some(dir) = &cli.out {
        write_reports(&outcome, dir)?;
    }
    let stdout = outcome.report().render(cli.format)?;
    match outcome.abort() {
        Some(msg) => Ok((2, stdout, format!("mathematical abort: {msg}\n"))),
        None => Ok((0, stdout, String::new())),
    }
}

/// Entry point of the `kamnf` binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use std::io::Write;
    let (code, out, err) = execute(args);
    let _ = std::io::stdout().write_all(&out);
    let _ = std::io::stderr().write_all(err.as_bytes());
    code
}
