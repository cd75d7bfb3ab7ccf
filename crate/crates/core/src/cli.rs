//! Command-line front end: argument parsing, orchestration, exit codes.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::diagnostics::{analyze, AnalysisOptions, DiagnosticError, MeasureInfo, REPORT_SCHEMA_VERSION};
use crate::moments::{MeasureKind, MeasureSpec, MomentProvider};
use crate::multiindex::MultiIndex;
use crate::report::{to_json, VerifyReport};
use crate::verify::run_checks;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PROVIDER: i32 = 3;

/// Relative size of the perturbation injected by `--perturb-moment`.
pub const PERTURBATION: f64 = 1e-6;

/// Relative slack in the log-convexity warning for user-supplied moments.
pub const LOG_CONVEXITY_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "dbar-spectral", version, about = "Spectral diagnostics for the canonical solution operator to dbar")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify boundedness, compactness, Hilbert-Schmidt and Schatten membership.
    Analyze(RunArgs),
    /// Run the oracle checks on a catalog measure.
    Verify(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Measure spec (JSON).
    #[arg(long, value_name = "PATH")]
    pub measure: PathBuf,
    /// Truncation degree K [default: 50 for n=1, 30 for n=2, 20 otherwise].
    #[arg(long, value_name = "K")]
    pub max_degree: Option<usize>,
    /// Comma-separated Schatten exponents.
    #[arg(long, value_name = "P1,P2,...", default_value = "1,2")]
    pub schatten: String,
    /// Report path [default: stdout].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Threshold below which a limit counts as zero.
    #[arg(long, value_name = "X")]
    pub tol_report: Option<f64>,
    /// Include per-block matrices, eigenvalues and eigenvectors.
    #[arg(long)]
    pub verbose: bool,
    /// Multiply one moment by 1 + 1e-6 before running (sensitivity testing).
    #[arg(long, value_name = "INDEX", hide = true)]
    pub perturb_moment: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analyze,
    Verify,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub measure: PathBuf,
    pub max_degree: Option<usize>,
    pub schatten: Vec<f64>,
    pub tol_report: Option<f64>,
    pub out: Option<PathBuf>,
    pub verbose: bool,
    pub perturb_moment: Option<MultiIndex>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Provider(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Provider(_) => EXIT_PROVIDER,
        }
    }
}

impl From<DiagnosticError> for CliError {
    fn from(e: DiagnosticError) -> Self {
        match e {
            DiagnosticError::InvalidExponent(_) | DiagnosticError::InvalidConfig(_) => CliError::Config(e.to_string()),
            _ => CliError::Provider(e.to_string()),
        }
    }
}

pub fn parse_exponents(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let p: f64 = part
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("invalid Schatten exponent {:?}", part.trim())))?;
        if !(p > 0.0) || !p.is_finite() {
            return Err(CliError::Config(format!("Schatten exponent must be positive, got {p}")));
        }
        out.push(p);
    }
    Ok(out)
}

impl RunConfig {
    pub fn from_args(mode: Mode, args: RunArgs) -> Result<Self, CliError> {
        if let Some(x) = args.tol_report {
            if !(x > 0.0) || !x.is_finite() {
                return Err(CliError::Config(format!("--tol-report must be positive, got {x}")));
            }
        }
        let perturb_moment = args
            .perturb_moment
            .map(|s| s.parse::<MultiIndex>().map_err(|e| CliError::Config(e.to_string())))
            .transpose()?;
        Ok(RunConfig {
            mode,
            measure: args.measure,
            max_degree: args.max_degree,
            schatten: parse_exponents(&args.schatten)?,
            tol_report: args.tol_report,
            out: args.out,
            verbose: args.verbose,
            perturb_moment,
        })
    }

    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        match cli.command {
            Command::Analyze(a) => Self::from_args(Mode::Analyze, a),
            Command::Verify(a) => Self::from_args(Mode::Verify, a),
        }
    }
}

pub fn default_max_degree(n: usize) -> usize {
    match n {
        1 => 50,
        2 => 30,
        _ => 20,
    }
}

struct Prepared {
    spec: MeasureSpec,
    provider: MomentProvider,
    options: AnalysisOptions,
    info: MeasureInfo,
}

fn prepare(config: &RunConfig) -> Result<Prepared, CliError> {
    let spec = MeasureSpec::from_path(&config.measure).map_err(|e| CliError::Config(e.to_string()))?;
    if config.mode == Mode::Verify && !matches!(spec.kind, MeasureKind::Catalog(_)) {
        return Err(CliError::Config(format!(
            "verify needs an independent moment source; only catalog measures provide one (got {})",
            spec.kind.name()
        )));
    }
    let k = config.max_degree.unwrap_or_else(|| default_max_degree(spec.n));
    let mut provider = spec.build(k + 2).map_err(|e| CliError::Provider(e.to_string()))?;
    // Catalog providers reject violations at construction; user data only warns.
    for w in provider.log_convexity_warnings(LOG_CONVEXITY_TOL) {
        eprintln!("warning: {w}; the data may not come from a measure");
    }
    if let Some(index) = &config.perturb_moment {
        index.check_dim(spec.n).map_err(|e| CliError::Config(format!("--perturb-moment: {e}")))?;
        if index.has_negative() {
            return Err(CliError::Config(format!("--perturb-moment: index ({index}) has a negative entry")));
        }
        provider = provider.with_perturbation(index.clone(), 1.0 + PERTURBATION);
    }
    let mut options = AnalysisOptions::new(k);
    options.schatten = config.schatten.clone();
    options.include_blocks = config.verbose;
    if let Some(x) = config.tol_report {
        options.heuristics.eps_report = x;
    }
    let name = match &spec.kind {
        MeasureKind::Catalog(c) => c.name(),
        other => other.name().to_string(),
    };
    let info = MeasureInfo { name, n: spec.n, provider: provider.kind().label() };
    Ok(Prepared { spec, provider, options, info })
}

/// Report JSON for `analyze`. Verdicts are data, so any successful run is OK.
pub fn run_analyze(config: &RunConfig) -> Result<String, CliError> {
    let p = prepare(config)?;
    let report = analyze(&p.provider, &p.info.name, &p.options)?;
    to_json(&report).map_err(|e| CliError::Config(e.to_string()))
}

/// Report JSON for `verify` and whether every check passed.
pub fn run_verify(config: &RunConfig) -> Result<(String, bool), CliError> {
    let p = prepare(config)?;
    let oracle = p
        .spec
        .oracle_provider()
        .expect("catalog measures have an oracle")
        .map_err(|e| CliError::Provider(e.to_string()))?;
    let checks = run_checks(&p.spec, &p.provider, &oracle, &p.options)?;
    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        measure: p.info,
        truncation: p.options.max_degree,
        checks,
        passed,
    };
    Ok((to_json(&report).map_err(|e| CliError::Config(e.to_string()))?, passed))
}

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}"))),
    }
}

/// Runs the configured mode, writes the report, and returns the exit code.
pub fn execute(config: &RunConfig) -> i32 {
    let result = match config.mode {
        Mode::Analyze => run_analyze(config).and_then(|text| emit(config, &text).map(|_| EXIT_OK)),
        Mode::Verify => run_verify(config).and_then(|(text, passed)| {
            emit(config, &text)?;
            if !passed {
                eprintln!("verification failed; see the report for residuals");
            }
            Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_lists() {
        assert_eq!(parse_exponents("1,2, 4").unwrap(), vec![1.0, 2.0, 4.0]);
        assert!(parse_exponents("1,0").is_err());
        assert!(parse_exponents("x").is_err());
        assert!(parse_exponents("").is_err());
    }

    #[test]
    fn args_become_config() {
        let cli = Cli::try_parse_from([
            "dbar-spectral",
            "analyze",
            "--measure",
            "m.json",
            "--schatten",
            "1,2,4",
            "--tol-report",
            "1e-4",
            "--perturb-moment",
            "1,0",
        ])
        .unwrap();
        let c = RunConfig::from_cli(cli).unwrap();
        assert_eq!(c.mode, Mode::Analyze);
        assert_eq!(c.schatten, vec![1.0, 2.0, 4.0]);
        assert_eq!(c.tol_report, Some(1e-4));
        assert_eq!(c.perturb_moment, Some(MultiIndex::new(vec![1, 0])));
        assert_eq!(c.max_degree, None);

        let cli = Cli::try_parse_from(["dbar-spectral", "verify", "--measure", "m.json", "--tol-report", "0"]).unwrap();
        assert_eq!(RunConfig::from_cli(cli).unwrap_err().exit_code(), EXIT_CONFIG);
        assert!(Cli::try_parse_from(["dbar-spectral", "analyze"]).is_err());
    }

    #[test]
    fn default_degrees() {
        assert_eq!(default_max_degree(1), 50);
        assert_eq!(default_max_degree(2), 30);
        assert_eq!(default_max_degree(3), 20);
    }
}
