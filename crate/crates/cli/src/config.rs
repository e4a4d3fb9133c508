//! Configuration layering: command-line flags override a key=value config
//! file (from `--config` or the `EP3_CONFIG` environment variable), which
//! overrides built-in defaults.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use ep3_core::figures::DEFAULT_FIG_MU_LIST;
use ep3_core::units::PhysicalConstants;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file, or output destination — exit code 2.
    Config(String),
    /// A computation left its physical or temporal domain — exit code 3.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    pub fn domain(e: ep3_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Domain(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolvedCommand {
    Spectrum,
    Evolve,
    Sweep,
    ClassicalCheck,
    Experiment,
    Fig1a,
    Fig1b,
}

#[derive(Debug, Subcommand)]
pub enum CommandKind {
    /// Eigenvalues, EP flag, nilpotency index and self-orthogonality per mu
    Spectrum,
    /// Ground-state trajectory out to the compression target
    Evolve,
    /// Measured vs analytic period and visibility per mu
    Sweep,
    /// Quantum-classical z-score table from a seeded ensemble
    ClassicalCheck,
    /// Simulated ramp-and-measure protocol (omega0 -> omega0 * compression;
    /// one measurement per grid sample)
    Experiment,
    /// Axis-ratio figure grid: rho vs compression factor, one column per mu
    Fig1a,
    /// Scaled-variance figure grid: 2<x^2>w vs compression factor
    Fig1b,
}

/// Command-line surface. Every knob is optional here; `RunConfig::resolve`
/// merges flags, config file and defaults.
#[derive(Debug, Parser)]
#[command(
    name = "ep3",
    version,
    about = "Harmonic trap ramped at constant adiabatic parameter"
)]
pub struct CliArgs {
    #[command(subcommand)]
    pub command: CommandKind,

    /// Adiabatic parameter
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu: Option<f64>,

    /// Comma-separated adiabatic parameters (sweeps and figures)
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu_list: Option<Vec<f64>>,

    /// Initial trap frequency
    #[arg(long, global = true)]
    pub omega0: Option<f64>,

    /// Largest compression factor reached by a run
    #[arg(long, global = true)]
    pub compression_max: Option<f64>,

    /// Stretched-time samples per fastest oscillation period
    #[arg(long, global = true)]
    pub samples_per_period: Option<usize>,

    /// Monte-Carlo ensemble size
    #[arg(long, global = true)]
    pub n_mc: Option<usize>,

    /// Random seed for ensemble sampling
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output path (stdout when omitted)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format: csv or json
    #[arg(long, global = true)]
    pub format: Option<String>,

    /// Config file (key = value); EP3_CONFIG is the fallback path
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Planck constant
    #[arg(long, global = true)]
    pub hbar: Option<f64>,

    /// Particle mass
    #[arg(long, global = true)]
    pub mass: Option<f64>,
}

/// Values parsed out of a key=value config file.
#[derive(Debug, Default)]
struct FileConfig {
    mu: Option<f64>,
    mu_list: Option<Vec<f64>>,
    omega0: Option<f64>,
    compression_max: Option<f64>,
    samples_per_period: Option<usize>,
    n_mc: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
    hbar: Option<f64>,
    mass: Option<f64>,
}

fn parse_config_file(path: &PathBuf) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg = FileConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "config line {} is not key = value: '{raw}'",
                lineno + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| {
            CliError::Config(format!(
                "config line {}: bad {what} value '{value}'",
                lineno + 1
            ))
        };
        match key {
            "mu" => cfg.mu = Some(value.parse().map_err(|_| bad("mu"))?),
            "mu_list" => {
                let list: Result<Vec<f64>, _> =
                    value.split(',').map(|v| v.trim().parse()).collect();
                cfg.mu_list = Some(list.map_err(|_| bad("mu_list"))?);
            }
            "omega0" => cfg.omega0 = Some(value.parse().map_err(|_| bad("omega0"))?),
            "compression_max" => {
                cfg.compression_max = Some(value.parse().map_err(|_| bad("compression_max"))?)
            }
            "samples_per_period" => {
                cfg.samples_per_period = Some(value.parse().map_err(|_| bad("samples_per_period"))?)
            }
            "n_mc" => cfg.n_mc = Some(value.parse().map_err(|_| bad("n_mc"))?),
            "seed" => cfg.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "out" => cfg.out = Some(PathBuf::from(value)),
            "format" => cfg.format = Some(value.to_string()),
            "hbar" => cfg.hbar = Some(value.parse().map_err(|_| bad("hbar"))?),
            "mass" => cfg.mass = Some(value.parse().map_err(|_| bad("mass"))?),
            other => {
                return Err(CliError::Config(format!(
                    "config line {}: unknown key '{other}'",
                    lineno + 1
                )))
            }
        }
    }
    Ok(cfg)
}

/// Fully resolved run configuration.
#[derive(Debug)]
pub struct RunConfig {
    pub command: ResolvedCommand,
    pub mu_list: Vec<f64>,
    pub omega0: f64,
    pub compression_max: f64,
    pub samples_per_period: usize,
    pub n_mc: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub hbar: f64,
    pub mass: f64,
}

impl RunConfig {
    pub fn resolve(args: CliArgs) -> Result<Self, CliError> {
        let file = match args
            .config
            .clone()
            .or_else(|| std::env::var_os("EP3_CONFIG").map(PathBuf::from))
        {
            Some(path) => parse_config_file(&path)?,
            None => FileConfig::default(),
        };

        let command = match args.command {
            CommandKind::Spectrum => ResolvedCommand::Spectrum,
            CommandKind::Evolve => ResolvedCommand::Evolve,
            CommandKind::Sweep => ResolvedCommand::Sweep,
            CommandKind::ClassicalCheck => ResolvedCommand::ClassicalCheck,
            CommandKind::Experiment => ResolvedCommand::Experiment,
            CommandKind::Fig1a => ResolvedCommand::Fig1a,
            CommandKind::Fig1b => ResolvedCommand::Fig1b,
        };

        let mu = args.mu.or(file.mu);
        let mu_list_opt = args.mu_list.or(file.mu_list);
        let mu_list = match (mu_list_opt, mu) {
            (Some(list), _) if !list.is_empty() => list,
            (Some(_), _) => return Err(CliError::Config("--mu-list is empty".to_string())),
            (None, Some(single)) => vec![single],
            (None, None) => match command {
                // Figure and sweep commands have a standard ladder.
                ResolvedCommand::Sweep | ResolvedCommand::Fig1a | ResolvedCommand::Fig1b => {
                    DEFAULT_FIG_MU_LIST.to_vec()
                }
                _ => {
                    return Err(CliError::Config(
                        "this command needs --mu (or --mu-list / a config entry)".to_string(),
                    ))
                }
            },
        };

        let format = match args.format.or(file.format) {
            Some(s) => s.parse().map_err(CliError::Config)?,
            None => Format::Csv,
        };

        let cfg = RunConfig {
            command,
            mu_list,
            omega0: args.omega0.or(file.omega0).unwrap_or(1.0),
            compression_max: args.compression_max.or(file.compression_max).unwrap_or(1e3),
            samples_per_period: args
                .samples_per_period
                .or(file.samples_per_period)
                .unwrap_or(512),
            n_mc: args.n_mc.or(file.n_mc).unwrap_or(100_000),
            seed: args.seed.or(file.seed).unwrap_or(7),
            out: args.out.or(file.out),
            format,
            hbar: args.hbar.or(file.hbar).unwrap_or(1.0),
            mass: args.mass.or(file.mass).unwrap_or(1.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        for &mu in &self.mu_list {
            if !mu.is_finite() {
                return Err(CliError::Config(format!("mu must be finite, got {mu}")));
            }
        }
        let positive = [
            ("omega0", self.omega0),
            ("hbar", self.hbar),
            ("mass", self.mass),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(CliError::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !self.compression_max.is_finite() || self.compression_max <= 1.0 {
            return Err(CliError::Config(format!(
                "compression-max must be finite and exceed 1, got {}",
                self.compression_max
            )));
        }
        if self.samples_per_period == 0 {
            return Err(CliError::Config(
                "samples-per-period must be at least 1".to_string(),
            ));
        }
        if self.n_mc < 2 {
            return Err(CliError::Config("n-mc must be at least 2".to_string()));
        }
        Ok(())
    }

    /// The single adiabatic parameter for commands that take exactly one.
    pub fn single_mu(&self) -> Result<f64, CliError> {
        if self.mu_list.len() == 1 {
            Ok(self.mu_list[0])
        } else {
            Err(CliError::Config(format!(
                "this command takes exactly one mu, got {} values",
                self.mu_list.len()
            )))
        }
    }

    pub fn constants(&self) -> Result<PhysicalConstants, CliError> {
        PhysicalConstants::new(self.hbar, self.mass).map_err(CliError::domain)
    }
}
