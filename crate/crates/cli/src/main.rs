//! `polymer`: runs the identity, limit, stationarity and lattice experiments
//! and writes JSON or CSV reports.
//!
//! Exit status: 0 when every verdict is as registered, 1 on a test failure,
//! 2 on an unknown key or invalid configuration.

mod config;
mod output;
mod run;

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polymer_core::Error;

use config::{ExperimentConfig, Format};

#[derive(Parser)]
#[command(
    name = "polymer",
    version,
    about = "Directed-polymer recursions: identities, limits, stationary measures and lattice experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pointwise algebraic identities and inverse pairs.
    Identity(ExperimentConfig),
    /// Scaling and zero-temperature limits of the maps.
    Limit(ExperimentConfig),
    /// Detailed-balance solutions.
    Db(ExperimentConfig),
    /// Stationary triples of the recursions.
    Stationary(ExperimentConfig),
    /// Fill a lattice and dump its fields.
    Simulate(ExperimentConfig),
    /// Increment laws and independence along down-right paths.
    Burke(ExperimentConfig),
    /// Random walk in a beta environment against its oracles.
    Rwre(ExperimentConfig),
    /// Convergence of rescaled partition functions.
    Zlimit(ExperimentConfig),
    /// Convergence in law of pushed-forward distributions.
    DistLimit(ExperimentConfig),
    /// Every registry key.
    List {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run the experiment described by a config file's `subcommand` field.
    Run {
        file: std::path::PathBuf,
        #[command(flatten)]
        flags: ExperimentConfig,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sub {
    Identity,
    Limit,
    Db,
    Stationary,
    Simulate,
    Burke,
    Rwre,
    Zlimit,
    DistLimit,
    List,
}

const SUBS: [Sub; 10] =
    [Sub::Identity, Sub::Limit, Sub::Db, Sub::Stationary, Sub::Simulate, Sub::Burke, Sub::Rwre, Sub::Zlimit, Sub::DistLimit, Sub::List];

impl Sub {
    pub fn name(self) -> &'static str {
        match self {
            Sub::Identity => "identity",
            Sub::Limit => "limit",
            Sub::Db => "db",
            Sub::Stationary => "stationary",
            Sub::Simulate => "simulate",
            Sub::Burke => "burke",
            Sub::Rwre => "rwre",
            Sub::Zlimit => "zlimit",
            Sub::DistLimit => "dist-limit",
            Sub::List => "list",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        SUBS.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::unknown_key(s, SUBS.map(Sub::name)).into())
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self { code: 2, message: format!("{}: {e}", path.display()) }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = match &e {
            Error::UnknownKey { key, suggestions } if !suggestions.is_empty() => {
                format!("unknown key '{key}'; did you mean: {}?", suggestions.join(", "))
            }
            _ => e.to_string(),
        };
        Self { code: 2, message }
    }
}

fn file_name(sub: Sub, cfg: &ExperimentConfig, ext: &str) -> String {
    let mut name = sub.name().to_string();
    name.push('-');
    name.push_str(cfg.case.as_deref().or(cfg.model.as_deref()).unwrap_or("all"));
    if let Some(s) = cfg.seed {
        name.push_str(&format!("-seed{s}"));
    }
    format!("{name}.{ext}")
}

fn dispatch(command: Command) -> Result<bool, CliError> {
    let (sub, flags) = match command {
        Command::List { format } => {
            print!("{}", if format == Some(Format::Json) { run::list_json() } else { run::list_text() });
            return Ok(true);
        }
        Command::Run { file, flags } => {
            let base = ExperimentConfig::load(&file)?;
            let name = base.subcommand.clone().ok_or_else(|| CliError::invalid(format!("{} has no `subcommand` field", file.display())))?;
            let sub = Sub::parse(&name)?;
            if sub == Sub::List {
                return Err(CliError::invalid("`list` takes no config"));
            }
            (sub, ExperimentConfig { config: Some(file), ..flags })
        }
        Command::Identity(f) => (Sub::Identity, f),
        Command::Limit(f) => (Sub::Limit, f),
        Command::Db(f) => (Sub::Db, f),
        Command::Stationary(f) => (Sub::Stationary, f),
        Command::Simulate(f) => (Sub::Simulate, f),
        Command::Burke(f) => (Sub::Burke, f),
        Command::Rwre(f) => (Sub::Rwre, f),
        Command::Zlimit(f) => (Sub::Zlimit, f),
        Command::DistLimit(f) => (Sub::DistLimit, f),
    };
    let mut cfg = ExperimentConfig::resolve(flags)?;
    if let Some(s) = &cfg.subcommand {
        if s != sub.name() {
            return Err(CliError::invalid(format!("config is for `{s}`, not `{}`", sub.name())));
        }
    }
    cfg.subcommand = Some(sub.name().to_string());
    let outcome = run::execute(sub, &mut cfg)?;
    let (body, ext) = match cfg.format() {
        Format::Json => (&outcome.json, "json"),
        Format::Csv => (&outcome.csv, "csv"),
    };
    let path = output::write_atomic(&cfg.out_dir(), &file_name(sub, &cfg, ext), body)?;
    for l in &outcome.lines {
        println!("{l}");
    }
    println!("report: {}", path.display());
    if !outcome.passed {
        eprintln!("test failure; see {}", path.display());
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
