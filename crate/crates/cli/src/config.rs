//! Experiment configuration: a JSON file whose fields the command-line flags
//! override, resolved into one value per setting.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use polymer_core::lattice::FillOrder;
use polymer_core::{DistributionSpec, Temperature};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "POLYMER_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Temp {
    Positive,
    Zero,
}

impl From<Temp> for Temperature {
    fn from(t: Temp) -> Self {
        match t {
            Temp::Positive => Temperature::Positive,
            Temp::Zero => Temperature::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    Rows,
    Columns,
    AntiDiagonals,
}

impl From<Order> for FillOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Rows => FillOrder::Rows,
            Order::Columns => FillOrder::Columns,
            Order::AntiDiagonals => FillOrder::AntiDiagonals,
        }
    }
}

/// Every setting an experiment can take. In a config file all fields are
/// optional; `subcommand` selects the experiment when the file is passed to
/// `run`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// JSON config file; flags given on the command line override its fields.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,

    /// Registry key (see `list`). Omit to run every entry of the registry.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,

    /// Sample size: points, draws, increments or replicates per step.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Grid extent in the first coordinate (or the site for `zlimit`).
    #[arg(long = "N", value_name = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,

    /// Grid extent in the second coordinate.
    #[arg(long = "M", value_name = "M")]
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<usize>,

    /// Comma-separated limit parameters, e.g. 0.1,0.01,0.001.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,

    /// Output directory. Defaults to $POLYMER_OUT_DIR, then the current directory.
    #[arg(long, value_name = "DIR")]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing)]
    pub format: Option<Format>,

    /// Repeat over this many derived seeds; at most one failure is tolerated.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,

    /// Recursion name for `simulate`, `stationary` and `burke`: r01, r10, rm11, r11, r1m1, rtilde.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<Temp>,

    /// JSON array of the three laws (X, U boundary, V boundary).
    #[arg(long, value_parser = parse_laws)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laws: Option<Laws>,

    /// JSON law of the environment for `rwre`.
    #[arg(long, value_parser = parse_law)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<DistributionSpec>,

    /// Constant value for every X, U and V in `simulate`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate_x: Option<f64>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<Order>,
}

pub type Laws = [DistributionSpec; 3];

fn parse_laws(s: &str) -> Result<Laws, String> {
    serde_json::from_str(s).map_err(|e| format!("expected a JSON array of three laws: {e}"))
}

fn parse_law(s: &str) -> Result<DistributionSpec, String> {
    DistributionSpec::from_json(s).map_err(|e| e.to_string())
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("config {}: {e}", path.display())))
    }

    /// Config file (if any) with the flags laid over it.
    pub fn resolve(flags: ExperimentConfig) -> Result<Self, CliError> {
        let mut base = match &flags.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        overlay!(base, flags; case, n, seed, grid_n, grid_m, schedule, out, format, seeds, model, temperature, laws, law, degenerate_x, order);
        Ok(base)
    }

    /// Names of the settings present, as spelled on the command line.
    pub fn present(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let mut add = |set: bool, name| {
            if set {
                v.push(name)
            }
        };
        add(self.case.is_some(), "case");
        add(self.n.is_some(), "n");
        add(self.seed.is_some(), "seed");
        add(self.grid_n.is_some(), "N");
        add(self.grid_m.is_some(), "M");
        add(self.schedule.is_some(), "schedule");
        add(self.seeds.is_some(), "seeds");
        add(self.model.is_some(), "model");
        add(self.temperature.is_some(), "temperature");
        add(self.laws.is_some(), "laws");
        add(self.law.is_some(), "law");
        add(self.degenerate_x.is_some(), "degenerate-x");
        add(self.order.is_some(), "order");
        v
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|s| !s.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }
}
