//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for an invalid configuration, 2 for
//! filesystem or input-data errors.

mod report;
mod run;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::clusterers::OutlierCriterion;
use crate::data_model::io::write_repository_files;
use crate::error::Error;
use crate::meta_pipelines::{default_p_grid, Scenario};

pub use report::{summarize, GroupSummary};

#[derive(Debug, Parser)]
#[command(name = "meta-unsup", version, about = "Learn clustering decisions from a repository of labeled problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Repository directory (or manifest file).
    #[arg(long, global = true)]
    pub repo: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated train fractions.
    #[arg(long, global = true, value_delimiter = ',')]
    pub train_frac: Vec<f64>,
    #[arg(long, global = true, default_value_t = 10)]
    pub repeats: usize,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Comma-separated outlier fractions.
    #[arg(long, global = true, value_delimiter = ',')]
    pub p_grid: Vec<f64>,
    #[arg(long, global = true, default_value_t = 2)]
    pub k_min: usize,
    #[arg(long, global = true, default_value_t = 10)]
    pub k_max: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic repository.
    Synth {
        #[arg(long, default_value_t = 20)]
        problems: usize,
        #[arg(long, value_enum, default_value_t = Scenario::Blobs)]
        scenario: Scenario,
    },
    /// Run one experiment on a repository.
    Run {
        #[arg(value_enum)]
        experiment: Experiment,
        /// Outlier ranking used by the outlier sweep.
        #[arg(long, value_enum, default_value_t = OutlierCriterion::DistanceFromMean)]
        criterion: OutlierCriterion,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 250)]
        batch: usize,
        /// Pairs sampled per dataset and per pair set.
        #[arg(long, default_value_t = 2500)]
        pair_cap: usize,
        /// Also write the first repeat's pair sets.
        #[arg(long)]
        write_pairs: bool,
    },
    /// Aggregate result CSVs into per-group mean, standard deviation and 95% half-width.
    Report {
        inputs: Vec<PathBuf>,
        /// Grouping columns (default: whichever of train_frac and p are present).
        #[arg(long, value_delimiter = ',')]
        group_by: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    AlgoSelect,
    MetaK,
    Outliers,
    FitThreshold,
    MetaScale,
    Bsf,
}

/// Fully resolved settings, written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repo: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problems: Option<usize>,
    pub seed: u64,
    pub train_fractions: Vec<f64>,
    pub repeats: usize,
    pub p_grid: Vec<f64>,
    pub k_min: usize,
    pub k_max: usize,
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<OutlierCriterion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_by: Option<Vec<String>>,
}

/// Failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_data_error() { 2 } else { 1 };
        Self { code, message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Wrap errors from reading inputs or writing outputs as data errors.
pub(crate) fn data_err<T>(r: crate::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::data(e.to_string()))
}

impl Cli {
    fn resolve(&self) -> CliResult<ExperimentConfig> {
        let train_fractions = if self.train_frac.is_empty() { vec![0.5] } else { self.train_frac.clone() };
        let p_grid = if self.p_grid.is_empty() { default_p_grid() } else { self.p_grid.clone() };
        if let Some(f) = train_fractions.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
            return Err(CliError::config(format!("train fraction {f} is not in (0,1)")));
        }
        if let Some(p) = p_grid.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(CliError::config(format!("outlier fraction {p} is not in [0,1)")));
        }
        if self.repeats == 0 {
            return Err(CliError::config("--repeats must be at least 1"));
        }
        if self.k_min < 2 || self.k_min > self.k_max {
            return Err(CliError::config(format!("invalid k range {}..={}", self.k_min, self.k_max)));
        }
        if self.threads == Some(0) {
            return Err(CliError::config("--threads must be at least 1"));
        }
        if self.out.is_none() {
            return Err(CliError::config("--out is required"));
        }
        let mut cfg = ExperimentConfig {
            command: String::new(),
            experiment: None,
            repo: self.repo.as_ref().map(|p| p.display().to_string()),
            scenario: None,
            problems: None,
            seed: self.seed,
            train_fractions,
            repeats: self.repeats,
            p_grid,
            k_min: self.k_min,
            k_max: self.k_max,
            threads: self.threads,
            criterion: None,
            epochs: None,
            batch: None,
            pair_cap: None,
            inputs: None,
            group_by: None,
        };
        match &self.command {
            Command::Synth { problems, scenario } => {
                if *problems == 0 {
                    return Err(CliError::config("--problems must be at least 1"));
                }
                cfg.command = "synth".into();
                cfg.scenario = Some(*scenario);
                cfg.problems = Some(*problems);
            }
            Command::Run { experiment, criterion, epochs, batch, pair_cap, .. } => {
                if self.repo.is_none() {
                    return Err(CliError::config("--repo is required for run"));
                }
                cfg.command = "run".into();
                cfg.experiment = Some(*experiment);
                match experiment {
                    Experiment::Outliers => cfg.criterion = Some(*criterion),
                    Experiment::Bsf => {
                        if *epochs == 0 || *batch == 0 || *pair_cap == 0 {
                            return Err(CliError::config("--epochs, --batch and --pair-cap must be positive"));
                        }
                        cfg.epochs = Some(*epochs);
                        cfg.batch = Some(*batch);
                        cfg.pair_cap = Some(*pair_cap);
                    }
                    _ => {}
                }
            }
            Command::Report { inputs, group_by } => {
                if inputs.is_empty() {
                    return Err(CliError::config("report needs at least one input CSV"));
                }
                cfg.command = "report".into();
                cfg.inputs = Some(inputs.iter().map(|p| p.display().to_string()).collect());
                cfg.group_by = Some(group_by.clone());
            }
        }
        Ok(cfg)
    }
}

pub(crate) fn create_file(dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    File::create(dir.join(name))
        .map(BufWriter::new)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.join(name).display())))
}

pub(crate) fn write_text(dir: &Path, name: &str, text: &str) -> CliResult<()> {
    let mut f = create_file(dir, name)?;
    f.write_all(text.as_bytes()).and_then(|_| f.flush()).map_err(|e| CliError::data(e.to_string()))
}

fn prepare_out(cfg: &ExperimentConfig, out: &Path) -> CliResult<()> {
    std::fs::create_dir_all(out).map_err(|e| CliError::data(format!("cannot create {}: {e}", out.display())))?;
    let json = serde_json::to_string_pretty(cfg).map_err(|e| CliError::data(e.to_string()))?;
    write_text(out, "config.json", &(json + "\n"))
}

fn execute(cli: &Cli) -> CliResult<()> {
    let cfg = cli.resolve()?;
    if let Some(t) = cfg.threads {
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let out = cli.out.as_deref().expect("checked in resolve");
    prepare_out(&cfg, out)?;
    match &cli.command {
        Command::Synth { problems, scenario } => {
            let datasets = scenario.datasets(*problems, cli.seed)?;
            data_err(write_repository_files(&datasets, out))?;
            println!("wrote {} problems to {}", datasets.len(), out.display());
            Ok(())
        }
        Command::Run { experiment, criterion, epochs, batch, pair_cap, write_pairs } => {
            let opts = run::RunOptions { criterion: *criterion, epochs: *epochs, batch: *batch, pair_cap: *pair_cap, write_pairs: *write_pairs };
            run::run_experiment(*experiment, &cfg, cli.repo.as_deref().expect("checked in resolve"), out, &opts)
        }
        Command::Report { inputs, group_by } => report::run_report(inputs, group_by, out),
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
