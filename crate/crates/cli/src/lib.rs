//! Command-line driver for the graph estimation pipeline.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::commands::FitOptions;
use crate::config::ConfigFile;

#[derive(Debug, Parser)]
#[command(name = "subho", version, about = "Sparse Gaussian graphical model estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate replicate datasets and truth files for a scenario.
    Simulate(RunArgs),
    /// Fit a graph to a CSV file or to every replicate of a simulation directory.
    Fit(RunArgs),
    /// Score replicate fits against simulation truths.
    Evaluate {
        #[command(flatten)]
        run: RunArgs,
        /// Directory holding the replicate fits.
        #[arg(long)]
        fits: PathBuf,
    },
    /// Rank nodes of a fit by connectivity.
    Rank {
        #[command(flatten)]
        run: RunArgs,
        /// Table sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "10")]
        top: Vec<usize>,
    },
    /// Time methods on simulated scenarios.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        /// Extra scenario files.
        #[arg(long = "also")]
        also: Vec<PathBuf>,
        /// Methods to time, comma separated (defaults to --method).
        #[arg(long, value_delimiter = ',')]
        methods: Vec<String>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// subho, basad or iw.
    #[arg(long)]
    pub method: Option<String>,
    /// and or or.
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burnin: Option<usize>,
    /// Largest neighborhood considered per node.
    #[arg(long)]
    pub max_model_size: Option<usize>,
    /// Config file (TOML key-value pairs).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

impl RunArgs {
    pub fn config(&self) -> Result<ConfigFile> {
        let flags = ConfigFile {
            method: self.method.clone(),
            rule: self.rule.clone(),
            seed: self.seed,
            workers: self.workers,
            iters: self.iters,
            burnin: self.burnin,
            max_model_size: self.max_model_size,
            ..ConfigFile::default()
        };
        ConfigFile::resolve(flags, self.scenario.as_deref())
    }

    fn input(&self) -> Result<&PathBuf> {
        self.input.as_ref().context("--input is required")
    }

    fn output_dir(&self) -> Result<&PathBuf> {
        self.output_dir.as_ref().context("--output-dir is required")
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => {
            let scenario = a.config()?.scenario()?;
            commands::simulate(&scenario, a.output_dir()?)
        }
        Command::Fit(a) => {
            let opts = FitOptions::from_config(&a.config()?)?;
            commands::fit(a.input()?, a.output_dir()?, &opts)
        }
        Command::Evaluate { run, fits } => {
            let agg = commands::evaluate(run.input()?, &fits, run.output_dir()?)?;
            println!(
                "replicates={} fdr={:.4} tpr={:.4} mse_total={:.4}",
                agg.replicates, agg.fdr, agg.tpr, agg.mse_total
            );
            Ok(())
        }
        Command::Rank { run, top } => {
            if top.is_empty() {
                bail!("--top needs at least one size");
            }
            commands::rank(run.input()?, &top, run.output_dir()?)
        }
        Command::Bench { run, also, methods } => {
            let base = run.config()?;
            let mut scenarios = vec![base.scenario()?];
            for path in &also {
                let file = ConfigFile::load(path)?;
                scenarios.push(file.or(&ConfigFile::defaults()).scenario()?);
            }
            let names = if methods.is_empty() {
                vec![base.method_name().to_string()]
            } else {
                methods
            };
            let opts = names
                .into_iter()
                .map(|m| {
                    FitOptions::from_config(&ConfigFile {
                        method: Some(m),
                        ..base.clone()
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            for row in commands::bench(&scenarios, &opts, run.output_dir()?)? {
                println!(
                    "{} {} mean {:.3} s ({:.4} min)",
                    row.method, row.scenario, row.mean_seconds, row.mean_minutes
                );
            }
            Ok(())
        }
    }
}
