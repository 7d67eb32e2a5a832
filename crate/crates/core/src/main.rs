use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use girg_core::pipeline::{prepare_self_test, Pipeline, RunConfig, StageReport};
use girg_core::Result;

#[derive(Parser)]
#[command(name = "girg", version, about = "Fit, sample and classify geometric inhomogeneous random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit every configured model to every input network
    Fit(Common),
    /// Sample synthetic graphs from the fitted models
    Generate(Common),
    /// Extract feature vectors of real and synthetic graphs
    Features(Common),
    /// Numerical, variation and correlation cleaning per model
    Clean(Common),
    /// Misclassification rates per model and feature subset
    Classify(Common),
    /// All stages in order
    RunAll(Common),
    /// Run the pipeline on sampled GIRG targets against their own family
    SelfTest(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overrides the config
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated model ids, e.g. ER,2d,1-23
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    /// Semicolon-separated feature subsets, e.g. "n,m,diam;LCC"
    #[arg(long, value_delimiter = ';')]
    features: Option<Vec<String>>,
    /// Output directory, overrides the config
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::new(0),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(models) = &self.models {
            config.set_models(models)?;
        }
        if let Some(subsets) = &self.features {
            config.feature_subsets = subsets.clone();
        }
        if let Some(out) = &self.out {
            config.out = out.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn run(command: Command) -> Result<StageReport> {
    let (common, stage) = match &command {
        Command::Fit(c) => (c, "fit"),
        Command::Generate(c) => (c, "generate"),
        Command::Features(c) => (c, "features"),
        Command::Clean(c) => (c, "clean"),
        Command::Classify(c) => (c, "classify"),
        Command::RunAll(c) => (c, "run-all"),
        Command::SelfTest(c) => (c, "self-test"),
    };
    let mut config = common.config()?;
    if stage == "self-test" {
        prepare_self_test(&mut config)?;
    }
    let pipeline = Pipeline::new(config);
    let report = match stage {
        "fit" => pipeline.fit()?,
        "generate" => pipeline.generate()?,
        "features" => pipeline.features()?,
        "clean" => pipeline.clean()?,
        "classify" => pipeline.classify()?.1,
        _ => {
            let (table, report) = pipeline.run_all()?;
            print!("{}", table.to_csv()?);
            return Ok(report);
        }
    };
    pipeline.write_failures(&report)?;
    Ok(report)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) if report.failures.is_empty() => ExitCode::SUCCESS,
        Ok(report) => {
            for f in &report.failures {
                error!("{} {}: {}", f.stage, f.item, f.error);
            }
            ExitCode::from(2)
        }
        Err(e) => {
            error!("{e}");
            ExitCode::FAILURE
        }
    }
}
