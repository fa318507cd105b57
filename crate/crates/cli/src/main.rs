use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use medq_cli::commands::{self, GenerateArgs};
use medq_cli::{CliError, ExperimentConfig, Overrides};

#[derive(Debug, Parser)]
#[command(name = "medq", version, about = "Train and benchmark multi-encoding reuploading classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a dataset CSV and its provenance sidecar.
    Generate(GenerateArgs),
    /// Run one training and write its result JSON.
    Train(Overrides),
    /// Score a stored training result.
    Evaluate {
        /// JSON written by `train`.
        #[arg(long)]
        result: PathBuf,
        /// Dataset CSV; defaults to the test set of the stored config.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Grid search over learning rate and register size.
    GridSearch(Overrides),
    /// Sweep layer counts for each model with a grid search per cell.
    Benchmark(Overrides),
    /// Print the fully resolved config as TOML.
    ShowConfig(Overrides),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("MEDQ_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("MEDQ_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Generate(args) => {
            commands::generate(&args)?;
        }
        Command::Train(o) => {
            let cfg = ExperimentConfig::resolve(&o)?;
            let env = commands::train(&cfg)?;
            commands::write_result(&env, cfg.output.as_deref())?;
        }
        Command::Evaluate { result, data, output } => {
            let env = commands::evaluate_result(&result, data.as_deref())?;
            commands::write_result(&env, output.as_deref())?;
        }
        Command::GridSearch(o) => {
            let cfg = ExperimentConfig::resolve(&o)?;
            let env = commands::grid(&cfg)?;
            commands::write_result(&env, cfg.output.as_deref())?;
        }
        Command::Benchmark(o) => {
            let cfg = ExperimentConfig::resolve(&o)?;
            let env = commands::benchmark(&cfg)?;
            commands::write_benchmark(&env, cfg.output.as_deref())?;
        }
        Command::ShowConfig(o) => {
            let cfg = ExperimentConfig::resolve(&o)?;
            print!("{}", toml::to_string(&cfg).map_err(|e| CliError::Config(e.to_string()))?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
