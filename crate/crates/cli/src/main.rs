use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use loschmidt_cli::{run, CliError, RunConfig};
use loschmidt_core::presets;

#[derive(Parser)]
#[command(name = "loschmidt", version, about = "Fidelity amplitude estimators for kicked quantum maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the estimators described by a TOML configuration file.
    Run {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the built-in scenarios.
    Scenarios,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scenarios => {
            for name in presets::names() {
                let s = presets::load(name)?;
                println!("{name:20} {}", s.description);
            }
            Ok(())
        }
        Command::Run { config, output_dir, seed, threads } => {
            if let Some(t) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global()
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            let mut cfg = RunConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let dir = output_dir.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
            let report = run(&cfg, &dir)?;
            for c in &report.comparisons {
                println!(
                    "{:12} max |f - f_exact| = {:.3e} at step {} (band ratio {:.3})",
                    c.estimator, c.max_deviation, c.step_of_max, c.max_band_ratio
                );
            }
            println!("wrote {} files to {}", report.files.len(), report.output_dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
