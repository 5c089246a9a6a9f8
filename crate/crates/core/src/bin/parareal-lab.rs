use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use parareal_core::experiments::{parse_config, run_experiment, write_outputs, ExperimentConfig, ExperimentId};
use parareal_core::Error;

#[derive(Parser)]
#[command(name = "parareal-lab", version, about = "Parareal error-propagation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for CSV, plot and metadata files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Recorded in the metadata; experiments themselves are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Skip gnuplot script generation.
    #[arg(long, global = true)]
    no_plots: bool,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment section of a config file.
    Run { config: PathBuf },
    /// List experiment ids.
    ListExperiments,
    /// Print the default config of an experiment.
    Defaults { experiment: String },
}

fn execute(cli: &Cli) -> Result<i32, Error> {
    match &cli.command {
        Command::ListExperiments => {
            for id in ExperimentId::ALL {
                println!("{:<32} {}", id.name(), id.description());
            }
            Ok(0)
        }
        Command::Defaults { experiment } => {
            let id = ExperimentId::from_name(experiment)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment `{experiment}`")))?;
            print!("{}", ExperimentConfig::defaults(id).to_text());
            Ok(0)
        }
        Command::Run { config } => {
            let text = std::fs::read_to_string(config)?;
            let configs = parse_config(&text)?;
            let mut code = 0;
            for cfg in &configs {
                log::info!("running {}", cfg.experiment.name());
                let out = run_experiment(cfg);
                for path in write_outputs(cfg, &out, &cli.out_dir, !cli.no_plots, cli.seed)? {
                    println!("{}", path.display());
                }
                if let Some(first) = out.failures.first() {
                    eprintln!(
                        "{}: {} row(s) failed; first: {}",
                        cfg.experiment.name(),
                        out.failures.len(),
                        first.message
                    );
                    if code == 0 {
                        code = first.exit_code;
                    }
                }
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot configure {jobs} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
