use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wignerlab::scenarios::{execute, threads_from_env, ScenarioConfig, ScenarioKind};

#[derive(Parser)]
#[command(name = "wignerlab", version, about = "Run time-averaged Wigner pairing scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write `<scenario>.csv` and `<scenario>.json`.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the scenario catalog.
    List,
    /// Check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            for kind in ScenarioKind::ALL {
                println!("{:<22} {}", kind.name(), kind.describe());
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match ScenarioConfig::from_path(&config) {
            Ok(cfg) => {
                println!("{}: ok ({})", config.display(), cfg.scenario);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{}: invalid config\n{e}", config.display());
                ExitCode::from(2)
            }
        },
        Command::Run { config, out } => {
            let prepared = threads_from_env().and_then(|threads| Ok((ScenarioConfig::from_path(&config)?, threads)));
            let (cfg, threads) = match prepared {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("{}: invalid config\n{e}", config.display());
                    return ExitCode::from(2);
                }
            };
            match execute(&cfg, &out, threads) {
                Ok(report) => {
                    let s = &report.summary;
                    println!(
                        "{}: {} rows, max |error| {:.3e}, {} budget violations, all_pass {}",
                        s.scenario, s.rows, s.max_abs_error, s.budget_violations, s.all_pass
                    );
                    if s.all_pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
