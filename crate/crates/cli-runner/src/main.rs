use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cli_runner::{exit, Format};

#[derive(Parser)]
#[command(name = "invlab", version, about = "Invariant-measure experiments on Markov processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config and print its resolved form.
    Validate { config: PathBuf },
    /// Execute a config and write artifacts plus a manifest.
    Run { config: PathBuf },
    /// Summarize a finished run.
    Report {
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match cli_runner::validate_path(&config) {
            Ok(cfg) => {
                print!("{}", cfg.to_json());
                code(exit::SUCCESS)
            }
            Err(errs) => {
                eprintln!("{errs}");
                code(exit::VALIDATION)
            }
        },
        Command::Run { config } => {
            let cfg = match cli_runner::validate_path(&config) {
                Ok(cfg) => cfg,
                Err(errs) => {
                    eprintln!("{errs}");
                    return code(exit::VALIDATION);
                }
            };
            let dir = cli_runner::effective_output_dir(&cfg);
            match cli_runner::run(&cfg, &dir) {
                Ok(manifest) => {
                    for op in &manifest.operations {
                        if let Some(e) = &op.error {
                            eprintln!("{}: {e}", op.id);
                        }
                    }
                    println!("{}", dir.join(cli_runner::run::MANIFEST_FILE).display());
                    code(if manifest.all_succeeded() { exit::SUCCESS } else { exit::RUNTIME })
                }
                Err(e) => {
                    eprintln!("cannot write to {}: {e}", dir.display());
                    code(exit::RUNTIME)
                }
            }
        }
        Command::Report { manifest, format } => match cli_runner::report(&manifest, format) {
            Ok(text) => {
                print!("{text}");
                code(exit::SUCCESS)
            }
            Err(e) => {
                eprintln!("{e}");
                code(exit::RUNTIME)
            }
        },
    }
}
