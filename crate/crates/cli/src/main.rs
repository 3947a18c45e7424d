use std::fs::File;
use std::io::{self, BufReader};
use std::process::ExitCode;

use clap::Parser;
use mtnlp_cli::{run_models, run_parse, run_serve, Cli, CliError, Command};
use tracing_subscriber::EnvFilter;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Serve(args) => {
            tracing_subscriber::fmt()
                .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
                .with_writer(io::stderr)
                .init();
            run_serve(args)
        }
        Command::Parse(args) => {
            let stdout = io::stdout().lock();
            match &args.input {
                Some(path) => match File::open(path) {
                    Ok(file) => run_parse(args, BufReader::new(file), stdout),
                    Err(e) => Err(CliError::Io(io::Error::new(e.kind(), format!("{}: {}", path.display(), e)))),
                },
                None => run_parse(args, io::stdin().lock(), stdout),
            }
        }
        Command::Models(args) => run_models(args, io::stdout().lock()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mtnlp: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}
