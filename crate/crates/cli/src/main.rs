mod args;
mod commands;
mod error;
mod settings;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;
use settings::{FileConfig, Settings};

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let settings = Settings::new(file, cli.keep_self_links);
    if let Some(threads) = settings.threads(cli.threads) {
        if threads == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::config(e.to_string()))?;
    }
    match &cli.command {
        Command::BuildGraph(a) => commands::build_graph(a, &settings),
        Command::MergeGraphs(a) => commands::merge_graphs(a, &settings),
        Command::Estimate(a) => commands::estimate(a, &settings),
        Command::Evaluate(a) => commands::evaluate(a, &settings),
        Command::GridSearch(a) => commands::grid(a, &settings),
        Command::Correlate(a) => commands::correlate_scores(a, &settings),
        Command::Rank(a) => commands::rank(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::new("usage", e.render().to_string().trim_end());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => "error",
        (_, 0) => "info",
        (_, _) => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
