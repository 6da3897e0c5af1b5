use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use duality_cli::{run, AnalysisConfig, CliError, Method};
use duality_core::StatisBasis;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Basis {
    Covv,
    Rv,
}

/// Duality-diagram analyses of CSV tables.
#[derive(Debug, Parser)]
#[command(name = "ddtool", version)]
struct Args {
    method: Method,
    /// Input table(s); pcaiv takes the explanatory table first.
    #[arg(long = "input", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// One-column CSV of row weights (rescaled to sum to 1).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Number of axes to report.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, value_enum, default_value = "rv")]
    statis_basis: Basis,
    /// Output directory, created if missing.
    #[arg(long, default_value = "ddtool_out")]
    out: PathBuf,
    /// Also write SVG figures.
    #[arg(long)]
    plots: bool,
    #[arg(long)]
    seed: Option<u64>,
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json_line());
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DDTOOL_LOG", "off")).init();

    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let message: Vec<&str> = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            return fail(&CliError::Usage(message.join(" ").trim_start_matches("error: ").to_string()));
        }
    };

    let config = AnalysisConfig {
        method: args.method,
        inputs: args.inputs,
        weights: args.weights,
        rank: args.rank,
        statis_basis: match args.statis_basis {
            Basis::Covv => StatisBasis::Covv,
            Basis::Rv => StatisBasis::Rv,
        },
        output_dir: args.out,
        emit_plots: args.plots,
        seed: args.seed,
    };
    match run(&config) {
        Ok(report) => {
            log::info!("wrote {} files to {}", report.files.len(), config.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
