use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use krein_lab::config::{Command, ConfigFile, ExperimentConfig, Overrides};
use krein_lab::LabError;

/// Kreĭn resolvent experiments on finite truncations.
#[derive(Debug, Parser)]
#[command(name = "krein-lab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.json and tables.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
}

fn exit_for(err: &LabError) -> ExitCode {
    match err {
        LabError::Config(_) | LabError::UnknownFamily(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        krein_lab::configure_threads()?;
        let file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
        let flags = Overrides { seed: cli.seed, tol: cli.tol, out_dir: cli.out.clone() };
        let cfg = ExperimentConfig::resolve(cli.command, file, flags)?;
        krein_lab::run(&cfg)
    })();
    match result {
        Ok(report) => {
            for line in report.summary_lines() {
                println!("{line}");
            }
            for note in &report.notes {
                println!("note: {note}");
            }
            println!("report: {}", report.config_echo.out_dir.join("report.json").display());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
