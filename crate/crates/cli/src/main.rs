use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use icc_region::{execute, CliError, Mode, Overrides, RunConfig};

/// Rate regions of the Gaussian interference channel with conferencing
/// transmitters.
#[derive(Debug, Parser)]
#[command(name = "icc-region", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mode (overrides `mode`).
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Sweep grid resolution (overrides `sweep.resolution`).
    #[arg(long)]
    resolution: Option<usize>,
    /// Skip the SVG plot.
    #[arg(long)]
    no_plot: bool,
}

fn run(args: &Args) -> Result<String, CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    cfg.apply(&Overrides {
        mode: args.mode,
        out: args.out.clone(),
        resolution: args.resolution,
        no_plot: args.no_plot,
    });
    Ok(execute(&cfg)?.render())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!(
                "{}",
                CliError::validation("args", first.trim_start_matches("error: ")).reason_line()
            );
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&args) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.reason_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
