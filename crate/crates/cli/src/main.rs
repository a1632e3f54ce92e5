use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lcr_cli::config::{ExperimentSpec, FileConfig, Overrides, Scenario};
use lcr_cli::error::CliError;
use lcr_cli::run::run;
use lcr_core::channel::LayoutPreset;

#[derive(Parser)]
#[command(name = "ris-lcr", version, about = "Level crossing rates of RIS-assisted links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write CSV curves plus a run.json manifest.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    A,
    B,
    C,
}

#[derive(clap::Args)]
struct RunArgs {
    scenario: Scenario,
    /// TOML file; command-line flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores). Outputs do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Total Monte Carlo samples per curve, split across replicates.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum, ignore_case = true)]
    layout: Option<LayoutArg>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Power factor applied to the dominant link for the shadowed curve.
    #[arg(long)]
    shadow_dominant: Option<f64>,
}

fn execute(args: RunArgs) -> Result<bool, CliError> {
    let file = args.config.as_deref().map(FileConfig::load).transpose()?;
    let flags = Overrides {
        seed: args.seed,
        threads: args.threads,
        samples: args.samples,
        layout: args.layout.map(|l| match l {
            LayoutArg::A => LayoutPreset::A,
            LayoutArg::B => LayoutPreset::B,
            LayoutArg::C => LayoutPreset::C,
        }),
        out: args.out,
        shadow_dominant: args.shadow_dominant,
    };
    let spec = ExperimentSpec::resolve(args.scenario, file, &flags)?;
    let report = run(&spec)?;
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(report.all_passed)
}

fn main() -> ExitCode {
    let Command::Run(args) = Cli::parse().command;
    match execute(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some checks failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
