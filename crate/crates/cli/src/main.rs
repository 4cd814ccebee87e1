use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vilenkin_cli::{exit_code, Command, Overrides};

#[derive(Debug, Parser)]
#[command(
    name = "vilenkin",
    version,
    about = "Fourier analysis experiments on bounded Vilenkin groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Exact identity suites: group laws, characters, binomials, kernels.
    Verify(Common),
    /// Sup-norm error of Cesaro means of negative order against the hypotheses.
    Converge(Common),
    /// Ratio scans of the kernel bounds with stability checks.
    KernelScan(Common),
    /// Per-scale oscillation profile of the configured function.
    Oscillation(Common),
    /// Naive against fast forward transform timing.
    Bench(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long, env = "VILENKIN_CONFIG")]
    config: PathBuf,
    /// Output directory, created when missing.
    #[arg(long, env = "VILENKIN_OUT", default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, env = "VILENKIN_SEED")]
    seed: Option<u64>,
    /// Comma-separated suite names to run.
    #[arg(long, env = "VILENKIN_SUITES", value_delimiter = ',')]
    suites: Option<Vec<String>>,
    /// Overrides the cap on M_N.
    #[arg(long, env = "VILENKIN_MAX_CELLS")]
    max_cells: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                vilenkin_cli::exit::CONFIG
            } else {
                0
            });
        }
    };
    let (command, common) = match cli.command {
        Sub::Verify(c) => (Command::Verify, c),
        Sub::Converge(c) => (Command::Converge, c),
        Sub::KernelScan(c) => (Command::KernelScan, c),
        Sub::Oscillation(c) => (Command::Oscillation, c),
        Sub::Bench(c) => (Command::Bench, c),
    };
    let overrides = Overrides {
        seed: common.seed,
        suites: common.suites,
        max_cells: common.max_cells,
    };
    let result = vilenkin_cli::execute(command, &common.config, &common.out, &overrides);
    match &result {
        Ok(report) => {
            print!("{}", report.render());
            let verdict = if report.passed { "PASS" } else { "FAIL" };
            println!("{verdict} {} -> {}", command.name(), common.out.display());
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result))
}
