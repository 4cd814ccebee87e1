//! Config-driven experiment runner for the Vilenkin toolkit.
//!
//! Every subcommand reads one JSON config, runs its checks and writes
//! deterministic CSV/JSON artifacts into an output directory. The process
//! exit code is 0 when every check passes, 1 when a check fails and 2 for
//! configuration or I/O problems.

pub mod bench;
pub mod config;
pub mod converge;
pub mod error;
pub mod kernel_scan;
pub mod oscillation;
pub mod output;
pub mod report;
pub mod verify;

use std::path::{Path, PathBuf};

pub use config::{ConfigFile, ExperimentConfig, Overrides};
pub use error::{exit, CliError};
pub use report::{RunReport, SuiteResult};

/// The subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Converge,
    KernelScan,
    Oscillation,
    Bench,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Verify => "verify",
            Self::Converge => "converge",
            Self::KernelScan => "kernel-scan",
            Self::Oscillation => "oscillation",
            Self::Bench => "bench",
        }
    }

    /// Suite names accepted by `--suites` for this command.
    pub fn suites(self) -> &'static [&'static str] {
        match self {
            Self::Verify => verify::SUITES,
            Self::Converge => &["convergence"],
            Self::KernelScan => &["bound_stability", "dirichlet_combination"],
            Self::Oscillation => &["oscillation_invariants", "jensen"],
            Self::Bench => &["transform_equality"],
        }
    }

    /// Files written into the output directory.
    pub fn artifacts(self) -> &'static [&'static str] {
        match self {
            Self::Verify => &["verify_report.json"],
            Self::Converge => &["converge.csv", "converge_summary.json"],
            Self::KernelScan => &["kernel_scan.csv", "kernel_scan_summary.json"],
            Self::Oscillation => &["oscillation.csv", "oscillation_summary.json"],
            Self::Bench => &["bench.json"],
        }
    }
}

/// Loads the config at `config_path`, runs `command` and writes its
/// artifacts into `out_dir`.
pub fn execute(
    command: Command,
    config_path: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<RunReport, CliError> {
    let config = ExperimentConfig::load(config_path, overrides)?;
    run_loaded(command, &config, out_dir)
}

/// Runs `command` on an already validated config.
pub fn run_loaded(
    command: Command,
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<RunReport, CliError> {
    config.check_suites(command.suites())?;
    let dir = config::prepare_out_dir(out_dir)?;
    let path = |name: &str| -> PathBuf { dir.join(name) };
    let files = command.artifacts();
    let select = |report: RunReport| select_suites(command, config, report);
    match command {
        Command::Verify => {
            let report = verify::run(config);
            output::write_json(&path(files[0]), &report)?;
            Ok(report)
        }
        Command::Converge => {
            let (report, table) = converge::run(config)?;
            let report = select(report);
            table.write(&path(files[0]))?;
            output::write_json(&path(files[1]), &report)?;
            Ok(report)
        }
        Command::KernelScan => {
            let (report, table) = kernel_scan::run(config)?;
            let report = select(report);
            table.write(&path(files[0]))?;
            output::write_json(&path(files[1]), &report)?;
            Ok(report)
        }
        Command::Oscillation => {
            let (report, table) = oscillation::run(config)?;
            let report = select(report);
            table.write(&path(files[0]))?;
            output::write_json(&path(files[1]), &report)?;
            Ok(report)
        }
        Command::Bench => {
            let (report, _) = bench::run(config)?;
            let report = select(report);
            output::write_json(&path(files[0]), &report)?;
            Ok(report)
        }
    }
}

/// Keeps only the selected suites of a command that computes all of them
/// together; `verify` skips unselected suites itself.
fn select_suites(command: Command, config: &ExperimentConfig, mut report: RunReport) -> RunReport {
    if command == Command::Verify || config.suites.is_empty() {
        return report;
    }
    let suites = std::mem::take(&mut report.suites);
    report.passed = true;
    report.exit_code = exit::PASS;
    for s in suites.into_iter().filter(|s| config.selected(&s.name)) {
        report.push(s);
    }
    report
}

/// Maps a run outcome to the process exit code. A core error means the
/// configured parameters were rejected before any check could run.
pub fn exit_code(result: &Result<RunReport, CliError>) -> u8 {
    match result {
        Ok(report) => report.exit_code,
        Err(_) => exit::CONFIG,
    }
}
