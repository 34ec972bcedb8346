use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use udwi::{
    run, run_verify, CliError, CliResult, Command, ModeSetting, ScenarioConfig, VerifyOptions,
};

/// Two-path interference of single-particle pulses seen by classical and
/// Unruh-DeWitt detectors.
#[derive(Debug, Parser)]
#[command(name = "udwi", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the mode given in the scenario file.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<ModeSetting>,
    /// Suppress warnings and timing on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Classical detector pattern.
    Classical(ConfigArg),
    /// Eternally coupled detector pattern.
    Udw(ConfigArg),
    /// Gaussian-switched ensemble pattern.
    Ensemble(ConfigArg),
    /// Three-outcome probabilities for a detector at each port.
    Povm(ConfigArg),
    /// Naive golden-rule pattern next to the quantum and classical ones.
    Goldenrule(ConfigArg),
    /// Run the self-verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Replace the time-integral coefficient used by the discrepancy probe.
    #[arg(long, hide = true)]
    inject_coefficient: Option<f64>,
}

fn parse_mode(s: &str) -> Result<ModeSetting, String> {
    s.parse::<ModeSetting>().map_err(|e| e.to_string())
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    let (command, config) = match &cli.command {
        Sub::Classical(a) => (Command::Classical, &a.config),
        Sub::Udw(a) => (Command::Udw, &a.config),
        Sub::Ensemble(a) => (Command::Ensemble, &a.config),
        Sub::Povm(a) => (Command::Povm, &a.config),
        Sub::Goldenrule(a) => (Command::Goldenrule, &a.config),
        Sub::Verify(v) => return verify(cli, v),
    };
    let mut cfg = ScenarioConfig::load(config)?;
    if let Some(mode) = cli.mode {
        cfg.mode = Some(mode);
    }
    let output = run(command, &cfg)?;
    if !cli.quiet {
        for w in &output.warnings {
            eprintln!("warning: {w}");
        }
    }
    write_output(cli.out.as_deref(), &output.csv)
}

fn verify(cli: &Cli, args: &VerifyArgs) -> CliResult<()> {
    let mut opts = VerifyOptions::default();
    if let Some(c) = args.inject_coefficient {
        opts.time_coefficient = c;
    }
    let start = Instant::now();
    let report = run_verify(&opts)?;
    write_output(cli.out.as_deref(), &report.render())?;
    if !cli.quiet {
        eprintln!("verify finished in {:.2} s", start.elapsed().as_secs_f64());
    }
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(CliError::Numeric(format!("check {} failed", c.name))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("udwi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
