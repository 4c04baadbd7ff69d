use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skewfold_cli::{execute, resolve_out_dir, CliError, Report, Scenario, ScenarioConfig};

/// Skew-unfolding scenarios: simulate, verify and list.
#[derive(Debug, Parser)]
#[command(name = "skewfold", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write its path samples and report.
    Simulate(RunArgs),
    /// Run a scenario and exit with status 1 if any check fails.
    Verify(RunArgs),
    /// List the available scenarios.
    List,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario name, as shown by `list`.
    scenario: String,
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config and the SKEWFOLD_OUT variable.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

fn run(args: &RunArgs) -> Result<Report, CliError> {
    let scenario: Scenario = args.scenario.parse()?;
    let mut config = ScenarioConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.workers.is_some() {
        config.workers = args.workers;
    }
    let out = resolve_out_dir(args.out.as_deref(), &config);
    let report = execute(scenario, &config, &out)?;
    print_summary(&report, &out);
    Ok(report)
}

fn print_summary(report: &Report, out: &std::path::Path) {
    for c in &report.checks {
        println!(
            "{} {}: estimate {} target {} tolerance {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.estimate,
            c.target,
            c.tolerance
        );
    }
    println!(
        "{} {} in {:.2}s, outputs in {}",
        report.scenario,
        if report.pass { "passed" } else { "failed" },
        report.wall_clock_seconds,
        out.display()
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for s in Scenario::ALL {
                println!("{:<20} {}", s.name(), s.description());
            }
            ExitCode::SUCCESS
        }
        Command::Simulate(args) => match run(&args) {
            Ok(_) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Command::Verify(args) => match run(&args) {
            Ok(report) if report.pass => ExitCode::SUCCESS,
            Ok(_) => ExitCode::from(1),
            Err(e) => fail(e),
        },
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}
