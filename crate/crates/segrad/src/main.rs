use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use segrad::commands::{
    cmd_equilibria, cmd_figures, cmd_invasion, cmd_simulate, cmd_sweep, Overrides, SweepKind,
};
use segrad::{CliError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "segrad", version, about = "Segregation and replacement fronts in competitive reaction-diffusion systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Start from a packaged scenario instead of a file (default case1).
    #[arg(long, global = true, conflicts_with = "config")]
    scenario: Option<String>,

    /// Output directory.
    #[arg(long, global = true, env = "SEGRAD_OUT")]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    dt: Option<f64>,

    #[arg(long, global = true)]
    dx: Option<f64>,

    #[arg(long = "t-end", global = true)]
    t_end: Option<f64>,

    /// Competition coefficient.
    #[arg(long, global = true)]
    c: Option<f64>,

    /// Suppress the JSON report on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Equilibria, stability and competition conditions on each side.
    Equilibria,
    /// Invasion coefficients, thresholds, front and bubble data.
    Invasion {
        /// Also write front and bubble profile CSVs.
        #[arg(long)]
        profiles: bool,
    },
    /// Run one simulation with snapshots.
    Simulate,
    /// Regenerate packaged scenario data (`all` for every scenario).
    Figures {
        #[arg(required = true)]
        names: Vec<String>,
    },
    /// Competition-strength study, or a release-width probe with --widths.
    Sweep {
        #[arg(long = "c-values", value_delimiter = ',', default_values_t = [10.0, 100.0, 1000.0])]
        c_values: Vec<f64>,
        /// Comparison time for the competition study.
        #[arg(long, default_value_t = 20.0)]
        time: f64,
        #[arg(long, value_delimiter = ',')]
        widths: Option<Vec<f64>>,
    },
}

fn print_json<T: Serialize>(quiet: bool, value: &T) {
    if !quiet {
        println!("{}", serde_json::to_string_pretty(value).expect("serializable report"));
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let overrides = Overrides {
        dt: cli.dt,
        dx: cli.dx,
        t_end: cli.t_end,
        c: cli.c,
    };
    let mut cfg = match (&cli.config, &cli.scenario) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(name)) => RunConfig::packaged(name)?,
        (None, None) => RunConfig::packaged("case1")?,
    };
    overrides.apply(&mut cfg)?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("segrad-out"));
    let out: &Path = &out;

    match cli.command {
        Command::Equilibria => print_json(cli.quiet, &cmd_equilibria(&cfg)?),
        Command::Invasion { profiles } => {
            print_json(cli.quiet, &cmd_invasion(&cfg, profiles.then_some(out))?)
        }
        Command::Simulate => print_json(cli.quiet, &cmd_simulate(&cfg, out)?),
        Command::Figures { names } => {
            let summaries = cmd_figures(&names, &overrides, out)?;
            if !cli.quiet {
                for s in &summaries {
                    println!(
                        "{:<8} {:<30} expected {:<30} resolved {}",
                        s.scenario,
                        s.outcome.unwrap_or("unclassified"),
                        s.expected.unwrap_or("-"),
                        s.resolved
                    );
                }
            }
        }
        Command::Sweep { c_values, time, widths } => {
            let kind = match widths {
                Some(widths) => SweepKind::ReleaseWidth { widths },
                None => SweepKind::Competition { c_values, time },
            };
            print_json(cli.quiet, &cmd_sweep(&cfg, &kind, out)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
