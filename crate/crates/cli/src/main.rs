//! `locstat`: runs scenario configs against the locstat toolkit.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 the config is
//! invalid, 3 a model or I/O error stopped the run.

mod config;
mod experiments;
mod model;
mod presets;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Diagnostic, ScenarioConfig};
use report::{write_outputs, RunReport};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INVALID_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "locstat",
    version,
    about = "Locally stationary Markov chain experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a config and run its experiment.
    Run {
        #[command(flatten)]
        source: Source,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long, env = "LOCSTAT_THREADS")]
        threads: Option<usize>,
    },
    /// Print every diagnostic for a config without running it.
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// List the built-in presets, or print one as TOML.
    ListPresets {
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario file in TOML.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset name.
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> Result<ScenarioConfig, Diagnostic> {
        match (&self.config, &self.preset) {
            (Some(path), _) => ScenarioConfig::load(path),
            (None, Some(name)) => match presets::find(name) {
                Some(p) => ScenarioConfig::from_toml(p.toml),
                None => Err(Diagnostic {
                    path: "preset".into(),
                    message: format!("unknown preset {name:?}"),
                }),
            },
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            source,
            seed,
            out,
            threads,
        } => run(&source, seed, out, threads),
        Command::Validate { source } => validate(&source),
        Command::ListPresets { show } => list_presets(show.as_deref()),
    }
}

/// Loads and validates, printing diagnostics to stderr on failure.
fn load_valid(source: &Source) -> Result<ScenarioConfig, ExitCode> {
    let config = source.load().map_err(|d| {
        eprintln!("{d}");
        ExitCode::from(EXIT_INVALID_CONFIG)
    })?;
    let diags = config.validate();
    if diags.is_empty() {
        Ok(config)
    } else {
        for d in &diags {
            eprintln!("{d}");
        }
        Err(ExitCode::from(EXIT_INVALID_CONFIG))
    }
}

fn validate(source: &Source) -> ExitCode {
    match load_valid(source) {
        Ok(_) => {
            println!("no diagnostics");
            ExitCode::SUCCESS
        }
        Err(code) => code,
    }
}

fn run(
    source: &Source,
    seed: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
) -> ExitCode {
    let mut config = match load_valid(source) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(dir) = out {
        config.output_dir = dir;
    }
    if let Some(t) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("cannot configure {t} threads: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    let outcome = match experiments::run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    let report = RunReport::new(&config, outcome.checks, &outcome.tables);
    if let Err(e) = write_outputs(
        &config.output_dir,
        &report,
        &outcome.tables,
        &outcome.timings,
    ) {
        eprintln!("cannot write to {}: {e}", config.output_dir.display());
        return ExitCode::from(EXIT_RUNTIME);
    }
    for c in &report.checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {} statistic={} threshold={}",
            c.id, c.statistic, c.threshold
        );
    }
    println!(
        "report: {}",
        config.output_dir.join("report.json").display()
    );
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn list_presets(show: Option<&str>) -> ExitCode {
    match show {
        Some(name) => match presets::find(name) {
            Some(p) => {
                print!("{}", p.toml);
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("unknown preset {name:?}");
                ExitCode::from(EXIT_INVALID_CONFIG)
            }
        },
        None => {
            for p in presets::PRESETS {
                println!("{:<18} {}", p.name, p.summary);
            }
            ExitCode::SUCCESS
        }
    }
}
