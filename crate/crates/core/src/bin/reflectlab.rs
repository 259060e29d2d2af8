use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use reflectlab::config::ExperimentSpec;
use reflectlab::report::{self, ErrorReport};
use reflectlab::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Limits,
    Simulate,
    Verify,
    PlotData,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Limits => "limits",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
            Command::PlotData => "plot-data",
        }
    }
}

/// Limit laws, simulation and verification for reflected Lévy processes.
#[derive(Debug, Parser)]
#[command(name = "reflectlab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Output file (default depends on the command).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides sim.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads. Affects speed only.
    #[arg(long)]
    workers: Option<usize>,
    /// Print the result (or the error) as JSON on stdout.
    #[arg(long)]
    json: bool,
    /// simulate: first sample index (overrides sim.start).
    #[arg(long)]
    start: Option<u64>,
    /// simulate: number of samples (overrides sim.n).
    #[arg(long)]
    count: Option<u64>,
}

fn run(cli: &Cli) -> Result<(String, bool), Error> {
    let mut spec = ExperimentSpec::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        spec.sim.seed = seed;
    }
    if let Some(start) = cli.start {
        spec.sim.start = start;
    }
    if let Some(count) = cli.count {
        spec.sim.n = count;
    }
    let out = cli.out.clone().unwrap_or_else(|| report::default_out(cli.command.name()));
    report::with_workers(cli.workers, || match cli.command {
        Command::Limits => {
            let r = report::run_limits(&spec, Some(&out))?;
            Ok((report::to_json(&r), true))
        }
        Command::Simulate => {
            let rows = report::run_simulate(&spec, &out)?;
            Ok((format!("{{\"rows\": {rows}, \"out\": {:?}}}\n", out.display().to_string()), true))
        }
        Command::Verify => {
            let (verdicts, json) = report::write_verify(&spec, Some(&out))?;
            Ok((json, verdicts.iter().all(|v| v.pass)))
        }
        Command::PlotData => {
            let rows = report::run_plot_data(&spec, &out)?;
            Ok((format!("{{\"rows\": {rows}, \"out\": {:?}}}\n", out.display().to_string()), true))
        }
    })?
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((summary, ok)) => {
            if cli.json {
                print!("{summary}");
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                print!("{}", report::to_json(&ErrorReport::from(&e)));
            } else {
                eprintln!("error[{}]: {e}", e.kind());
            }
            ExitCode::from(2)
        }
    }
}
