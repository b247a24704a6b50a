use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use coded_pc::analysis::Figure;
use coded_pc::cli;
use coded_pc::config::Config;
use coded_pc::Error;

#[derive(Parser)]
#[command(version, about = "Private linear and polynomial computation over coded storage")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed, overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of seeds, overrides `run.trials`.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Figure id for `figure`: fig4a, fig4b, fig5a or fig5b.
    #[arg(long, global = true)]
    figure: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form rates and converse bound.
    Rates,
    /// Simulate retrievals and report measured rates.
    Simulate,
    /// Run the invariant suites.
    Verify,
    /// Figure data next to the reference values.
    Figure,
}

fn load(args: &Args) -> anyhow::Result<Config> {
    let path = args.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut cfg = Config::load(path)?;
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    if let Some(trials) = args.trials {
        if trials == 0 {
            return Err(Error::Config("--trials must be positive".into()).into());
        }
        cfg.run.trials = trials;
    }
    Ok(cfg)
}

fn output(args: &Args, cfg: Option<&Config>) -> anyhow::Result<Box<dyn Write>> {
    let path = args.out.clone().or_else(|| cfg.and_then(|c| c.run.output.clone()).map(PathBuf::from));
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(args: &Args) -> anyhow::Result<i32> {
    match args.command {
        Command::Rates => {
            let cfg = load(args)?;
            cli::cmd_rates(&cfg, output(args, Some(&cfg))?)?;
        }
        Command::Simulate => {
            let cfg = load(args)?;
            let reports = cli::cmd_simulate(&cfg, output(args, Some(&cfg))?)?;
            eprintln!("{} runs recovered", reports.len());
        }
        Command::Verify => {
            let cfg = load(args)?;
            let report = cli::cmd_verify(&cfg, output(args, Some(&cfg))?)?;
            return Ok(report.exit_code());
        }
        Command::Figure => {
            let id = args.figure.as_deref().ok_or_else(|| Error::Config("--figure is required".into()))?;
            let which: Figure = id.parse()?;
            let data = cli::cmd_figure(which, output(args, None)?)?;
            for d in &data.deltas {
                eprintln!("{} vs {}: max |delta| = {:.3e} over {} points", d.series, d.fixture, d.max_abs_delta, d.points.len());
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(1, Error::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
