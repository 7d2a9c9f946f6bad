use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use plcvlc::sweep::{self, Family, SweepSpec, SweepVar, ValidationReport};
use plcvlc::{load_config, Config, Error};

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "plcvlc",
    version,
    about = "PLC / DF relay / VLC link analysis with Monte Carlo cross-checks"
)]
struct Cli {
    /// Parameter file (`key = value` lines); defaults apply to absent keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Monte Carlo trials per estimate.
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Half-duplex time-sharing factor theta in (0, 1].
    #[arg(long, global = true)]
    duplex_factor: Option<f64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic and simulated metrics at the configured point.
    Eval,
    /// Sweep one parameter, optionally for several values of a second.
    Sweep {
        #[arg(long)]
        var: SweepVar,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        /// Family curves as `name=v1,v2,...`.
        #[arg(long)]
        family: Option<Family>,
    },
    /// Check every analytic metric against simulation; exit 1 on disagreement.
    Validate,
    /// Run one of the preset figure sweeps (2, 3, 4 or 5) and check its trends.
    Figure { number: u8 },
}

enum Failure {
    Config(anyhow::Error),
    Validation(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn effective_config(cli: &Cli) -> Result<Config, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)
            .with_context(|| format!("loading {}", path.display()))
            .map_err(Failure::Config)?,
        None => Config::default(),
    };
    if let Some(t) = cli.trials {
        cfg.mc.trials = t;
    }
    if let Some(s) = cli.seed {
        cfg.mc.seed = s;
    }
    if let Some(theta) = cli.duplex_factor {
        cfg.system.duplex_factor = theta;
    }
    cfg.validate().map_err(|e| Failure::Config(e.into()))?;
    Ok(cfg)
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_text(cfg: &Config, report: &ValidationReport) -> String {
    let mut out = String::new();
    for line in cfg.echo_lines() {
        out.push_str(&format!("# {line}\n"));
    }
    for c in &report.comparisons {
        out.push_str(&format!("{c}\n"));
    }
    out
}

fn spec_error(e: Error) -> Failure {
    match e {
        Error::InvalidArgument(_) | Error::Validation { .. } | Error::Config { .. } => {
            Failure::Config(e.into())
        }
        other => Failure::Other(other.into()),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let cfg = effective_config(cli)?;
    match &cli.command {
        Command::Eval => {
            let report = sweep::evaluate(&cfg.system, &cfg.mc).map_err(spec_error)?;
            emit(cli, &report_text(&cfg, &report))?;
        }
        Command::Validate => {
            let report = sweep::validate(&cfg.system, &cfg.mc).map_err(spec_error)?;
            emit(cli, &report_text(&cfg, &report))?;
            let failed: Vec<_> = report.failures().map(|c| c.label.clone()).collect();
            if !failed.is_empty() {
                return Err(Failure::Validation(format!(
                    "disagreement in {}",
                    failed.join(", ")
                )));
            }
        }
        Command::Sweep {
            var,
            from,
            to,
            steps,
            family,
        } => {
            let spec = SweepSpec {
                variable: *var,
                start: *from,
                stop: *to,
                steps: *steps,
                family: family.clone(),
            };
            let report = sweep::run_sweep(&spec, &cfg.system, &cfg.mc).map_err(spec_error)?;
            emit(cli, &report.to_csv(&cfg.echo_lines()))?;
        }
        Command::Figure { number } => {
            let preset = sweep::figure_preset(*number).map_err(spec_error)?;
            let report =
                sweep::run_sweep(&preset.spec, &cfg.system, &cfg.mc).map_err(spec_error)?;
            let mut echo = vec![format!("figure = {}  # {}", preset.number, preset.title)];
            echo.extend(cfg.echo_lines());
            emit(cli, &report.to_csv(&echo))?;
            let disagreements = report
                .records
                .iter()
                .filter(|r| !(r.capacity_agrees() && r.outage_agrees()))
                .count();
            if disagreements > 0 {
                eprintln!(
                    "note: {disagreements} of {} points outside {} standard errors",
                    report.records.len(),
                    sweep::AGREEMENT_SIGMAS
                );
            }
            let problems = sweep::check_trends(&report, &preset.trends);
            if !problems.is_empty() {
                for p in &problems {
                    eprintln!("trend: {p}");
                }
                return Err(Failure::Validation(format!(
                    "{} trend violations",
                    problems.len()
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
