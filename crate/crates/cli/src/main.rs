use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use wzchain::chain::RegionMode;
use wzchain::codec::Combiner;
use wzchain::harness::{
    cmd_bounds, cmd_chains, cmd_region, cmd_simulate, threads_from_env, ExperimentConfig,
    OutputFormat, RegionSweep, Strategy, THREADS_ENV,
};

/// Mean estimation with decoder side information: Monte Carlo simulation,
/// analytic bounds and chain planning.
#[derive(Parser)]
#[command(name = "wzchain", version, after_help = after_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn after_help() -> String {
    format!("Set {THREADS_ENV}=N to fix the number of worker threads.")
}

#[derive(Subcommand)]
enum Command {
    /// Compare the Wyner-Ziv and chained estimators by simulation (CSV).
    Simulate(Common),
    /// Closed-form bounds for the configured chains, no simulation.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "csv", value_parser = parse_str::<OutputFormat>)]
        format: OutputFormat,
    },
    /// Print the chains chosen by the strategy with their w and D values.
    Chains {
        #[command(flatten)]
        common: Common,
        /// Check ordering and acyclicity of the chains.
        #[arg(long)]
        validate: bool,
    },
    /// Sweep delta_i and report two-hop region membership (CSV).
    Region(RegionArgs),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML, or JSON as written by `bounds --format json`).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_str::<Strategy>)]
    strategy: Option<Strategy>,
    #[arg(long, value_parser = parse_str::<Combiner>)]
    combiner: Option<Combiner>,
    #[arg(long, value_parser = parse_str::<RegionMode>)]
    region_mode: Option<RegionMode>,
}

#[derive(Args)]
struct RegionArgs {
    /// Takes `n`, `delta_t` and `delta_ti` from a config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    delta_t: Option<f64>,
    #[arg(long)]
    delta_ti: Option<f64>,
    #[arg(long, default_value_t = RegionSweep::default().from)]
    from: f64,
    #[arg(long, default_value_t = RegionSweep::default().to)]
    to: f64,
    #[arg(long, default_value_t = RegionSweep::default().step)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_str<T: std::str::FromStr<Err = wzchain::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: wzchain::Error| e.to_string())
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = self.strategy {
            cfg.strategy = v;
        }
        if let Some(v) = self.combiner {
            cfg.combiner = v;
        }
        if let Some(v) = self.region_mode {
            cfg.region_mode = v;
        }
        if let Some(t) = threads_from_env()? {
            cfg.threads = Some(t);
        }
        Ok(cfg)
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(common) => {
            let cfg = common.load()?;
            emit(cfg.out.as_ref(), &cmd_simulate(&cfg)?)
        }
        Command::Bounds { common, format } => {
            let cfg = common.load()?;
            emit(cfg.out.as_ref(), &cmd_bounds(&cfg, format)?)
        }
        Command::Chains { common, validate } => {
            let cfg = common.load()?;
            emit(cfg.out.as_ref(), &cmd_chains(&cfg, validate)?)
        }
        Command::Region(args) => {
            let mut sweep = RegionSweep {
                from: args.from,
                to: args.to,
                step: args.step,
                ..RegionSweep::default()
            };
            if let Some(path) = &args.config {
                let cfg = ExperimentConfig::load(path)?;
                sweep.n = cfg.n;
                sweep.delta_t = cfg.delta_t.unwrap_or(sweep.delta_t);
                sweep.delta_ti = cfg.delta_ti.unwrap_or(sweep.delta_ti);
            }
            sweep.n = args.n.unwrap_or(sweep.n);
            sweep.delta_t = args.delta_t.unwrap_or(sweep.delta_t);
            sweep.delta_ti = args.delta_ti.unwrap_or(sweep.delta_ti);
            emit(args.out.as_ref(), &cmd_region(&sweep)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
