use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};
use holobeam::power::Mode;
use holobeam_harness::output::{emit_csv, emit_metadata};
use holobeam_harness::{run_experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "holobeam", version, about = "Energy-efficiency sweeps for surface-assisted MIMO links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Ee,
    Capacity,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a JSON config file.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = all cores).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
}

fn main() -> anyhow::Result<()> {
    let Command::Run { config, seed, draws, out, threads, mode } = Cli::parse().command;
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(s) = seed {
        cfg.scenario.seed = s;
    }
    if let Some(d) = draws {
        cfg.monte_carlo_draws = d;
    }
    if let Some(t) = threads {
        cfg.threads = t;
    }
    if let Some(m) = mode {
        cfg.mode = match m {
            ModeArg::Ee => Mode::EnergyEfficiency,
            ModeArg::Capacity => Mode::Capacity,
        };
    }
    if let Some(o) = out {
        cfg.output_path = o.to_string_lossy().into_owned();
    }
    cfg.validate()?;
    let result = run_experiment(&cfg)?;
    let path = PathBuf::from(&cfg.output_path);
    emit_csv(&result, &path)?;
    let meta = emit_metadata(&cfg, &path).context("writing metadata")?;
    eprintln!("wrote {} and {}", path.display(), meta.display());
    Ok(())
}
