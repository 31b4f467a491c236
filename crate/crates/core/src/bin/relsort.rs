use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relsort::experiments::{run, write_csv, ConfigOverrides, Experiment, ExperimentConfig};

/// Seeded Monte Carlo experiments on relatives and rel-sortability.
#[derive(Parser)]
#[command(name = "relsort", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Oracle rel-sortability of random DAGs over an (n, c) grid.
    Heatmap(Flags),
    /// Oracle, empirical, var and R² sortability per data scheme.
    Schemes(Flags),
    /// SID and SHD of SortnRegress under several variable orders.
    Discovery(Flags),
    /// Rel-sortability of time-unrolled summary graphs against T.
    Timeseries(Flags),
    /// Per-bucket edge statistics of large ER DAGs against the lower bound.
    Bound(Flags),
}

#[derive(Args)]
struct Flags {
    /// er, sf, or forward (timeseries only)
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    /// Observations per dataset.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// raw, sscm, iscm (comma-separated)
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<String>>,
    /// Draw edge weights with a random sign.
    #[arg(long)]
    signed_weights: bool,
    /// Unrolling horizons.
    #[arg(long = "T", value_delimiter = ',')]
    t: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    buckets: Option<usize>,
    #[arg(long)]
    min_bucket_edges: Option<usize>,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn into_overrides(self) -> (Option<PathBuf>, ConfigOverrides) {
        let o = ConfigOverrides {
            graph: self.graph,
            n: self.n,
            c: self.c,
            reps: self.reps,
            samples: self.samples,
            alpha: self.alpha,
            scheme: self.scheme,
            signed_weights: self.signed_weights.then_some(true),
            t: self.t,
            seed: self.seed,
            buckets: self.buckets,
            min_bucket_edges: self.min_bucket_edges,
            workers: self.workers,
            out: self.out,
        };
        (self.config, o)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match try_main(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relsort: {e}");
            ExitCode::FAILURE
        }
    }
}

fn try_main(cli: Cli) -> relsort::Result<()> {
    let (experiment, flags) = match cli.command {
        Command::Heatmap(f) => (Experiment::Heatmap, f),
        Command::Schemes(f) => (Experiment::Schemes, f),
        Command::Discovery(f) => (Experiment::Discovery, f),
        Command::Timeseries(f) => (Experiment::Timeseries, f),
        Command::Bound(f) => (Experiment::Bound, f),
    };
    let mut cfg = ExperimentConfig::defaults(experiment);
    let (config_path, flags) = flags.into_overrides();
    if let Some(path) = config_path {
        ConfigOverrides::from_toml(&fs::read_to_string(path)?)?.apply(&mut cfg)?;
    }
    flags.apply(&mut cfg)?;
    let records = run(&cfg)?;
    match &cfg.out {
        Some(path) => {
            let mut f = io::BufWriter::new(fs::File::create(path)?);
            write_csv(&cfg, &records, &mut f)?;
            f.flush()?;
        }
        None => write_csv(&cfg, &records, io::stdout().lock())?,
    }
    Ok(())
}
