//! Runs a small heatmap experiment in-process and writes its CSV to stdout.

use relsort::experiments::{run, write_csv, Experiment, ExperimentConfig};

fn main() -> relsort::Result<()> {
    let cfg = ExperimentConfig {
        n: vec![10, 50],
        c: vec![1.0, 4.0],
        reps: 3,
        seed: 7,
        ..ExperimentConfig::defaults(Experiment::Heatmap)
    };
    let records = run(&cfg)?;
    write_csv(&cfg, &records, std::io::stdout().lock())
}
