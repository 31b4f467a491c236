//! The limiting per-edge lower bound for ER DAGs next to the observed
//! strict-increase frequency in a few quantile buckets.

use relsort::experiments::{run, Experiment, ExperimentConfig};
use relsort::sortability::{lower_bound_edge, lower_bound_first_term};

fn main() -> relsort::Result<()> {
    for (qx, qy) in [(0.0, 1.0), (0.1, 0.9), (0.25, 0.75), (0.5, 0.6)] {
        println!(
            "c=2 q=({qx}, {qy}): first term {:.4}, bound {:.4}",
            lower_bound_first_term(2.0, qx, qy)?,
            lower_bound_edge(2.0, qx, qy)?
        );
    }
    let cfg = ExperimentConfig {
        n: vec![1000],
        c: vec![2.0],
        buckets: 5,
        min_bucket_edges: 1000,
        ..ExperimentConfig::defaults(Experiment::Bound)
    };
    let recs = run(&cfg)?;
    let get = |m: &str| recs.iter().find(|r| r.metric == m).and_then(|r| r.value).unwrap_or(f64::NAN);
    println!("bucket  pr_strict  mean_score  bound");
    for (i, j) in [(0, 0), (0, 4), (1, 3), (2, 2), (4, 4)] {
        let tag = format!("qx={i}:qy={j}");
        println!(
            "{i},{j}     {:.3}      {:.3}       {:.3}",
            get(&format!("pr_strict:{tag}")),
            get(&format!("mean_score:{tag}")),
            get(&format!("bound:{tag}"))
        );
    }
    Ok(())
}
