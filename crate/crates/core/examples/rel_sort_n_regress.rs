//! Structure learning from the estimated relative order, scored against
//! the truth and a random-order baseline.

use rand::seq::SliceRandom;
use relsort::discovery::{correlation_threshold, estimate_relative_order};
use relsort::metrics::{order_divergence, shd, sid};
use relsort::scm::{sample_observations, sample_params};
use relsort::{rel_sort_n_regress, sample_er_dag, seeded, sort_n_regress, Ordering, Regime};

fn main() -> relsort::Result<()> {
    let mut rng = seeded(21);
    let truth = sample_er_dag(20, 2.0, &mut rng)?.dag;
    let scm = sample_params(truth.clone(), &mut rng);
    let data = sample_observations(&scm, 10_000, Regime::Sscm, &mut rng)?;
    println!("correlation threshold {:.5}", correlation_threshold(data.m(), 0.05)?);

    let order = estimate_relative_order(&data, 0.05)?;
    println!("estimated order violates {} of {} edges", order_divergence(&truth, &order)?, truth.edge_count());
    let est = rel_sort_n_regress(&data, 0.05)?;
    println!("rel order:    SID {:4}  SHD {:3}", sid(&truth, &est)?, shd(&truth, &est)?);

    let mut perm: Vec<usize> = (0..truth.n()).collect();
    perm.shuffle(&mut rng);
    let random = sort_n_regress(&data, &Ordering::new(perm)?)?;
    println!("random order: SID {:4}  SHD {:3}", sid(&truth, &random)?, shd(&truth, &random)?);
    println!("estimated edges:\n{}", est.to_edge_list());
    Ok(())
}
