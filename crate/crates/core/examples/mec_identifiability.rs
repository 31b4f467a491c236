//! CPDAGs and Markov equivalence classes, and the collider witnesses that
//! pin down a DAG whose edges all strictly increase the relatives.

use relsort::mec::{cpdag, enumerate_mec, uniqueness_witnesses};
use relsort::{rel_sortability, Dag};

fn main() -> relsort::Result<()> {
    let chain = Dag::from_edges(3, &[(0, 1), (1, 2)])?;
    println!("chain: rel-sortability {}, class size {}", rel_sortability(&chain)?, enumerate_mec(&chain)?.len());
    print!("chain CPDAG:\n{}", cpdag(&chain).to_edge_list());

    // two colliders: 0 -> 2 <- 1 and 2 -> 4 <- 3
    let g = Dag::from_edges(5, &[(0, 2), (1, 2), (2, 4), (3, 4)])?;
    println!("colliders: rel-sortability {}, class size {}", rel_sortability(&g)?, enumerate_mec(&g)?.len());
    for w in uniqueness_witnesses(&g)?.nodes {
        println!("  node {}: collider {:?}, parent-to-arm pairs {:?}", w.node, w.collider, w.parent_to_arm);
    }
    Ok(())
}
