//! Ancestors, descendants, roots and relatives of a small DAG, and the
//! resulting rel-sortability.

use relsort::{rel_sortability, Dag};

fn main() -> relsort::Result<()> {
    // 0 -> 2 <- 1, 2 -> 3, 4 -> 3
    let g = Dag::from_edges(5, &[(0, 2), (1, 2), (2, 3), (4, 3)])?;
    for v in 0..g.n() {
        println!(
            "node {v}: anc {:?} desc {:?} roots {:?} rel {:?}",
            g.ancestors(v)?,
            g.descendants(v)?,
            g.roots(v)?,
            g.relatives(v)?
        );
    }
    println!("relative counts {:?}", g.relative_counts());
    println!("rel-sortability {}", rel_sortability(&g)?);
    Ok(())
}
