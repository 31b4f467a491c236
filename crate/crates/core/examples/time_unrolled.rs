//! Unrolls summary graphs over growing horizons: symmetric ones drift
//! toward rel-sortability 1/2, the one-directional complete one does not.

use relsort::samplers::{components_strongly_connected, sample_symmetric_summary, unrolled_label};
use relsort::{rel_sortability, seeded, unroll, SummaryGraph};

fn main() -> relsort::Result<()> {
    let sym = sample_symmetric_summary(10, 1.0, &mut seeded(3))?;
    let fwd = SummaryGraph::one_directional_complete(10)?;
    println!("symmetric: components strongly connected = {}", components_strongly_connected(&sym));
    println!("forward:   components strongly connected = {}", components_strongly_connected(&fwd));
    println!("   T  symmetric  forward");
    for t in [2, 5, 10, 50, 200] {
        println!(
            "{t:4}  {:.4}     {:.4}",
            rel_sortability(&unroll(&sym, t)?)?,
            rel_sortability(&unroll(&fwd, t)?)?
        );
    }
    let (v, t) = unrolled_label(10, 23);
    println!("unrolled node 23 is variable {v} at time step {t}");
    Ok(())
}
