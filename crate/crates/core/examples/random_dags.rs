//! Rel-sortability of ER and SF DAGs across densities.

use relsort::{rel_sortability, sample_er_dag, sample_sf_dag, SeedStream};

fn main() -> relsort::Result<()> {
    let n = 100;
    let seeds = SeedStream::new(42);
    println!("   c    ER      SF");
    for c in 1..=6usize {
        let mut er = 0.0;
        let mut sf = 0.0;
        for rep in 0..10u64 {
            let mut rng = seeds.substream(&[c as u64, rep]);
            er += rel_sortability(&sample_er_dag(n, c as f64, &mut rng)?.dag)?;
            sf += rel_sortability(&sample_sf_dag(n, c, &mut rng)?.dag)?;
        }
        println!("{c:4} {:6.3} {:6.3}", er / 10.0, sf / 10.0);
    }
    Ok(())
}
