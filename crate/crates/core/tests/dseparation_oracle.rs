mod common;

use common::{adj, all_dags, d_separated};
use rand::Rng as _;
use relsort::{sample_er_dag, seeded, NodeSet};

fn check(g: &relsort::Dag, z_mask: u32) {
    let n = g.n();
    let a = adj(g);
    for x in 0..n {
        for y in 0..n {
            if x == y || z_mask & (1 << x) != 0 || z_mask & (1 << y) != 0 {
                continue;
            }
            let z = NodeSet::from_iter_with(n, (0..n).filter(|&v| z_mask & (1 << v) != 0));
            let zb: Vec<bool> = (0..n).map(|v| z.contains(v)).collect();
            let got = g.d_separated(x, y, &z).unwrap();
            assert_eq!(got, d_separated(&a, x, y, &zb), "{g:?} {x} {y} {z:?}");
            assert_eq!(got, g.d_separated(y, x, &z).unwrap());
        }
    }
}

#[test]
fn all_four_node_dags_all_conditioning_sets() {
    for g in all_dags(4) {
        for mask in 0..16 {
            check(&g, mask);
        }
    }
}

#[test]
fn random_six_node_dags() {
    let mut rng = seeded(200);
    for _ in 0..300 {
        let g = sample_er_dag(6, rng.random_range(0.5..2.5), &mut rng).unwrap().dag;
        let mask = rng.random_range(0..64u32);
        check(&g, mask);
    }
}
