mod common;

use common::{adj, all_dags, anc, desc, random_corpus, relatives, roots, subset, to_vec};
use proptest::prelude::*;
use relsort::{rel_sortability, sample_er_dag, seeded, Dag};

/// Relatives grow along every edge, and the library agrees with the definition.
fn check_monotone(g: &Dag) {
    let a = adj(g);
    for y in 0..g.n() {
        assert_eq!(g.relatives(y).unwrap().to_vec(), to_vec(&relatives(&a, y)), "{g:?} node {y}");
    }
    for (x, y) in g.edges() {
        assert!(g.relatives(x).unwrap().is_subset(g.relatives(y).unwrap()), "{g:?} edge {x}->{y}");
    }
    if g.edge_count() > 0 {
        assert!(rel_sortability(g).unwrap() >= 0.5);
    }
}

/// For `x` an ancestor of `y`:
/// `rel(x) ⊊ rel(y)` iff `roots(y) \ rel(x) ≠ ∅` iff `roots(y) \ roots(x) ≠ ∅`,
/// and every member of `rel(x)` has all its descendants in `rel(x)`.
fn check_root_characterization(g: &Dag) {
    let a = adj(g);
    let n = g.n();
    let rel: Vec<Vec<bool>> = (0..n).map(|v| relatives(&a, v)).collect();
    let rts: Vec<Vec<bool>> = (0..n).map(|v| roots(&a, v)).collect();
    for y in 0..n {
        let an = anc(&a, y);
        for x in (0..n).filter(|&x| an[x] && x != y) {
            let strict = subset(&rel[x], &rel[y]) && rel[x] != rel[y];
            let outside_rel = (0..n).any(|r| rts[y][r] && !rel[x][r]);
            let outside_roots = (0..n).any(|r| rts[y][r] && !rts[x][r]);
            assert_eq!(strict, outside_rel, "{g:?} x={x} y={y}");
            assert_eq!(strict, outside_roots, "{g:?} x={x} y={y}");
        }
        for z in (0..n).filter(|&z| rel[y][z]) {
            assert!(subset(&desc(&a, z), &rel[y]));
        }
    }
}

#[test]
fn monotone_on_all_small_dags() {
    for n in 1..=5 {
        for g in all_dags(n) {
            check_monotone(&g);
        }
    }
    assert_eq!(all_dags(4).len(), 543);
    assert_eq!(all_dags(5).len(), 29281);
}

#[test]
fn monotone_on_random_corpus() {
    for g in random_corpus(&mut seeded(100)) {
        check_monotone(&g);
    }
}

#[test]
fn root_characterization_on_all_small_dags() {
    for n in 2..=5 {
        for g in all_dags(n) {
            check_root_characterization(&g);
        }
    }
}

#[test]
fn root_characterization_on_random_corpus() {
    for g in random_corpus(&mut seeded(101)).iter().step_by(4) {
        check_root_characterization(g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monotone_er(n in 2usize..40, c in 0.1f64..8.0, seed in any::<u64>()) {
        let g = sample_er_dag(n, c, &mut seeded(seed)).unwrap().dag;
        check_monotone(&g);
    }

    #[test]
    fn relatives_symmetric(n in 2usize..30, c in 0.1f64..5.0, seed in any::<u64>()) {
        // x is a relative of y exactly when they share an ancestor
        let g = sample_er_dag(n, c, &mut seeded(seed)).unwrap().dag;
        for x in 0..n {
            for y in 0..n {
                let shared = !g.ancestors(x).unwrap().is_disjoint(g.ancestors(y).unwrap());
                prop_assert_eq!(g.relatives(y).unwrap().contains(x), shared);
            }
        }
    }
}
