//! Structural comparison of an estimated DAG with the true one.

use rayon::prelude::*;

use crate::discovery::Ordering;
use crate::error::{invalid, Result};
use crate::graph::{moral_connected, Dag};
use crate::nodeset::NodeSet;

fn same_size(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(invalid(format!("graphs have {a} and {b} nodes")));
    }
    Ok(())
}

/// Structural Hamming distance: node pairs whose edge status (absent,
/// `i -> j`, `j -> i`) differs. A reversal counts once.
pub fn shd(g_true: &Dag, g_est: &Dag) -> Result<usize> {
    same_size(g_true.n(), g_est.n())?;
    let n = g_true.n();
    let mut d = 0;
    for i in 0..n {
        for j in i + 1..n {
            let a = (g_true.has_edge(i, j), g_true.has_edge(j, i));
            let b = (g_est.has_edge(i, j), g_est.has_edge(j, i));
            d += usize::from(a != b);
        }
    }
    Ok(d)
}

/// Structural intervention distance: ordered pairs `(i, j)` for which
/// adjusting for the estimated parents of `i` gives a wrong answer for the
/// effect of `i` on `j` in the true graph.
pub fn sid(g_true: &Dag, g_est: &Dag) -> Result<usize> {
    same_size(g_true.n(), g_est.n())?;
    let n = g_true.n();
    let total = (0..n)
        .into_par_iter()
        .map(|i| {
            let z = g_est.parents(i).expect("in range");
            (0..n).filter(|&j| j != i && !parent_adjustment_valid(g_true, i, j, z)).count()
        })
        .sum();
    Ok(total)
}

/// Whether `z` (which never contains `i`) identifies the effect of `i` on
/// `j` in `g`. When `j ∈ z` the implied effect is zero, which is right iff
/// `j` is not a descendant of `i`.
pub fn parent_adjustment_valid(g: &Dag, i: usize, j: usize, z: &NodeSet) -> bool {
    let desc_i = g.descendants(i).expect("in range");
    if z.contains(j) {
        return !desc_i.contains(j);
    }
    if !desc_i.contains(j) {
        return !moral_connected(parents_of(g), i, j, z);
    }
    let anc_j = g.ancestors(j).expect("in range");
    // nodes on causal paths i ~> j, without i
    let mut on_path = desc_i.intersection(anc_j);
    on_path.remove(i);
    let mut forbidden = NodeSet::new(g.n());
    for w in on_path.iter() {
        forbidden.union_with(g.descendants(w).expect("in range"));
    }
    if !z.is_disjoint(&forbidden) {
        return false;
    }
    // drop the first edge of every causal path, then every remaining
    // connection is non-causal
    let mut parents = parents_of(g).to_vec();
    for w in g.children(i).expect("in range").intersection(anc_j).iter() {
        parents[w].remove(i);
    }
    !moral_connected(&parents, i, j, z)
}

fn parents_of(g: &Dag) -> &[NodeSet] {
    g.parent_sets()
}

/// Edges `x -> y` placed after `y` by `order`.
pub fn order_divergence(g: &Dag, order: &Ordering) -> Result<usize> {
    same_size(g.n(), order.len())?;
    let pos = order.positions();
    Ok(g.edges().filter(|&(x, y)| pos[x] > pos[y]).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::rng::seeded;
    use crate::samplers::sample_er_dag;
    use crate::scm::{LinearScm, ScmParams};
    use crate::sortability::sortability;
    use crate::sortability::NodeCriterion;
    use crate::discovery::criterion_order;
    use nalgebra::{DMatrix, DVector};
    use rand::Rng as _;

    fn reversed_chain() -> Dag {
        Dag::from_edges(3, &[(1, 0), (2, 1)]).unwrap()
    }

    #[test]
    fn shd_examples() {
        assert_eq!(shd(&chain(), &chain()).unwrap(), 0);
        assert_eq!(shd(&chain(), &Dag::empty(3)).unwrap(), 2);
        assert_eq!(shd(&chain(), &reversed_chain()).unwrap(), 2);
        assert!(shd(&chain(), &Dag::empty(4)).is_err());
    }

    #[test]
    fn sid_examples() {
        assert_eq!(sid(&chain(), &chain()).unwrap(), 0);
        assert_eq!(sid(&chain(), &Dag::empty(3)).unwrap(), 3);
        assert_eq!(sid(&Dag::empty(3), &chain()).unwrap(), 0);
        assert_eq!(sid(&Dag::empty(3), &complete(3)).unwrap(), 0);
        assert_eq!(sid(&Dag::empty(1), &Dag::empty(1)).unwrap(), 0);
        assert!(sid(&chain(), &Dag::empty(2)).is_err());
    }

    #[test]
    fn order_divergence_examples() {
        let g = chain();
        assert_eq!(order_divergence(&g, &Ordering::identity(3)).unwrap(), 0);
        assert_eq!(order_divergence(&g, &Ordering::new(vec![2, 1, 0]).unwrap()).unwrap(), 2);
        assert_eq!(order_divergence(&g, &Ordering::new(vec![1, 0, 2]).unwrap()).unwrap(), 1);
        assert!(order_divergence(&g, &Ordering::identity(2)).is_err());
    }

    #[test]
    fn sid_zero_on_self_and_shd_symmetric() {
        let mut rng = seeded(5);
        for _ in 0..100 {
            let a = sample_er_dag(8, 2.0, &mut rng).unwrap().dag;
            let b = sample_er_dag(8, 2.0, &mut rng).unwrap().dag;
            assert_eq!(sid(&a, &a).unwrap(), 0);
            assert_eq!(shd(&a, &b).unwrap(), shd(&b, &a).unwrap());
        }
    }

    #[test]
    fn divergence_matches_sortability_without_ties() {
        let mut rng = seeded(6);
        for _ in 0..100 {
            let g = sample_er_dag(12, 2.0, &mut rng).unwrap().dag;
            if g.edge_count() == 0 {
                continue;
            }
            let rho: Vec<f64> = g
                .relative_counts()
                .iter()
                .map(|&r| r as f64 + rng.random::<f64>() * 0.5)
                .collect();
            let rho = NodeCriterion::new(rho).unwrap();
            let s = sortability(&g, &rho).unwrap();
            let d = order_divergence(&g, &criterion_order(&rho)).unwrap();
            assert!(((1.0 - s) * g.edge_count() as f64 - d as f64).abs() < 1e-9);
        }
    }

    /// Effect of `i` on `j` in a linear SCM, and the coefficient of `x_i`
    /// in the population regression of `x_j` on `x_i` and `z`.
    fn linear_effects(scm: &LinearScm, i: usize, j: usize, z: &NodeSet) -> (f64, f64) {
        let n = scm.dag().n();
        // total effect: sum over directed paths of weight products
        let order = scm.dag().topological_order().to_vec();
        let mut eff = vec![0.0; n];
        eff[i] = 1.0;
        for &v in &order {
            for p in scm.dag().parents(v).unwrap().iter() {
                eff[v] += scm.weights()[p][v] * eff[p];
            }
        }
        let cov = scm.population_covariance();
        let reg: Vec<usize> = std::iter::once(i).chain(z.iter()).collect();
        let k = reg.len();
        let a = DMatrix::from_fn(k, k, |r, c| cov[reg[r]][reg[c]]);
        let b = DVector::from_fn(k, |r, _| cov[reg[r]][j]);
        let beta = a.lu().solve(&b).unwrap();
        (eff[j], beta[0])
    }

    #[test]
    fn adjustment_matches_linear_regression() {
        let mut rng = seeded(7);
        let params = ScmParams::default();
        for _ in 0..300 {
            let n = rng.random_range(2..=6);
            let g = sample_er_dag(n, 1.5, &mut rng).unwrap().dag;
            let h = sample_er_dag(n, 1.5, &mut rng).unwrap().dag;
            let scm = LinearScm::sample(g.clone(), &params, &mut rng);
            for i in 0..n {
                let z = h.parents(i).unwrap();
                for j in (0..n).filter(|&j| j != i) {
                    let (truth, est) = if z.contains(j) {
                        (linear_effects(&scm, i, j, &NodeSet::new(n)).0, 0.0)
                    } else {
                        linear_effects(&scm, i, j, z)
                    };
                    let agrees = (truth - est).abs() < 1e-9;
                    assert_eq!(parent_adjustment_valid(&g, i, j, z), agrees, "{g:?} {h:?} {i} {j}");
                }
            }
        }
    }
}
