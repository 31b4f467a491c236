//! Markov equivalence classes: skeletons, unshielded colliders, Meek
//! orientation rules, CPDAGs and exhaustive class enumeration, plus the
//! collider witnesses showing why a DAG whose edges all strictly increase
//! the number of relatives is alone in its class.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::graph::Dag;
use crate::nodeset::NodeSet;
use crate::sortability::rel_sortability;

/// Partially directed graph with disjoint directed and undirected edge sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pdag {
    n: usize,
    directed: Vec<NodeSet>,
    undirected: Vec<NodeSet>,
}

impl Pdag {
    pub fn empty(n: usize) -> Self {
        Pdag {
            n,
            directed: vec![NodeSet::new(n); n],
            undirected: vec![NodeSet::new(n); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_directed(&self, i: usize, j: usize) -> bool {
        self.directed[i].contains(j)
    }

    pub fn has_undirected(&self, i: usize, j: usize) -> bool {
        self.undirected[i].contains(j)
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.has_directed(i, j) || self.has_directed(j, i) || self.has_undirected(i, j)
    }

    pub fn add_undirected(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        self.directed[i].remove(j);
        self.directed[j].remove(i);
        self.undirected[i].insert(j);
        self.undirected[j].insert(i);
        Ok(())
    }

    pub fn add_directed(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        self.orient(i, j);
        Ok(())
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        for v in [i, j] {
            if v >= self.n {
                return Err(Error::NodeOutOfRange { node: v, n: self.n });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        Ok(())
    }

    /// Turns `i - j` (or nothing) into `i -> j`.
    fn orient(&mut self, i: usize, j: usize) {
        self.undirected[i].remove(j);
        self.undirected[j].remove(i);
        self.directed[j].remove(i);
        self.directed[i].insert(j);
    }

    pub fn undirected_count(&self) -> usize {
        self.undirected.iter().map(NodeSet::len).sum::<usize>() / 2
    }

    pub fn directed_count(&self) -> usize {
        self.directed.iter().map(NodeSet::len).sum()
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.directed
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |j| (i, j)))
    }

    /// Undirected edges as `(i, j)` with `i < j`.
    pub fn undirected_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.undirected
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().filter(move |&j| j > i).map(move |j| (i, j)))
    }

    /// The DAG formed by the directed part, with undirected edges dropped.
    pub fn directed_part(&self) -> Result<Dag> {
        Dag::from_edges(self.n, &self.directed_edges().collect::<Vec<_>>())
    }

    /// `n` followed by `i j d` (directed `i -> j`) and `i j u` (undirected, `i < j`) lines.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n);
        let mut lines: Vec<(usize, usize, char)> = self
            .directed_edges()
            .map(|(i, j)| (i, j, 'd'))
            .chain(self.undirected_edges().map(|(i, j)| (i, j, 'u')))
            .collect();
        lines.sort_unstable();
        for (i, j, k) in lines {
            let _ = writeln!(s, "{i} {j} {k}");
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut pdag: Option<Pdag> = None;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: ln + 1, msg: msg.to_string() };
            let f: Vec<&str> = line.split_whitespace().collect();
            match pdag.as_mut() {
                None => {
                    let n = f.first().filter(|_| f.len() == 1).ok_or_else(|| err("expected node count"))?;
                    pdag = Some(Pdag::empty(n.parse().map_err(|_| err("bad node count"))?));
                }
                Some(p) => {
                    if f.len() != 3 {
                        return Err(err("expected `i j d` or `i j u`"));
                    }
                    let i: usize = f[0].parse().map_err(|_| err("bad node index"))?;
                    let j: usize = f[1].parse().map_err(|_| err("bad node index"))?;
                    if i < p.n && j < p.n && p.adjacent(i, j) {
                        return Err(err("duplicate edge"));
                    }
                    match f[2] {
                        "d" => p.add_directed(i, j)?,
                        "u" => p.add_undirected(i, j)?,
                        _ => return Err(err("edge marker must be `d` or `u`")),
                    }
                }
            }
        }
        pdag.ok_or(Error::Parse { line: 0, msg: "missing node count".into() })
    }
}

/// All edges of `g`, undirected.
pub fn skeleton(g: &Dag) -> Pdag {
    let mut p = Pdag::empty(g.n());
    for (i, j) in g.edges() {
        p.add_undirected(i, j).expect("DAG edges are valid");
    }
    p
}

/// Triples `(a, b, c)` with `a -> b <- c`, `a` and `c` non-adjacent, `a < c`.
pub fn unshielded_colliders(g: &Dag) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for b in 0..g.n() {
        let pa: Vec<usize> = g.parents(b).expect("in range").iter().collect();
        for (k, &a) in pa.iter().enumerate() {
            for &c in &pa[k + 1..] {
                if !g.adjacent(a, c) {
                    out.push((a, b, c));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Whether edge `x -> y` is an arm of some unshielded collider centred at `y`.
pub fn on_unshielded_collider(g: &Dag, x: usize, y: usize) -> bool {
    g.has_edge(x, y)
        && g.parents(y)
            .expect("in range")
            .iter()
            .any(|z| z != x && !g.adjacent(x, z))
}

/// Applies Meek's rules 1–4 until no rule fires. Returns the number of
/// edges oriented.
pub fn meek_closure(p: &mut Pdag) -> usize {
    let n = p.n;
    let mut oriented = 0;
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in p.undirected[a].to_vec() {
                if !p.has_undirected(a, b) {
                    continue;
                }
                if meek_orients(p, a, b) {
                    p.orient(a, b);
                    oriented += 1;
                    changed = true;
                }
            }
        }
        if !changed {
            return oriented;
        }
    }
}

/// Whether one of Meek's rules orients the undirected edge `a - b` as `a -> b`.
fn meek_orients(p: &Pdag, a: usize, b: usize) -> bool {
    let n = p.n;
    // R1: c -> a - b, c and b non-adjacent
    if (0..n).any(|c| p.has_directed(c, a) && !p.adjacent(c, b)) {
        return true;
    }
    // R2: a -> c -> b
    if p.directed[a].iter().any(|c| p.has_directed(c, b)) {
        return true;
    }
    // R3: a - c -> b, a - d -> b, c and d non-adjacent
    let mids: Vec<usize> = p.undirected[a]
        .iter()
        .filter(|&c| c != b && p.has_directed(c, b))
        .collect();
    for (k, &c) in mids.iter().enumerate() {
        if mids[k + 1..].iter().any(|&d| !p.adjacent(c, d)) {
            return true;
        }
    }
    // R4: a - d -> c -> b, a adjacent to c, d and b non-adjacent
    for c in 0..n {
        if c == a || c == b || !p.has_directed(c, b) || !p.adjacent(a, c) {
            continue;
        }
        if p.undirected[a]
            .iter()
            .any(|d| d != b && d != c && p.has_directed(d, c) && !p.adjacent(d, b))
        {
            return true;
        }
    }
    false
}

/// CPDAG of `g`: the skeleton with unshielded-collider arms oriented, closed
/// under Meek's rules.
pub fn cpdag(g: &Dag) -> Pdag {
    let mut p = skeleton(g);
    for (a, b, c) in unshielded_colliders(g) {
        p.orient(a, b);
        p.orient(c, b);
    }
    meek_closure(&mut p);
    p
}

/// Largest graph accepted by [`enumerate_mec`].
pub const MEC_ENUMERATION_MAX_N: usize = 10;

/// Every DAG with the same skeleton and unshielded colliders as `g`, in
/// lexicographic order of their edge lists.
pub fn enumerate_mec(g: &Dag) -> Result<Vec<Dag>> {
    let n = g.n();
    if n > MEC_ENUMERATION_MAX_N {
        return Err(Error::SizeGuard { what: "MEC enumeration", n, max: MEC_ENUMERATION_MAX_N });
    }
    // collider arms are compelled: fix them, enumerate the rest
    let colliders = unshielded_colliders(g);
    let mut fixed = vec![NodeSet::new(n); n];
    for &(a, b, c) in &colliders {
        fixed[a].insert(b);
        fixed[c].insert(b);
    }
    let free: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(i, j)| !fixed[i].contains(j))
        .map(|(i, j)| (i.min(j), i.max(j)))
        .collect();
    let mut children = fixed;
    let mut out = Vec::new();
    search(g, &free, 0, &mut children, &colliders, &mut out);
    out.sort_by_key(|d: &Dag| d.edges().collect::<Vec<_>>());
    Ok(out)
}

fn search(
    g: &Dag,
    free: &[(usize, usize)],
    k: usize,
    children: &mut Vec<NodeSet>,
    colliders: &[(usize, usize, usize)],
    out: &mut Vec<Dag>,
) {
    if k == free.len() {
        let edges: Vec<(usize, usize)> = children
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |j| (i, j)))
            .collect();
        if let Ok(d) = Dag::from_edges(g.n(), &edges) {
            if unshielded_colliders(&d) == colliders {
                out.push(d);
            }
        }
        return;
    }
    let (u, v) = free[k];
    for (t, h) in [(u, v), (v, u)] {
        if reaches(children, h, t) || creates_new_collider(g, children, t, h) {
            continue;
        }
        children[t].insert(h);
        search(g, free, k + 1, children, colliders, out);
        children[t].remove(h);
    }
}

fn reaches(children: &[NodeSet], from: usize, to: usize) -> bool {
    let mut seen = NodeSet::singleton(children.len(), from);
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        for w in children[v].iter() {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    false
}

/// Orienting `t -> h` next to an existing `s -> h` with `s`, `t`
/// non-adjacent would add an unshielded collider.
fn creates_new_collider(g: &Dag, children: &[NodeSet], t: usize, h: usize) -> bool {
    (0..g.n()).any(|s| s != t && children[s].contains(h) && !g.adjacent(s, t))
}

/// Witnesses for one non-root node of a DAG with rel-sortability 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeWitness {
    pub node: usize,
    /// An unshielded collider `(a, node, c)` centred at the node.
    pub collider: (usize, usize, usize),
    /// Parents on no unshielded collider into the node, each paired with a
    /// collider-arm parent `d` it points to (`c -> d`).
    pub parent_to_arm: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub nodes: Vec<NodeWitness>,
}

/// For a DAG with rel-sortability exactly 1, exhibits for every non-root `y`
/// an unshielded collider centred at `y`, and for every parent `c` of `y`
/// on no such collider a collider-arm parent `d` of `y` with `c -> d`.
/// Fails if the precondition does not hold or a witness is missing.
pub fn uniqueness_witnesses(g: &Dag) -> Result<WitnessReport> {
    let s = rel_sortability(g)?;
    if s != 1.0 {
        return Err(invalid(format!("rel-sortability is {s}, witnesses need exactly 1")));
    }
    let mut nodes = Vec::new();
    for y in 0..g.n() {
        let pa = g.parents(y)?;
        if pa.is_empty() {
            continue;
        }
        let (arms, plain): (Vec<usize>, Vec<usize>) = pa.iter().partition(|&x| on_unshielded_collider(g, x, y));
        let collider = arms
            .iter()
            .find_map(|&a| arms.iter().find(|&&c| c > a && !g.adjacent(a, c)).map(|&c| (a, y, c)))
            .ok_or_else(|| invalid(format!("node {y} is not the centre of an unshielded collider")))?;
        let parent_to_arm = plain
            .iter()
            .map(|&c| {
                arms.iter()
                    .find(|&&d| g.has_edge(c, d))
                    .map(|&d| (c, d))
                    .ok_or_else(|| invalid(format!("parent {c} of {y} points to no collider arm")))
            })
            .collect::<Result<Vec<_>>>()?;
        nodes.push(NodeWitness { node: y, collider, parent_to_arm });
    }
    Ok(WitnessReport { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::rng::seeded;
    use crate::samplers::sample_er_dag;

    #[test]
    fn skeleton_examples() {
        let s = skeleton(&collider());
        assert_eq!(s.undirected_count(), 2);
        assert!(!s.adjacent(0, 1));
        assert_eq!(skeleton(&Dag::empty(3)), Pdag::empty(3));
        let c = skeleton(&chain());
        assert_eq!(c.undirected_edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn collider_examples() {
        assert_eq!(unshielded_colliders(&collider()), vec![(0, 2, 1)]);
        assert!(unshielded_colliders(&chain()).is_empty());
        let shielded = Dag::from_edges(3, &[(0, 2), (1, 2), (0, 1)]).unwrap();
        assert!(unshielded_colliders(&shielded).is_empty());
    }

    #[test]
    fn cpdag_examples() {
        let c = cpdag(&collider());
        assert_eq!(c.undirected_count(), 0);
        assert_eq!(c.directed_part().unwrap(), collider());
        let ch = cpdag(&chain());
        assert_eq!(ch.directed_count(), 0);
        assert_eq!(ch.undirected_count(), 2);
    }

    #[test]
    fn meek_rule_examples() {
        // R1: 0 -> 1 - 2
        let mut p = Pdag::empty(3);
        p.add_directed(0, 1).unwrap();
        p.add_undirected(1, 2).unwrap();
        assert_eq!(meek_closure(&mut p), 1);
        assert!(p.has_directed(1, 2));
        // R2: 0 -> 1 -> 2, 0 - 2
        let mut p = Pdag::empty(3);
        p.add_directed(0, 1).unwrap();
        p.add_directed(1, 2).unwrap();
        p.add_undirected(0, 2).unwrap();
        meek_closure(&mut p);
        assert!(p.has_directed(0, 2));
        // R3: 0 - 1, 0 - 2, 0 - 3, 2 -> 1 <- 3
        let mut p = Pdag::empty(4);
        for v in 1..4 {
            p.add_undirected(0, v).unwrap();
        }
        p.add_directed(2, 1).unwrap();
        p.add_directed(3, 1).unwrap();
        meek_closure(&mut p);
        assert!(p.has_directed(0, 1));
        assert!(p.has_undirected(0, 2) && p.has_undirected(0, 3));
        // R4: a=0 - b=1, a - d=3, d -> c=2 -> b, a - c, d and b non-adjacent
        let mut p = Pdag::empty(4);
        p.add_undirected(0, 1).unwrap();
        p.add_undirected(0, 3).unwrap();
        p.add_undirected(0, 2).unwrap();
        p.add_directed(3, 2).unwrap();
        p.add_directed(2, 1).unwrap();
        meek_closure(&mut p);
        assert!(p.has_directed(0, 1));
    }

    #[test]
    fn mec_examples() {
        assert_eq!(enumerate_mec(&collider()).unwrap(), vec![collider()]);
        assert_eq!(enumerate_mec(&chain()).unwrap().len(), 3);
        assert_eq!(enumerate_mec(&complete(3)).unwrap().len(), 6);
        assert_eq!(enumerate_mec(&complete(4)).unwrap().len(), 24);
        assert!(matches!(enumerate_mec(&Dag::empty(11)), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn cpdag_is_class_invariant_and_meek_idempotent() {
        let mut rng = seeded(1);
        for _ in 0..60 {
            let g = sample_er_dag(7, 1.5, &mut rng).unwrap().dag;
            let c = cpdag(&g);
            let mut again = c.clone();
            assert_eq!(meek_closure(&mut again), 0);
            assert_eq!(again, c);
            let members = enumerate_mec(&g).unwrap();
            assert!(members.contains(&g));
            for m in &members {
                assert_eq!(cpdag(m), c);
            }
            // every undirected edge appears in both orientations across the class
            for (i, j) in c.undirected_edges() {
                assert!(members.iter().any(|m| m.has_edge(i, j)));
                assert!(members.iter().any(|m| m.has_edge(j, i)));
            }
            for (i, j) in c.directed_edges() {
                assert!(members.iter().all(|m| m.has_edge(i, j)));
                assert!(!c.has_directed(j, i));
            }
            assert_eq!(members.len() == 1, c.undirected_count() == 0);
        }
    }

    #[test]
    fn collider_arm_iff_some_parent_nonadjacent() {
        // x -> y is on no unshielded collider at y iff x is adjacent to all other parents of y
        let mut rng = seeded(2);
        for _ in 0..200 {
            let g = sample_er_dag(9, 2.0, &mut rng).unwrap().dag;
            for (x, y) in g.edges() {
                let all_adj = g.parents(y).unwrap().iter().all(|z| z == x || g.adjacent(x, z));
                assert_eq!(!on_unshielded_collider(&g, x, y), all_adj);
            }
        }
    }

    #[test]
    fn witnesses() {
        let r = uniqueness_witnesses(&collider()).unwrap();
        assert_eq!(r.nodes.len(), 1);
        assert!(r.nodes[0].parent_to_arm.is_empty());
        let diamond = Dag::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert!(rel_sortability(&diamond).unwrap() < 1.0);
        assert!(uniqueness_witnesses(&diamond).is_err());
        let mut rng = seeded(3);
        let mut found = 0;
        while found < 100 {
            let g = sample_er_dag(8, 1.5, &mut rng).unwrap().dag;
            if g.edge_count() == 0 || rel_sortability(&g).unwrap() != 1.0 {
                continue;
            }
            found += 1;
            let r = uniqueness_witnesses(&g).unwrap();
            let non_roots = (0..8).filter(|&v| !g.parents(v).unwrap().is_empty()).count();
            assert_eq!(r.nodes.len(), non_roots);
        }
    }

    #[test]
    fn pdag_edge_list() {
        let mut p = cpdag(&Dag::from_edges(4, &[(0, 1), (1, 2), (3, 2)]).unwrap());
        p.add_undirected(0, 3).unwrap();
        let text = p.to_edge_list();
        assert_eq!(Pdag::parse_edge_list(&text).unwrap(), p);
        assert!(text.lines().any(|l| l.ends_with(" d")));
        assert!(text.lines().any(|l| l.ends_with(" u")));
        assert!(Pdag::parse_edge_list("2\n0 1 x\n").is_err());
        assert!(Pdag::parse_edge_list("2\n0 0 d\n").is_err());
    }
}
