//! Random graph generators: Erdős–Rényi and scale-free DAGs, and
//! time-unrolled DAGs built from (possibly cyclic) summary graphs.

use std::fmt::Write as _;

use log::warn;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{invalid, Error, Result};
use crate::graph::{parse_pairs, Dag};
use crate::nodeset::NodeSet;
use crate::rng::Rng;

/// A sampled DAG together with the vertex order it was generated under.
#[derive(Debug, Clone)]
pub struct RandomDag {
    pub dag: Dag,
    /// `causal_order[k]` is the node at position `k`; every edge points forward.
    pub causal_order: Vec<usize>,
    /// Set when the requested edge probability exceeded one and was clamped.
    pub clamped: bool,
}

impl RandomDag {
    pub fn into_dag(self) -> Dag {
        self.dag
    }

    /// Position of each node in `causal_order`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.causal_order.len()];
        for (k, &v) in self.causal_order.iter().enumerate() {
            pos[v] = k;
        }
        pos
    }
}

/// Edge probability `2c/(n-1)` for ER graphs with about `c·n` edges, clamped to 1.
/// The flag reports whether clamping happened.
pub fn er_edge_probability(n: usize, c: f64) -> (f64, bool) {
    let p = 2.0 * c / (n as f64 - 1.0);
    if p > 1.0 {
        (1.0, true)
    } else {
        (p, false)
    }
}

/// Erdős–Rényi DAG: a uniformly random vertex order, then every forward
/// pair kept independently with probability `min(2c/(n-1), 1)`.
pub fn sample_er_dag(n: usize, c: f64, rng: &mut Rng) -> Result<RandomDag> {
    if n < 2 {
        return Err(invalid(format!("ER DAG needs n >= 2, got {n}")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(invalid(format!("ER density c must be positive, got {c}")));
    }
    let (p, clamped) = er_edge_probability(n, c);
    if clamped {
        warn!("ER edge probability 2c/(n-1) = {} > 1 clamped to 1 (n={n}, c={c})", 2.0 * c / (n as f64 - 1.0));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((order[a], order[b]));
            }
        }
    }
    let dag = Dag::from_edges(n, &edges).expect("forward edges are acyclic");
    Ok(RandomDag { dag, causal_order: order, clamped })
}

/// Scale-free DAG: a Barabási–Albert graph grown from a star on `c + 1`
/// nodes, each new node attaching to `c` distinct existing nodes with
/// probability proportional to `degree + 1`; edges are then oriented along a
/// uniformly random vertex order.
pub fn sample_sf_dag(n: usize, c: usize, rng: &mut Rng) -> Result<RandomDag> {
    if n < 2 {
        return Err(invalid(format!("SF DAG needs n >= 2, got {n}")));
    }
    if c < 1 || c >= n {
        return Err(invalid(format!("SF attachments c must satisfy 1 <= c < n, got c={c}, n={n}")));
    }
    let star = (c + 1).min(n);
    let mut degree = vec![0usize; n];
    let mut undirected = Vec::with_capacity(c * n);
    for leaf in 1..star {
        undirected.push((0, leaf));
        degree[0] += 1;
        degree[leaf] += 1;
    }
    let mut picked = vec![false; n];
    let mut targets = Vec::with_capacity(c);
    for v in star..n {
        targets.clear();
        let mut total: usize = (0..v).map(|u| degree[u] + 1).sum();
        for _ in 0..c {
            let mut r = rng.random_range(0..total);
            let mut chosen = None;
            for u in 0..v {
                if picked[u] {
                    continue;
                }
                let w = degree[u] + 1;
                if r < w {
                    chosen = Some(u);
                    break;
                }
                r -= w;
            }
            let u = chosen.expect("weights sum to total");
            picked[u] = true;
            total -= degree[u] + 1;
            targets.push(u);
        }
        for &u in &targets {
            picked[u] = false;
            undirected.push((u, v));
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let edges: Vec<_> = undirected
        .into_iter()
        .map(|(a, b)| if pos[a] < pos[b] { (a, b) } else { (b, a) })
        .collect();
    let dag = Dag::from_edges(n, &edges).expect("edges follow the vertex order");
    Ok(RandomDag { dag, causal_order: order, clamped: false })
}

/// A directed, possibly cyclic graph with a self-loop on every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryGraph {
    out: Vec<NodeSet>,
}

impl SummaryGraph {
    /// Builds a summary graph from its non-self-loop edges; self-loops are added on every node.
    pub fn new(p: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if p < 2 {
            return Err(invalid(format!("summary graph needs p >= 2, got {p}")));
        }
        let mut out: Vec<NodeSet> = (0..p).map(|v| NodeSet::singleton(p, v)).collect();
        for &(i, j) in edges {
            for v in [i, j] {
                if v >= p {
                    return Err(Error::NodeOutOfRange { node: v, n: p });
                }
            }
            out[i].insert(j);
        }
        Ok(SummaryGraph { out })
    }

    /// All forward pairs `i -> j` for `i < j`, plus self-loops: every pair is
    /// connected in exactly one direction.
    pub fn one_directional_complete(p: usize) -> Result<Self> {
        let edges: Vec<_> = (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).collect();
        Self::new(p, &edges)
    }

    pub fn p(&self) -> usize {
        self.out.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.p() && self.out[i].contains(j)
    }

    /// Number of directed edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        self.out.iter().map(NodeSet::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |j| (i, j)))
    }

    /// `reach[i]` = nodes reachable from `i` (including `i`).
    fn reachability(&self) -> Vec<NodeSet> {
        let p = self.p();
        (0..p)
            .map(|s| {
                let mut seen = NodeSet::singleton(p, s);
                let mut stack = vec![s];
                while let Some(v) = stack.pop() {
                    for w in self.out[v].iter() {
                        if seen.insert(w) {
                            stack.push(w);
                        }
                    }
                }
                seen
            })
            .collect()
    }

    /// `# summary` header, node count, then every edge including self-loops.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("# summary\n{}\n", self.p());
        for (i, j) in self.edges() {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    /// Parses the summary-graph edge list. The `# summary` header and a
    /// self-loop on every node are both required.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let first = text.lines().map(str::trim).find(|l| !l.is_empty());
        if first != Some("# summary") {
            return Err(Error::Parse { line: 1, msg: "missing `# summary` header".into() });
        }
        let (p, edges) = parse_pairs(text)?;
        for v in 0..p {
            if !edges.contains(&(v, v)) {
                return Err(invalid(format!("summary graph is missing the self-loop on node {v}")));
            }
        }
        Self::new(p, &edges)
    }
}

/// Time-unrolled DAG over `p·T` nodes. Node `v` at time step `t` (1-based)
/// has index `(t-1)·p + v`; each summary edge `(i, j)` becomes the edges
/// `i^(t) -> j^(t+1)` for `t = 1..T-1`.
pub fn unroll(s: &SummaryGraph, horizon: usize) -> Result<Dag> {
    if horizon <= 1 {
        return Err(invalid(format!("unrolling needs T > 1, got {horizon}")));
    }
    let p = s.p();
    let mut edges = Vec::with_capacity((horizon - 1) * s.edge_count());
    for t in 0..horizon - 1 {
        for (i, j) in s.edges() {
            edges.push((t * p + i, (t + 1) * p + j));
        }
    }
    Dag::from_edges(p * horizon, &edges)
}

/// Label `v^(t)` of a node in an unrolled DAG, with `t` 1-based.
pub fn unrolled_label(p: usize, index: usize) -> (usize, usize) {
    (index % p, index / p + 1)
}

/// Whether every weakly connected component of `s` is strongly connected,
/// i.e. `i ~> j` implies `j ~> i` for all node pairs.
pub fn components_strongly_connected(s: &SummaryGraph) -> bool {
    let p = s.p();
    let reach = s.reachability();
    // strongly connected component id: smallest mutually reachable node
    let scc: Vec<usize> = (0..p)
        .map(|i| reach[i].iter().find(|&j| reach[j].contains(i)).unwrap_or(i))
        .collect();
    // weakly connected component id via union-find
    let mut parent: Vec<usize> = (0..p).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (i, j) in s.edges() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let wcc: Vec<usize> = (0..p).map(|v| find(&mut parent, v)).collect();
    (0..p).all(|i| (0..p).all(|j| (wcc[i] == wcc[j]) == (scc[i] == scc[j])))
}

/// Symmetrized ER summary graph: each undirected pair kept with probability
/// `min(2c/(p-1), 1)` and replaced by two opposing directed edges.
pub fn sample_symmetric_summary(p: usize, c: f64, rng: &mut Rng) -> Result<SummaryGraph> {
    if p < 2 {
        return Err(invalid(format!("summary graph needs p >= 2, got {p}")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(invalid(format!("density c must be positive, got {c}")));
    }
    let (prob, _) = er_edge_probability(p, c);
    let mut edges = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            if rng.random_bool(prob) {
                edges.push((i, j));
                edges.push((j, i));
            }
        }
    }
    SummaryGraph::new(p, &edges)
}
