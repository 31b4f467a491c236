//! Directed acyclic graphs and the reachability queries built on them:
//! parents, children, ancestors, descendants, roots, relatives and
//! d-separation.
//!
//! Ancestors and descendants include the node itself, so that
//! `relatives(y) = descendants(ancestors(y))` holds literally.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};
use crate::nodeset::NodeSet;

/// An immutable DAG over nodes `0..n`.
///
/// Reachability closures are computed on first use and cached; the cache is
/// a `OnceLock`, so a `Dag` can be shared freely between threads.
#[derive(Debug)]
pub struct Dag {
    n: usize,
    children: Vec<NodeSet>,
    parents: Vec<NodeSet>,
    order: Vec<usize>,
    closure: OnceLock<Closure>,
}

#[derive(Debug)]
struct Closure {
    desc: Vec<NodeSet>,
    anc: Vec<NodeSet>,
    rel: Vec<NodeSet>,
}

impl Clone for Dag {
    fn clone(&self) -> Self {
        Dag {
            n: self.n,
            children: self.children.clone(),
            parents: self.parents.clone(),
            order: self.order.clone(),
            closure: OnceLock::new(),
        }
    }
}

impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.children == other.children
    }
}

impl Eq for Dag {}

impl Dag {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Dag {
            n,
            children: vec![NodeSet::new(n); n],
            parents: vec![NodeSet::new(n); n],
            order: (0..n).collect(),
            closure: OnceLock::new(),
        }
    }

    /// Builds a DAG from an edge list, rejecting self-loops, out-of-range
    /// endpoints and cycles. Duplicate edges are collapsed.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut children = vec![NodeSet::new(n); n];
        let mut parents = vec![NodeSet::new(n); n];
        for &(i, j) in edges {
            for v in [i, j] {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            children[i].insert(j);
            parents[j].insert(i);
        }
        Self::from_sets(children, parents)
    }

    /// Builds a DAG from a dense boolean adjacency matrix (`adj[i][j]` iff `i -> j`).
    pub fn from_adjacency(adj: &[Vec<bool>]) -> Result<Self> {
        let n = adj.len();
        let mut edges = Vec::new();
        for (i, row) in adj.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(format!(
                    "adjacency row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            edges.extend(row.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| (i, j)));
        }
        Self::from_edges(n, &edges)
    }

    fn from_sets(children: Vec<NodeSet>, parents: Vec<NodeSet>) -> Result<Self> {
        let order = kahn_order(&children, &parents).ok_or(Error::Cycle)?;
        Ok(Dag {
            n: children.len(),
            children,
            parents,
            order,
            closure: OnceLock::new(),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(NodeSet::len).sum()
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.children[i].contains(j)
    }

    /// Whether `i` and `j` are joined by an edge in either direction.
    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.has_edge(i, j) || self.has_edge(j, i)
    }

    /// All edges `(tail, head)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(i, ch)| ch.iter().map(move |j| (i, j)))
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.children[i].contains(j)).collect())
            .collect()
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: v, n: self.n })
        }
    }

    pub fn parents(&self, y: usize) -> Result<&NodeSet> {
        self.check(y)?;
        Ok(&self.parents[y])
    }

    pub(crate) fn parent_sets(&self) -> &[NodeSet] {
        &self.parents
    }

    pub fn children(&self, x: usize) -> Result<&NodeSet> {
        self.check(x)?;
        Ok(&self.children[x])
    }

    /// Ancestors of `y`, including `y` itself.
    pub fn ancestors(&self, y: usize) -> Result<&NodeSet> {
        self.check(y)?;
        Ok(&self.closure().anc[y])
    }

    /// Descendants of `x`, including `x` itself.
    pub fn descendants(&self, x: usize) -> Result<&NodeSet> {
        self.check(x)?;
        Ok(&self.closure().desc[x])
    }

    /// Ancestors of `y` that have no parents.
    pub fn roots(&self, y: usize) -> Result<NodeSet> {
        let anc = self.ancestors(y)?;
        Ok(NodeSet::from_iter_with(
            self.n,
            anc.iter().filter(|&a| self.parents[a].is_empty()),
        ))
    }

    /// Descendants of the ancestors of `y`.
    pub fn relatives(&self, y: usize) -> Result<&NodeSet> {
        self.check(y)?;
        Ok(&self.closure().rel[y])
    }

    /// `|relatives(v)|` for every node.
    pub fn relative_counts(&self) -> Vec<usize> {
        self.closure().rel.iter().map(NodeSet::len).collect()
    }

    /// Topological order from Kahn's algorithm, smallest index first among
    /// ready nodes.
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    fn closure(&self) -> &Closure {
        self.closure.get_or_init(|| {
            let n = self.n;
            let mut desc: Vec<NodeSet> = (0..n).map(|v| NodeSet::singleton(n, v)).collect();
            for &v in self.order.iter().rev() {
                let mut acc = std::mem::replace(&mut desc[v], NodeSet::new(0));
                for c in self.children[v].iter() {
                    acc.union_with(&desc[c]);
                }
                desc[v] = acc;
            }
            let mut anc: Vec<NodeSet> = (0..n).map(|v| NodeSet::singleton(n, v)).collect();
            for &v in &self.order {
                let mut acc = std::mem::replace(&mut anc[v], NodeSet::new(0));
                for p in self.parents[v].iter() {
                    acc.union_with(&anc[p]);
                }
                anc[v] = acc;
            }
            // anc(y) = {y} ∪ anc(pa(y)), hence rel(y) = desc(y) ∪ rel(pa(y)).
            let mut rel: Vec<NodeSet> = vec![NodeSet::new(0); n];
            for &v in &self.order {
                let mut acc = desc[v].clone();
                for p in self.parents[v].iter() {
                    acc.union_with(&rel[p]);
                }
                rel[v] = acc;
            }
            Closure { desc, anc, rel }
        })
    }

    /// Whether `x` and `y` are d-separated given `z`.
    ///
    /// Runs reachability on the moralized ancestral graph of `{x, y} ∪ z`
    /// with `z` removed.
    pub fn d_separated(&self, x: usize, y: usize, z: &NodeSet) -> Result<bool> {
        self.check(x)?;
        self.check(y)?;
        if x == y {
            return Err(invalid("d-separation needs two distinct nodes"));
        }
        if z.contains(x) || z.contains(y) {
            return Err(invalid("conditioning set must not contain x or y"));
        }
        if let Some(v) = z.iter().find(|&v| v >= self.n) {
            return Err(Error::NodeOutOfRange { node: v, n: self.n });
        }
        Ok(!moral_connected(&self.parents, x, y, z))
    }

    /// Serializes as `n` followed by one `i j` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (i, j) in self.edges() {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    /// Parses the edge-list format written by [`Dag::to_edge_list`]. Lines
    /// starting with `#` and blank lines are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let (n, edges) = parse_pairs(text)?;
        Self::from_edges(n, &edges)
    }
}

/// Kahn's algorithm with a min-heap of ready nodes; `None` on a cycle.
fn kahn_order(children: &[NodeSet], parents: &[NodeSet]) -> Option<Vec<usize>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let n = children.len();
    let mut indeg: Vec<usize> = parents.iter().map(NodeSet::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for c in children[v].iter() {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Connectivity of `x` and `y` in the moral graph of the ancestral set of
/// `{x, y} ∪ z`, after deleting `z`.
pub(crate) fn moral_connected(parents: &[NodeSet], x: usize, y: usize, z: &NodeSet) -> bool {
    let n = parents.len();
    let mut keep = NodeSet::new(n);
    let mut stack: Vec<usize> = z.iter().chain([x, y]).collect();
    while let Some(v) = stack.pop() {
        if keep.insert(v) {
            stack.extend(parents[v].iter().filter(|p| !keep.contains(*p)));
        }
    }
    let mut nbr = vec![NodeSet::new(n); n];
    for v in keep.iter() {
        let pa: Vec<usize> = parents[v].iter().collect();
        for (k, &a) in pa.iter().enumerate() {
            nbr[a].insert(v);
            nbr[v].insert(a);
            for &b in &pa[k + 1..] {
                nbr[a].insert(b);
                nbr[b].insert(a);
            }
        }
    }
    let mut seen = NodeSet::new(n);
    seen.insert(x);
    let mut queue = VecDeque::from([x]);
    while let Some(v) = queue.pop_front() {
        if v == y {
            return true;
        }
        for w in nbr[v].iter() {
            if !z.contains(w) && seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    false
}

/// Reads `n` and a list of `i j` pairs; shared by the DAG and summary-graph formats.
pub(crate) fn parse_pairs(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut n = None;
    let mut edges = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| Error::Parse { line: ln + 1, msg: msg.to_string() };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match n {
            None => {
                if fields.len() != 1 {
                    return Err(err("expected node count"));
                }
                n = Some(fields[0].parse::<usize>().map_err(|_| err("bad node count"))?);
            }
            Some(_) => {
                if fields.len() != 2 {
                    return Err(err("expected `i j`"));
                }
                let i = fields[0].parse().map_err(|_| err("bad node index"))?;
                let j = fields[1].parse().map_err(|_| err("bad node index"))?;
                edges.push((i, j));
            }
        }
    }
    let n = n.ok_or(Error::Parse { line: 0, msg: "missing node count".into() })?;
    Ok((n, edges))
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn set(g: &Dag, xs: &[usize]) -> NodeSet {
        NodeSet::from_iter_with(g.n(), xs.iter().copied())
    }

    #[test]
    fn parents_and_children() {
        let c = collider();
        assert_eq!(c.parents(2).unwrap().to_vec(), vec![0, 1]);
        assert!(c.children(2).unwrap().is_empty());
        assert!(Dag::empty(3).parents(1).unwrap().is_empty());
        let ch = chain();
        assert_eq!(ch.parents(1).unwrap().to_vec(), vec![0]);
        assert_eq!(ch.children(0).unwrap().to_vec(), vec![1]);
        assert_eq!(complete(3).children(0).unwrap().to_vec(), vec![1, 2]);
        assert!(matches!(ch.parents(3), Err(Error::NodeOutOfRange { node: 3, n: 3 })));
        assert!(ch.children(7).is_err());
    }

    #[test]
    fn ancestors_descendants_roots() {
        let ch = chain();
        assert_eq!(ch.ancestors(2).unwrap().to_vec(), vec![0, 1, 2]);
        assert_eq!(ch.descendants(0).unwrap().to_vec(), vec![0, 1, 2]);
        assert_eq!(ch.roots(2).unwrap().to_vec(), vec![0]);
        let c = collider();
        assert_eq!(c.ancestors(0).unwrap().to_vec(), vec![0]);
        assert_eq!(c.descendants(2).unwrap().to_vec(), vec![2]);
        assert_eq!(c.roots(2).unwrap().to_vec(), vec![0, 1]);
        let single = Dag::empty(1);
        assert_eq!(single.ancestors(0).unwrap().to_vec(), vec![0]);
        assert_eq!(single.roots(0).unwrap().to_vec(), vec![0]);
        assert_eq!(Dag::empty(4).descendants(2).unwrap().to_vec(), vec![2]);
        assert!(ch.ancestors(3).is_err());
        assert!(ch.roots(9).is_err());
    }

    #[test]
    fn relatives_examples() {
        let c = collider();
        assert_eq!(c.relatives(0).unwrap().to_vec(), vec![0, 2]);
        assert_eq!(c.relatives(2).unwrap().to_vec(), vec![0, 1, 2]);
        let ch = chain();
        for v in 0..3 {
            assert_eq!(ch.relatives(v).unwrap().to_vec(), vec![0, 1, 2]);
        }
        assert_eq!(Dag::empty(1).relatives(0).unwrap().to_vec(), vec![0]);
        assert!(ch.relatives(5).is_err());
    }

    #[test]
    fn topological_order_tie_break() {
        assert_eq!(chain().topological_order(), &[0, 1, 2]);
        assert_eq!(Dag::empty(3).topological_order(), &[0, 1, 2]);
        assert_eq!(collider().topological_order(), &[0, 1, 2]);
        let g = Dag::from_edges(4, &[(3, 0), (2, 1)]).unwrap();
        assert_eq!(g.topological_order(), &[2, 1, 3, 0]);
    }

    #[test]
    fn d_separation_examples() {
        let c = collider();
        assert!(c.d_separated(0, 1, &NodeSet::new(3)).unwrap());
        assert!(!c.d_separated(0, 1, &set(&c, &[2])).unwrap());
        let ch = chain();
        assert!(ch.d_separated(0, 2, &set(&ch, &[1])).unwrap());
        assert!(!ch.d_separated(0, 2, &NodeSet::new(3)).unwrap());
        assert!(ch.d_separated(0, 0, &NodeSet::new(3)).is_err());
        assert!(ch.d_separated(0, 2, &set(&ch, &[0])).is_err());
    }

    #[test]
    fn collider_descendant_opens_path() {
        // 0 -> 2 <- 1, 2 -> 3: conditioning on 3 opens 0 - 1
        let g = Dag::from_edges(4, &[(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(g.d_separated(0, 1, &NodeSet::new(4)).unwrap());
        assert!(!g.d_separated(0, 1, &set(&g, &[3])).unwrap());
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(Dag::from_edges(2, &[(0, 0)]), Err(Error::SelfLoop(0))));
        assert!(matches!(Dag::from_edges(2, &[(0, 1), (1, 0)]), Err(Error::Cycle)));
        assert!(matches!(Dag::from_edges(2, &[(0, 2)]), Err(Error::NodeOutOfRange { .. })));
        assert!(Dag::from_adjacency(&[vec![false, true], vec![false]]).is_err());
    }

    #[test]
    fn edge_list_format() {
        let g = collider();
        let text = g.to_edge_list();
        assert_eq!(text, "3\n0 2\n1 2\n");
        assert_eq!(Dag::parse_edge_list(&text).unwrap(), g);
        assert!(Dag::parse_edge_list("# comment\n2\n\n0 1\n").is_ok());
        assert!(matches!(Dag::parse_edge_list("2\n0 0\n"), Err(Error::SelfLoop(0))));
        assert!(matches!(Dag::parse_edge_list("2\n0 1\n1 0\n"), Err(Error::Cycle)));
        assert!(matches!(Dag::parse_edge_list("2\n0 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(Dag::parse_edge_list("").is_err());
    }

    #[test]
    fn clone_drops_nothing_observable() {
        let g = chain();
        let _ = g.relatives(0).unwrap();
        let h = g.clone();
        assert_eq!(h.relatives(2).unwrap(), g.relatives(2).unwrap());
        assert_eq!(h, g);
    }
}
