//! Brute-force reference implementations shared by the integration tests.
//! They work from the adjacency matrix alone and never call the library's
//! closure, separation or adjustment code.

#![allow(dead_code)]

use relsort::rng::Rng;
use relsort::{sample_er_dag, sample_sf_dag, Dag};
use rand::Rng as _;

pub type Adj = Vec<Vec<bool>>;

pub fn adj(g: &Dag) -> Adj {
    g.adjacency_matrix()
}

/// Nodes reachable from `s` along directed edges, `s` included.
pub fn reach(a: &Adj, s: usize) -> Vec<bool> {
    let n = a.len();
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut stack = vec![s];
    while let Some(v) = stack.pop() {
        for w in 0..n {
            if a[v][w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

pub fn desc(a: &Adj, v: usize) -> Vec<bool> {
    reach(a, v)
}

pub fn anc(a: &Adj, v: usize) -> Vec<bool> {
    (0..a.len()).map(|u| reach(a, u)[v]).collect()
}

/// `desc(anc(y))` straight from the definition.
pub fn relatives(a: &Adj, y: usize) -> Vec<bool> {
    let n = a.len();
    let an = anc(a, y);
    let mut out = vec![false; n];
    for u in (0..n).filter(|&u| an[u]) {
        for (w, r) in reach(a, u).into_iter().enumerate() {
            out[w] |= r;
        }
    }
    out
}

pub fn roots(a: &Adj, y: usize) -> Vec<bool> {
    let n = a.len();
    let an = anc(a, y);
    (0..n).map(|u| an[u] && (0..n).all(|p| !a[p][u])).collect()
}

pub fn to_vec(s: &[bool]) -> Vec<usize> {
    s.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

pub fn subset(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| !x || y)
}

/// All simple paths from `x` to `y` in the skeleton.
pub fn simple_paths(a: &Adj, x: usize, y: usize) -> Vec<Vec<usize>> {
    fn go(a: &Adj, path: &mut Vec<usize>, on: &mut Vec<bool>, y: usize, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if v == y {
            out.push(path.clone());
            return;
        }
        for w in 0..a.len() {
            if (a[v][w] || a[w][v]) && !on[w] {
                on[w] = true;
                path.push(w);
                go(a, path, on, y, out);
                path.pop();
                on[w] = false;
            }
        }
    }
    let mut on = vec![false; a.len()];
    on[x] = true;
    let mut out = Vec::new();
    go(a, &mut vec![x], &mut on, y, &mut out);
    out
}

/// Whether `path` is open given `z`: every collider has itself or a
/// descendant in `z`, and no other interior node is in `z`.
pub fn path_open(a: &Adj, path: &[usize], z: &[bool]) -> bool {
    for k in 1..path.len() - 1 {
        let (p, v, q) = (path[k - 1], path[k], path[k + 1]);
        let collider = a[p][v] && a[q][v];
        if collider {
            if !desc(a, v).iter().zip(z).any(|(&d, &zz)| d && zz) {
                return false;
            }
        } else if z[v] {
            return false;
        }
    }
    true
}

pub fn d_separated(a: &Adj, x: usize, y: usize, z: &[bool]) -> bool {
    simple_paths(a, x, y).iter().all(|p| !path_open(a, p, z))
}

fn is_causal(a: &Adj, path: &[usize]) -> bool {
    path.windows(2).all(|w| a[w[0]][w[1]])
}

/// Whether adjusting for `z` (the estimated parents of `i`) identifies the
/// effect of `i` on `j` in the true graph `a`, by path enumeration.
pub fn adjustment_valid(a: &Adj, i: usize, j: usize, z: &[bool]) -> bool {
    let n = a.len();
    if z[j] {
        return !desc(a, i)[j];
    }
    let paths = simple_paths(a, i, j);
    let mut forbidden = vec![false; n];
    for p in paths.iter().filter(|p| is_causal(a, p)) {
        for &w in &p[1..] {
            for (u, d) in desc(a, w).into_iter().enumerate() {
                forbidden[u] |= d;
            }
        }
    }
    if (0..n).any(|u| z[u] && forbidden[u]) {
        return false;
    }
    paths.iter().filter(|p| !is_causal(a, p)).all(|p| !path_open(a, p, z))
}

/// Structural intervention distance by path enumeration.
pub fn sid(g_true: &Dag, g_est: &Dag) -> usize {
    let a = adj(g_true);
    let h = adj(g_est);
    let n = a.len();
    let mut count = 0;
    for i in 0..n {
        let z: Vec<bool> = (0..n).map(|p| h[p][i]).collect();
        for j in (0..n).filter(|&j| j != i) {
            count += usize::from(!adjustment_valid(&a, i, j, &z));
        }
    }
    count
}

/// Every labelled DAG on `n` nodes (each unordered pair absent or oriented
/// either way, cyclic assignments dropped).
pub fn all_dags(n: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut edges = Vec::new();
        for &(i, j) in &pairs {
            match code % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            code /= 3;
        }
        if let Ok(g) = Dag::from_edges(n, &edges) {
            out.push(g);
        }
    }
    out
}

/// 1000 random ER and SF DAGs with `n <= 50` and `c <= 10`.
pub fn random_corpus(rng: &mut Rng) -> Vec<Dag> {
    let mut out = Vec::with_capacity(1000);
    while out.len() < 1000 {
        let n = rng.random_range(2..=50);
        if out.len() % 2 == 0 {
            let c = rng.random_range(0.1..=10.0);
            out.push(sample_er_dag(n, c, rng).unwrap().dag);
        } else {
            let c = rng.random_range(1..=10usize.min(n - 1));
            out.push(sample_sf_dag(n, c, rng).unwrap().dag);
        }
    }
    out
}

/// Student t CDF by Simpson quadrature after `t = sqrt(df)·tan(θ)`, which
/// turns the density into `cos(θ)^(df-1)` on `(-π/2, π/2)`.
pub fn t_cdf_quadrature(t: f64, df: f64) -> f64 {
    let f = |th: f64| th.cos().powf(df - 1.0);
    let simpson = |a: f64, b: f64| {
        let k = 200_000;
        let h = (b - a) / k as f64;
        let mut s = f(a) + f(b);
        for i in 1..k {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let half = std::f64::consts::FRAC_PI_2;
    let upper = (t / df.sqrt()).atan();
    simpson(-half, upper) / simpson(-half, half)
}

/// Quantile of [`t_cdf_quadrature`] by bisection.
pub fn t_quantile_quadrature(p: f64, df: f64) -> f64 {
    let (mut lo, mut hi) = (-1e3, 1e3);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if t_cdf_quadrature(mid, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
