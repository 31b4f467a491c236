//! Order-based causal discovery: ordering variables by their estimated
//! number of relatives, then recovering parents by adaptive-lasso
//! regression on the variables that precede each target.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::graph::Dag;
use crate::scm::DataMatrix;
use crate::sortability::NodeCriterion;
use crate::stats::student_t_quantile;

/// A permutation of the nodes; position `k` holds the `k`-th node in ascending criterion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordering(Vec<usize>);

impl Ordering {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &v in &perm {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(invalid(format!("{perm:?} is not a permutation of 0..{n}")));
            }
        }
        Ok(Ordering(perm))
    }

    pub fn identity(n: usize) -> Self {
        Ordering((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `positions()[v]` is the index of node `v` in the ordering.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (k, &v) in self.0.iter().enumerate() {
            pos[v] = k;
        }
        pos
    }
}

/// Binary adjacency estimated by [`sort_n_regress`]; acyclic by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimatedGraph(Dag);

impl EstimatedGraph {
    pub fn from_dag(dag: Dag) -> Self {
        EstimatedGraph(dag)
    }

    pub fn as_dag(&self) -> &Dag {
        &self.0
    }

    pub fn into_dag(self) -> Dag {
        self.0
    }

    pub fn to_edge_list(&self) -> String {
        self.0.to_edge_list()
    }
}

impl std::ops::Deref for EstimatedGraph {
    type Target = Dag;

    fn deref(&self) -> &Dag {
        &self.0
    }
}

/// Pearson correlation matrix of the columns.
pub fn correlation_matrix(data: &DataMatrix) -> Result<DMatrix<f64>> {
    if data.m() < 2 {
        return Err(invalid("correlation needs at least two observations"));
    }
    let z = data.standardized()?;
    let mut c = gram(&z);
    let denom = (data.m() - 1) as f64;
    let n = data.n();
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] = if i == j { 1.0 } else { (c[(i, j)] / denom).clamp(-1.0, 1.0) };
        }
    }
    Ok(c)
}

/// `Z^T Z` over the columns of `z`.
fn gram(z: &DataMatrix) -> DMatrix<f64> {
    let n = z.n();
    let cols = z.columns();
    let upper: Vec<(usize, usize, f64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i..n).map(move |j| (i, j, cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum()))
        })
        .collect();
    let mut g = DMatrix::zeros(n, n);
    for (i, j, v) in upper {
        g[(i, j)] = v;
        g[(j, i)] = v;
    }
    g
}

/// Smallest absolute sample correlation significant at level `alpha` under
/// the two-sided t-test for zero correlation between Gaussians:
/// `t / sqrt(m - 2 + t²)` with `t` the `1 - alpha/2` quantile on `m - 2`
/// degrees of freedom.
pub fn correlation_threshold(m: usize, alpha: f64) -> Result<f64> {
    if m < 4 {
        return Err(invalid(format!("threshold needs m >= 4, got {m}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let df = (m - 2) as f64;
    let t = student_t_quantile(1.0 - alpha / 2.0, df)?;
    Ok(t / (df + t * t).sqrt())
}

/// Per column, the number of entries of the correlation matrix whose
/// absolute value exceeds the threshold (the diagonal always counts).
pub fn estimate_relative_counts(data: &DataMatrix, alpha: f64) -> Result<Vec<usize>> {
    let n = data.n();
    if n == 1 {
        return Ok(vec![1]);
    }
    let c = correlation_matrix(data)?;
    let eps = correlation_threshold(data.m(), alpha)?;
    Ok((0..n)
        .map(|j| (0..n).filter(|&i| i == j || c[(i, j)].abs() > eps).count())
        .collect())
}

/// Ascending order of the estimated number of relatives, ties by node index.
pub fn estimate_relative_order(data: &DataMatrix, alpha: f64) -> Result<Ordering> {
    let counts = estimate_relative_counts(data, alpha)?;
    Ok(criterion_order(&counts.into()))
}

/// Stable ascending argsort of a criterion; equal values keep index order.
pub fn criterion_order(values: &NodeCriterion) -> Ordering {
    let v = values.values();
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    Ordering(idx)
}

/// Least-squares coefficients with a flag for the rank-deficiency fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coef: DVector<f64>,
    pub ridge_applied: bool,
}

/// Least-squares coefficients of `y` on the columns of `x` (no intercept).
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit> {
    check_design(x, y)?;
    let g = x.transpose() * x;
    let b = x.transpose() * y;
    Ok(solve_normal(&g, &b))
}

fn check_design(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(invalid(format!("design has {} rows, target has {}", x.nrows(), y.len())));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("regression input"));
    }
    Ok(())
}

/// Solves `G β = b` by Cholesky; near-singular systems get `1e-10·I`, and
/// an SVD least-squares solve if that is still not enough.
fn solve_normal(g: &DMatrix<f64>, b: &DVector<f64>) -> OlsFit {
    let k = g.nrows();
    if k == 0 {
        return OlsFit { coef: DVector::zeros(0), ridge_applied: false };
    }
    if let Some(ch) = Cholesky::new(g.clone()) {
        let d = ch.l_dirty().diagonal();
        let (mn, mx) = d.iter().fold((f64::INFINITY, 0.0f64), |(a, c), &v| (a.min(v), c.max(v)));
        if mn > 0.0 && (mx / mn).powi(2) < 1e12 {
            return OlsFit { coef: ch.solve(b), ridge_applied: false };
        }
    }
    let ridged = g + DMatrix::identity(k, k) * 1e-10;
    let coef = match Cholesky::new(ridged.clone()) {
        Some(ch) => ch.solve(b),
        None => ridged
            .svd(true, true)
            .solve(b, 1e-12)
            .unwrap_or_else(|_| DVector::zeros(k)),
    };
    OlsFit { coef, ridge_applied: true }
}

/// Selected adaptive-lasso solution.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub coef: DVector<f64>,
    pub lambda: f64,
    pub bic: f64,
}

const GRID_POINTS: usize = 50;
const GRID_SPAN: f64 = 1e-4;
const CD_TOL: f64 = 1e-8;
const CD_MAX_SWEEPS: usize = 10_000;

/// Sufficient statistics of a no-intercept regression problem.
struct Problem<'a> {
    g: &'a DMatrix<f64>,
    b: &'a DVector<f64>,
    yty: f64,
    m: usize,
}

impl Problem<'_> {
    fn rss(&self, beta: &DVector<f64>) -> f64 {
        let v = self.yty - 2.0 * beta.dot(self.b) + (self.g * beta).dot(beta);
        v.max(self.yty * 1e-15).max(f64::MIN_POSITIVE)
    }

    fn bic(&self, beta: &DVector<f64>) -> f64 {
        let k = beta.iter().filter(|&&v| v != 0.0).count();
        let m = self.m as f64;
        m * (self.rss(beta) / m).ln() + k as f64 * m.ln()
    }

    /// Adaptive penalty weights `1/|β_OLS|`; `None` marks an excluded coefficient.
    fn weights(beta_ols: &DVector<f64>) -> Vec<Option<f64>> {
        beta_ols
            .iter()
            .map(|&v| (v != 0.0).then(|| 1.0 / v.abs()))
            .collect()
    }

    fn lambda_max(&self, weights: &[Option<f64>]) -> f64 {
        weights
            .iter()
            .enumerate()
            .filter_map(|(k, w)| w.map(|w| 2.0 * self.b[k].abs() / w))
            .fold(0.0, f64::max)
    }

    /// Cyclic coordinate descent on
    /// `‖y - Xβ‖² + λ Σ_k w_k |β_k|`, warm-started from `beta`.
    fn coordinate_descent(&self, weights: &[Option<f64>], lambda: f64, beta: &mut DVector<f64>) {
        let k = beta.len();
        let mut gb = self.g * &*beta;
        for _ in 0..CD_MAX_SWEEPS {
            let mut max_delta = 0.0f64;
            for j in 0..k {
                let Some(w) = weights[j] else {
                    if beta[j] != 0.0 {
                        let d = -beta[j];
                        beta[j] = 0.0;
                        gb.axpy(d, &self.g.column(j), 1.0);
                    }
                    continue;
                };
                let gjj = self.g[(j, j)];
                if gjj <= 0.0 {
                    continue;
                }
                let rho = self.b[j] - gb[j] + gjj * beta[j];
                let new = soft_threshold(rho, 0.5 * lambda * w) / gjj;
                let d = new - beta[j];
                if d != 0.0 {
                    beta[j] = new;
                    gb.axpy(d, &self.g.column(j), 1.0);
                    max_delta = max_delta.max(d.abs());
                }
            }
            if max_delta < CD_TOL {
                break;
            }
        }
    }

    fn adaptive_lasso(&self, beta_ols: &DVector<f64>) -> LassoFit {
        let k = beta_ols.len();
        let weights = Self::weights(beta_ols);
        let lmax = self.lambda_max(&weights);
        let zero = DVector::zeros(k);
        let mut best = LassoFit { bic: self.bic(&zero), coef: zero, lambda: lmax };
        if lmax == 0.0 {
            return best;
        }
        let mut beta = DVector::zeros(k);
        for step in 1..GRID_POINTS {
            let lambda = lmax * GRID_SPAN.powf(step as f64 / (GRID_POINTS - 1) as f64);
            self.coordinate_descent(&weights, lambda, &mut beta);
            let bic = self.bic(&beta);
            if bic < best.bic {
                best = LassoFit { coef: beta.clone(), lambda, bic };
            }
        }
        best
    }
}

fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Adaptive lasso with penalty `λ Σ |β_i| / |β_OLS_i|`, `λ` chosen by BIC
/// over a 50-point log grid from `λ_max` down to `1e-4·λ_max`.
/// Predictors whose OLS coefficient is exactly zero are excluded.
pub fn adaptive_lasso_bic(x: &DMatrix<f64>, y: &DVector<f64>, beta_ols: &DVector<f64>) -> Result<LassoFit> {
    check_design(x, y)?;
    if beta_ols.len() != x.ncols() || beta_ols.iter().any(|v| !v.is_finite()) {
        return Err(invalid("OLS coefficients must be finite and match the predictor count"));
    }
    let g = x.transpose() * x;
    let b = x.transpose() * y;
    let p = Problem { g: &g, b: &b, yty: y.dot(y), m: x.nrows() };
    Ok(p.adaptive_lasso(beta_ols))
}

/// The weighted-lasso solution at a single fixed `λ`, as used on the BIC grid.
pub fn adaptive_lasso_at(x: &DMatrix<f64>, y: &DVector<f64>, beta_ols: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    check_design(x, y)?;
    let g = x.transpose() * x;
    let b = x.transpose() * y;
    let p = Problem { g: &g, b: &b, yty: y.dot(y), m: x.nrows() };
    let mut beta = DVector::zeros(x.ncols());
    p.coordinate_descent(&Problem::weights(beta_ols), lambda, &mut beta);
    Ok(beta)
}

/// Smallest `λ` for which the adaptive-lasso solution is all zero.
pub fn adaptive_lambda_max(x: &DMatrix<f64>, y: &DVector<f64>, beta_ols: &DVector<f64>) -> f64 {
    let b = x.transpose() * y;
    let g = DMatrix::zeros(0, 0);
    let p = Problem { g: &g, b: &b, yty: 0.0, m: 0 };
    p.lambda_max(&Problem::weights(beta_ols))
}

/// Regresses each variable on its predecessors in `order` (after
/// standardizing the data) and keeps the predictors with nonzero
/// adaptive-lasso coefficients as parents.
pub fn sort_n_regress(data: &DataMatrix, order: &Ordering) -> Result<EstimatedGraph> {
    let n = data.n();
    if order.len() != n {
        return Err(invalid(format!("ordering has {} nodes, data has {n} columns", order.len())));
    }
    if n == 1 {
        return Ok(EstimatedGraph(Dag::empty(1)));
    }
    let z = data.standardized()?;
    sort_n_regress_gram(&gram(&z), data.m(), order)
}

/// [`sort_n_regress`] from sufficient statistics: `gram` is `Z^T Z` of the
/// standardized data and `m` the sample size. A population covariance
/// scaled by `m` can be passed to get the large-sample answer.
pub fn sort_n_regress_gram(gram: &DMatrix<f64>, m: usize, order: &Ordering) -> Result<EstimatedGraph> {
    let n = gram.nrows();
    if gram.ncols() != n || order.len() != n {
        return Err(invalid("Gram matrix and ordering sizes differ"));
    }
    if gram.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Gram matrix"));
    }
    let s = order.as_slice();
    let parents: Vec<Vec<usize>> = (1..n)
        .into_par_iter()
        .map(|j| {
            let t = s[j];
            let preds = &s[..j];
            let g = DMatrix::from_fn(j, j, |a, b| gram[(preds[a], preds[b])]);
            let b = DVector::from_fn(j, |a, _| gram[(preds[a], t)]);
            let ols = solve_normal(&g, &b);
            let p = Problem { g: &g, b: &b, yty: gram[(t, t)], m };
            let fit = p.adaptive_lasso(&ols.coef);
            preds
                .iter()
                .zip(fit.coef.iter())
                .filter(|(_, &c)| c != 0.0)
                .map(|(&v, _)| v)
                .collect()
        })
        .collect();
    let edges: Vec<(usize, usize)> = (1..n)
        .zip(parents)
        .flat_map(|(j, ps)| ps.into_iter().map(move |p| (p, s[j])))
        .collect();
    Ok(EstimatedGraph(Dag::from_edges(n, &edges)?))
}

/// Estimated relative order followed by [`sort_n_regress`].
pub fn rel_sort_n_regress(data: &DataMatrix, alpha: f64) -> Result<EstimatedGraph> {
    if data.n() == 1 {
        return Ok(EstimatedGraph(Dag::empty(1)));
    }
    let order = estimate_relative_order(data, alpha)?;
    sort_n_regress(data, &order)
}
