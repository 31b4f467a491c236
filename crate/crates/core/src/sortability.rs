//! Edge-counting sortability over arbitrary node criteria, the relatives,
//! variance and R² criteria, and the ER lower bound on strictly increasing
//! relatives along an edge.

use nalgebra::{Cholesky, DMatrix};

use crate::error::{invalid, Error, Result};
use crate::graph::Dag;
use crate::scm::{mean_var, DataMatrix};

/// A real-valued score per node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeCriterion(Vec<f64>);

impl NodeCriterion {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("node criterion"));
        }
        Ok(NodeCriterion(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<usize>> for NodeCriterion {
    fn from(v: Vec<usize>) -> Self {
        NodeCriterion(v.into_iter().map(|x| x as f64).collect())
    }
}

/// Contribution of edge `x -> y`: 0, ½ or 1 as `rho(x)` is greater than,
/// equal to or less than `rho(y)`.
#[inline]
pub fn edge_score(rho_x: f64, rho_y: f64) -> f64 {
    if rho_x < rho_y {
        1.0
    } else if rho_x == rho_y {
        0.5
    } else {
        0.0
    }
}

/// Mean edge score over all edges of `g`. Values are compared exactly.
pub fn sortability(g: &Dag, rho: &NodeCriterion) -> Result<f64> {
    if rho.len() != g.n() {
        return Err(invalid(format!("criterion has {} values for {} nodes", rho.len(), g.n())));
    }
    let e = g.edge_count();
    if e == 0 {
        return Err(Error::NoEdges);
    }
    let v = rho.values();
    let total: f64 = g.edges().map(|(x, y)| edge_score(v[x], v[y])).sum();
    Ok(total / e as f64)
}

/// `|relatives(v)|` for every node.
pub fn rel_criterion(g: &Dag) -> NodeCriterion {
    g.relative_counts().into()
}

/// Oracle rel-sortability of `g`.
pub fn rel_sortability(g: &Dag) -> Result<f64> {
    sortability(g, &rel_criterion(g))
}

/// Sample variance of each column.
pub fn var_criterion(data: &DataMatrix) -> Result<NodeCriterion> {
    if data.m() < 2 {
        return Err(invalid("variance needs at least two observations"));
    }
    NodeCriterion::new(data.columns().iter().map(|c| mean_var(c).1).collect())
}

/// R² criterion together with a flag telling whether the ridge fallback was used.
#[derive(Debug, Clone, PartialEq)]
pub struct R2Criterion {
    pub criterion: NodeCriterion,
    pub ridge_applied: bool,
}

/// R² of the least-squares regression (with intercept) of each column on
/// all the others, computed as `1 - 1/(R^{-1})_jj` from the correlation
/// matrix `R`. A singular `R` gets `1e-8·I` added.
pub fn r2_criterion(data: &DataMatrix) -> Result<R2Criterion> {
    let n = data.n();
    if n == 1 {
        return Ok(R2Criterion { criterion: NodeCriterion(vec![0.0]), ridge_applied: false });
    }
    if data.m() <= n {
        return Err(invalid(format!("R² needs more observations ({}) than variables ({n})", data.m())));
    }
    let corr = crate::discovery::correlation_matrix(data)?;
    let (inv, ridge_applied) = match Cholesky::new(corr.clone()) {
        Some(ch) if well_conditioned(&ch) => (ch.inverse(), false),
        _ => {
            let ridged = corr + DMatrix::identity(n, n) * 1e-8;
            let ch = Cholesky::new(ridged).ok_or_else(|| invalid("correlation matrix not positive semidefinite"))?;
            (ch.inverse(), true)
        }
    };
    let values = (0..n).map(|j| (1.0 - 1.0 / inv[(j, j)]).clamp(0.0, 1.0)).collect();
    Ok(R2Criterion { criterion: NodeCriterion::new(values)?, ridge_applied })
}

fn well_conditioned(ch: &Cholesky<f64, nalgebra::Dyn>) -> bool {
    let d = ch.l_dirty().diagonal();
    let (mn, mx) = d.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    mn > 0.0 && (mx / mn).powi(2) < 1e12
}

/// Lower bound `max(1 - exp(e^{-2c·q_y} - e^{-2c·q_x}), ½)` on the limiting
/// probability that an ER edge `x -> y` at quantile positions `q_x < q_y`
/// has strictly more relatives at its head.
pub fn lower_bound_edge(c: f64, q_x: f64, q_y: f64) -> Result<f64> {
    Ok(lower_bound_first_term(c, q_x, q_y)?.max(0.5))
}

/// The first argument of the maximum in [`lower_bound_edge`].
pub fn lower_bound_first_term(c: f64, q_x: f64, q_y: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(invalid(format!("density c must be positive, got {c}")));
    }
    if !(0.0..=1.0).contains(&q_x) || !(0.0..=1.0).contains(&q_y) {
        return Err(invalid("quantiles must lie in [0, 1]"));
    }
    if q_x >= q_y {
        return Err(invalid(format!("need q_x < q_y, got q_x={q_x}, q_y={q_y}")));
    }
    let a = (-2.0 * c * q_y).exp() - (-2.0 * c * q_x).exp();
    Ok(-a.exp_m1())
}
