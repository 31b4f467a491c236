//! Linear additive-Gaussian structural causal models and observational
//! sampling under the raw, sSCM and iSCM regimes.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::graph::Dag;
use crate::rng::Rng;

/// Parameter ranges for [`LinearScm::sample`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScmParams {
    pub weight_range: (f64, f64),
    pub sigma_range: (f64, f64),
    /// Flip each edge weight's sign with probability ½.
    pub signed_weights: bool,
}

impl Default for ScmParams {
    fn default() -> Self {
        ScmParams {
            weight_range: (0.5, 1.0),
            sigma_range: (0.5, 1.0),
            signed_weights: false,
        }
    }
}

/// A DAG with edge weights and per-node noise standard deviations.
#[derive(Debug, Clone)]
pub struct LinearScm {
    dag: Dag,
    weights: Vec<Vec<f64>>,
    sigma: Vec<f64>,
}

impl LinearScm {
    /// Checks that the weight support equals the edge set and that every
    /// noise scale is positive.
    pub fn new(dag: Dag, weights: Vec<Vec<f64>>, sigma: Vec<f64>) -> Result<Self> {
        let n = dag.n();
        if weights.len() != n || weights.iter().any(|r| r.len() != n) || sigma.len() != n {
            return Err(invalid("weight matrix and sigma must match the node count"));
        }
        for i in 0..n {
            for j in 0..n {
                let w = weights[i][j];
                if !w.is_finite() {
                    return Err(Error::NonFinite("weights"));
                }
                if (w != 0.0) != dag.has_edge(i, j) {
                    return Err(invalid(format!("weight support differs from edge set at ({i}, {j})")));
                }
            }
        }
        if sigma.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(invalid("noise scales must be positive and finite"));
        }
        Ok(LinearScm { dag, weights, sigma })
    }

    /// Draws edge weights and noise scales independently and uniformly from the given ranges.
    pub fn sample(dag: Dag, params: &ScmParams, rng: &mut Rng) -> Self {
        let n = dag.n();
        let mut weights = vec![vec![0.0; n]; n];
        let (wl, wh) = params.weight_range;
        for (i, j) in dag.edges() {
            let mut w = rng.random_range(wl..wh);
            if params.signed_weights && rng.random_bool(0.5) {
                w = -w;
            }
            weights[i][j] = w;
        }
        let (sl, sh) = params.sigma_range;
        let sigma = (0..n).map(|_| rng.random_range(sl..sh)).collect();
        LinearScm { dag, weights, sigma }
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Same structure and weights with every noise scale multiplied by `factor`.
    pub fn with_scaled_noise(&self, factor: f64) -> Result<Self> {
        let sigma = self.sigma.iter().map(|s| s * factor).collect();
        Self::new(self.dag.clone(), self.weights.clone(), sigma)
    }

    /// Population covariance `(I - W)^{-T} D (I - W)^{-1}`, `D = diag(sigma²)`.
    pub fn population_covariance(&self) -> Vec<Vec<f64>> {
        let n = self.dag.n();
        // total effects: X = B^T ε-scaled where B = (I - W)^{-1}; propagate in topological order
        let mut b = vec![vec![0.0; n]; n];
        for &j in self.dag.topological_order() {
            b[j][j] = 1.0;
            for i in self.dag.parents(j).expect("in range").iter() {
                let w = self.weights[i][j];
                for k in 0..n {
                    b[k][j] += b[k][i] * w;
                }
            }
        }
        let mut cov = vec![vec![0.0; n]; n];
        for (i, row) in cov.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = (0..n).map(|k| b[k][i] * b[k][j] * self.sigma[k].powi(2)).sum();
            }
        }
        cov
    }
}

/// Draws [`LinearScm`] parameters with the default ranges: weights and
/// noise standard deviations from `Unif(0.5, 1)`, positive weights only.
pub fn sample_params(dag: Dag, rng: &mut Rng) -> LinearScm {
    LinearScm::sample(dag, &ScmParams::default(), rng)
}

/// How observations are standardized during generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// No standardization.
    Raw,
    /// Each column standardized after the full sample is generated.
    Sscm,
    /// Each variable standardized right after it is generated, before its children use it.
    Iscm,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Raw, Regime::Sscm, Regime::Iscm];

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Raw => "raw",
            Regime::Sscm => "sscm",
            Regime::Iscm => "iscm",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Regime::Raw),
            "sscm" => Ok(Regime::Sscm),
            "iscm" => Ok(Regime::Iscm),
            other => Err(Error::Config(format!("unknown scheme `{other}` (raw, sscm, iscm)"))),
        }
    }
}

/// An `m × n` table of observations stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    m: usize,
    columns: Vec<Vec<f64>>,
}

impl DataMatrix {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let m = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != m) {
            return Err(invalid("columns have different lengths"));
        }
        if columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("data matrix"));
        }
        Ok(DataMatrix { m, columns })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<Vec<f64>> {
        self.columns
    }

    /// Copy with every column shifted to zero mean and scaled to unit sample variance.
    pub fn standardized(&self) -> Result<Self> {
        let mut columns = self.columns.clone();
        for (j, col) in columns.iter_mut().enumerate() {
            standardize(col).ok_or(Error::ConstantColumn(j))?;
        }
        Ok(DataMatrix { m: self.m, columns })
    }

    /// Writes a `x0,...,x{n-1}` header and one row per observation with
    /// 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (0..self.n()).map(|j| format!("x{j}")).collect();
        writeln!(out, "{}", header.join(","))?;
        let mut line = String::new();
        for r in 0..self.m {
            line.clear();
            for (j, col) in self.columns.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{:.16e}", col[r]));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Reads the format written by [`DataMatrix::write_csv`].
    pub fn read_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty input".into() })?;
        let n = header.split(',').count();
        let mut columns = vec![Vec::new(); n];
        for (ln, line) in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != n {
                return Err(Error::Parse { line: ln + 1, msg: format!("expected {n} fields") });
            }
            for (col, f) in columns.iter_mut().zip(fields) {
                col.push(f.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: ln + 1,
                    msg: e.to_string(),
                })?);
            }
        }
        Self::from_columns(columns)
    }
}

/// Sample mean and variance (denominator `m - 1`).
pub(crate) fn mean_var(x: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mean = x.iter().sum::<f64>() / m;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, var)
}

/// In-place standardization; `None` if the column is constant.
fn standardize(x: &mut [f64]) -> Option<()> {
    if x.len() < 2 {
        return None;
    }
    let (mean, var) = mean_var(x);
    if !(var > 0.0) {
        return None;
    }
    let sd = var.sqrt();
    x.iter_mut().for_each(|v| *v = (*v - mean) / sd);
    Some(())
}

/// Simulates `m` observations in topological order with i.i.d. standard
/// normal noise, standardizing according to `regime`.
pub fn sample_observations(scm: &LinearScm, m: usize, regime: Regime, rng: &mut Rng) -> Result<DataMatrix> {
    if m < 1 {
        return Err(invalid("need at least one observation"));
    }
    let n = scm.dag.n();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); n];
    for &j in scm.dag.topological_order() {
        let s = scm.sigma[j];
        let mut col: Vec<f64> = (0..m)
            .map(|_| s * rng.sample::<f64, _>(StandardNormal))
            .collect();
        for i in scm.dag.parents(j)?.iter() {
            let w = scm.weights[i][j];
            for (x, &p) in col.iter_mut().zip(&columns[i]) {
                *x += w * p;
            }
        }
        if regime == Regime::Iscm {
            standardize(&mut col).ok_or(Error::ConstantColumn(j))?;
        }
        columns[j] = col;
    }
    if regime == Regime::Sscm {
        for (j, col) in columns.iter_mut().enumerate() {
            standardize(col).ok_or(Error::ConstantColumn(j))?;
        }
    }
    DataMatrix::from_columns(columns)
}
