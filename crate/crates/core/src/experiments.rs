//! Seeded Monte Carlo experiments with long-format CSV output.
//!
//! Every replicate draws from a substream keyed by
//! `(experiment, n, c, replicate)`, and results are collected in key order,
//! so the CSV is byte-identical for a given config whatever the number of
//! worker threads.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Deserialize;

use crate::discovery::{criterion_order, estimate_relative_counts, sort_n_regress, Ordering};
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::metrics::{shd, sid};
use crate::rng::{Rng, SeedStream};
use crate::samplers::{sample_er_dag, sample_sf_dag, sample_symmetric_summary, unroll, RandomDag, SummaryGraph};
use crate::scm::{sample_observations, LinearScm, Regime, ScmParams};
use crate::sortability::{lower_bound_edge, lower_bound_first_term, r2_criterion, rel_sortability, sortability, var_criterion, NodeCriterion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Heatmap,
    Schemes,
    Discovery,
    Timeseries,
    Bound,
}

impl Experiment {
    pub const ALL: [Experiment; 5] =
        [Experiment::Heatmap, Experiment::Schemes, Experiment::Discovery, Experiment::Timeseries, Experiment::Bound];

    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Heatmap => "heatmap",
            Experiment::Schemes => "schemes",
            Experiment::Discovery => "discovery",
            Experiment::Timeseries => "timeseries",
            Experiment::Bound => "bound",
        }
    }

    fn key(&self) -> u64 {
        *self as u64 + 1
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Graph family. `Forward` is the one-directional complete summary graph
/// and only applies to time-unrolled experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    Er,
    Sf,
    Forward,
}

impl GraphKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GraphKind::Er => "er",
            GraphKind::Sf => "sf",
            GraphKind::Forward => "forward",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "er" => Ok(GraphKind::Er),
            "sf" => Ok(GraphKind::Sf),
            "forward" => Ok(GraphKind::Forward),
            _ => Err(Error::Config(format!("unknown graph kind `{s}` (er, sf, forward)"))),
        }
    }
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub graph: GraphKind,
    /// Node counts; the summary-graph size `p` for `timeseries`.
    pub n: Vec<usize>,
    pub c: Vec<f64>,
    /// Replicates per grid cell; the replicate cap for `bound`.
    pub reps: usize,
    /// Observations per simulated dataset.
    pub samples: usize,
    pub alpha: f64,
    pub schemes: Vec<Regime>,
    /// Draw edge weights with a random sign.
    pub signed_weights: bool,
    /// Horizons for `timeseries`.
    pub t: Vec<usize>,
    pub seed: u64,
    /// Quantile buckets per axis for `bound`.
    pub buckets: usize,
    /// Edges required in every bucket before `bound` stops drawing.
    pub min_bucket_edges: usize,
    /// Worker threads; `None` uses the rayon default. Never affects output.
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Desk-scale defaults for each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = ExperimentConfig {
            experiment,
            graph: GraphKind::Er,
            n: vec![30],
            c: vec![2.0],
            reps: 10,
            samples: 10_000,
            alpha: 0.05,
            schemes: vec![Regime::Sscm],
            signed_weights: false,
            t: vec![],
            seed: 0,
            buckets: 10,
            min_bucket_edges: 2000,
            workers: None,
            out: None,
        };
        match experiment {
            Experiment::Heatmap => ExperimentConfig {
                n: vec![5, 10, 20, 50, 100],
                c: vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 20.0, 50.0],
                ..base
            },
            Experiment::Schemes => ExperimentConfig {
                c: (1..=10).map(f64::from).collect(),
                schemes: Regime::ALL.to_vec(),
                ..base
            },
            Experiment::Discovery => base,
            Experiment::Timeseries => ExperimentConfig {
                n: vec![10],
                c: vec![1.0],
                reps: 20,
                t: vec![2, 5, 10, 20, 50, 100, 200],
                ..base
            },
            Experiment::Bound => ExperimentConfig { n: vec![2000], c: vec![2.0, 5.0], reps: 1000, ..base },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n.is_empty() || self.c.is_empty() {
            return bad("n and c grids must be non-empty".into());
        }
        if self.reps == 0 {
            return bad("reps must be positive".into());
        }
        if let Some(c) = self.c.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return bad(format!("c must be positive and finite, got {c}"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        let min_n = match self.experiment {
            Experiment::Discovery => 1,
            _ => 2,
        };
        if let Some(n) = self.n.iter().find(|&&n| n < min_n) {
            return bad(format!("{} needs n >= {min_n}, got {n}", self.experiment));
        }
        match self.experiment {
            Experiment::Timeseries => {
                if self.graph == GraphKind::Sf {
                    return bad("timeseries supports graph er (symmetric) or forward".into());
                }
                if self.t.is_empty() || self.t.iter().any(|&t| t < 2) {
                    return bad("timeseries needs a non-empty T grid with every T >= 2".into());
                }
            }
            _ if self.graph == GraphKind::Forward => {
                return bad(format!("graph forward only applies to timeseries, not {}", self.experiment));
            }
            Experiment::Schemes | Experiment::Discovery => {
                if self.samples < 4 {
                    return bad(format!("samples must be at least 4, got {}", self.samples));
                }
                if self.schemes.is_empty() {
                    return bad("at least one scheme is required".into());
                }
            }
            Experiment::Bound => {
                if self.graph != GraphKind::Er {
                    return bad("bound is defined for ER graphs only".into());
                }
                if self.buckets == 0 || self.min_bucket_edges == 0 {
                    return bad("buckets and min_bucket_edges must be positive".into());
                }
            }
            Experiment::Heatmap => {}
        }
        Ok(())
    }

    /// Config lines written as `#` comments at the top of the CSV. The
    /// worker count and output path are left out so they cannot change the bytes.
    fn header_lines(&self) -> Vec<String> {
        let list = |v: Vec<String>| format!("[{}]", v.join(", "));
        let mut lines = vec![
            format!("experiment = \"{}\"", self.experiment),
            format!("graph = \"{}\"", self.graph),
            format!("n = {}", list(self.n.iter().map(usize::to_string).collect())),
            format!("c = {}", list(self.c.iter().map(|c| fmt_f64(*c)).collect())),
            format!("reps = {}", self.reps),
            format!("seed = {}", self.seed),
        ];
        match self.experiment {
            Experiment::Schemes | Experiment::Discovery => {
                lines.push(format!("samples = {}", self.samples));
                lines.push(format!("alpha = {}", fmt_f64(self.alpha)));
                lines.push(format!("scheme = {}", list(self.schemes.iter().map(|s| format!("\"{s}\"")).collect())));
                lines.push(format!("signed_weights = {}", self.signed_weights));
            }
            Experiment::Timeseries => lines.push(format!("T = {}", list(self.t.iter().map(usize::to_string).collect()))),
            Experiment::Bound => {
                lines.push(format!("buckets = {}", self.buckets));
                lines.push(format!("min_bucket_edges = {}", self.min_bucket_edges));
            }
            Experiment::Heatmap => {}
        }
        lines
    }
}

/// Partial settings from a TOML file or command-line flags; later layers win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub graph: Option<String>,
    pub n: Option<Vec<usize>>,
    pub c: Option<Vec<f64>>,
    pub reps: Option<usize>,
    pub samples: Option<usize>,
    pub alpha: Option<f64>,
    pub scheme: Option<Vec<String>>,
    pub signed_weights: Option<bool>,
    #[serde(rename = "T")]
    pub t: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub buckets: Option<usize>,
    pub min_bucket_edges: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn apply(self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(g) = self.graph {
            cfg.graph = g.parse()?;
        }
        if let Some(s) = self.scheme {
            cfg.schemes = s.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        }
        macro_rules! set {
            ($($f:ident => $g:ident),*) => { $(if let Some(v) = self.$f { cfg.$g = v; })* };
        }
        set!(n => n, c => c, reps => reps, samples => samples, alpha => alpha, signed_weights => signed_weights, t => t, seed => seed,
             buckets => buckets, min_bucket_edges => min_bucket_edges);
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        Ok(())
    }
}

/// Replicate column: an index, an aggregate, or a pooled row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    Index(usize),
    Mean,
    Sd,
    All,
}

impl fmt::Display for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rep::Index(i) => write!(f, "{i}"),
            Rep::Mean => f.write_str("mean"),
            Rep::Sd => f.write_str("sd"),
            Rep::All => f.write_str("all"),
        }
    }
}

/// One CSV row. `value == None` is written as `NA` and then `reason` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub experiment: Experiment,
    pub graph: GraphKind,
    pub n: usize,
    pub c: f64,
    pub scheme: Option<Regime>,
    pub t: Option<usize>,
    pub rep: Rep,
    pub seed: Option<u64>,
    pub metric: String,
    pub value: Option<f64>,
    pub reason: Option<String>,
}

pub const CSV_HEADER: &str = "experiment,graph,n,c,scheme,T,rep,seed,metric,value,reason";

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

impl Record {
    fn csv_line(&self) -> String {
        let opt = |o: Option<String>| o.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.graph,
            self.n,
            fmt_f64(self.c),
            opt(self.scheme.map(|s| s.to_string())),
            opt(self.t.map(|t| t.to_string())),
            self.rep,
            opt(self.seed.map(|s| s.to_string())),
            self.metric,
            self.value.map_or_else(|| "NA".to_string(), fmt_f64),
            opt(self.reason.clone()),
        )
    }
}

/// Writes the `#` config lines, the column header and the records.
pub fn write_csv<W: Write>(cfg: &ExperimentConfig, records: &[Record], mut out: W) -> Result<()> {
    writeln!(out, "# relsort {}", cfg.experiment)?;
    for line in cfg.header_lines() {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

/// Runs the configured experiment on a pool with `cfg.workers` threads.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match cfg.experiment {
        Experiment::Heatmap => run_heatmap(cfg),
        Experiment::Schemes => run_schemes(cfg),
        Experiment::Discovery => run_discovery(cfg),
        Experiment::Timeseries => run_timeseries(cfg),
        Experiment::Bound => run_bound(cfg),
    })
}

/// [`run`] followed by [`write_csv`] into a string.
pub fn run_to_csv(cfg: &ExperimentConfig) -> Result<String> {
    let records = run(cfg)?;
    let mut buf = Vec::new();
    write_csv(cfg, &records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}

struct Cell {
    n: usize,
    c: f64,
}

fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    cfg.n.iter().flat_map(|&n| cfg.c.iter().map(move |&c| Cell { n, c })).collect()
}

fn replicate_seed(cfg: &ExperimentConfig, n: usize, c: f64, rep: usize) -> u64 {
    SeedStream::new(cfg.seed).derive(&[cfg.experiment.key(), n as u64, c.to_bits(), rep as u64])
}

/// A metric value or the reason it is missing.
type Value = std::result::Result<f64, String>;

struct Row {
    scheme: Option<Regime>,
    t: Option<usize>,
    metric: String,
    value: Value,
}

fn row(scheme: Option<Regime>, t: Option<usize>, metric: impl Into<String>, value: Value) -> Row {
    Row { scheme, t, metric: metric.into(), value }
}

/// Runs `body` for every (cell, replicate) in parallel and returns
/// per-replicate records followed by mean and sd rows for every
/// (cell, scheme, T, metric), all in deterministic key order.
fn replicate<F>(cfg: &ExperimentConfig, body: F) -> Vec<Record>
where
    F: Fn(&Cell, &mut Rng) -> Vec<Row> + Sync,
{
    let cells = cells(cfg);
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|k| (0..cfg.reps).map(move |r| (k, r))).collect();
    let results: Vec<Vec<Row>> = jobs
        .par_iter()
        .map(|&(k, r)| {
            let cell = &cells[k];
            let seed = replicate_seed(cfg, cell.n, cell.c, r);
            body(cell, &mut crate::rng::seeded(seed))
        })
        .collect();
    let record = |cell: &Cell, rep: Rep, seed: Option<u64>, row: &Row, value: Value| {
        let (value, reason) = match value {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e)),
        };
        Record {
            experiment: cfg.experiment,
            graph: cfg.graph,
            n: cell.n,
            c: cell.c,
            scheme: row.scheme,
            t: row.t,
            rep,
            seed,
            metric: row.metric.clone(),
            value,
            reason,
        }
    };
    let mut out = Vec::new();
    for (k, cell) in cells.iter().enumerate() {
        let reps = &results[k * cfg.reps..(k + 1) * cfg.reps];
        for (r, rows) in reps.iter().enumerate() {
            let seed = replicate_seed(cfg, cell.n, cell.c, r);
            for row in rows {
                out.push(record(cell, Rep::Index(r), Some(seed), row, row.value.clone()));
            }
        }
        // aggregate over replicates, in the row order of the first replicate
        let Some(first) = reps.first() else { continue };
        for (i, proto) in first.iter().enumerate() {
            let vals: Vec<f64> = reps.iter().filter_map(|rows| rows.get(i)).filter_map(|r| r.value.clone().ok()).collect();
            let (mean, sd) = mean_sd(&vals);
            out.push(record(cell, Rep::Mean, None, proto, mean));
            out.push(record(cell, Rep::Sd, None, proto, sd));
        }
    }
    out
}

fn mean_sd(vals: &[f64]) -> (Value, Value) {
    if vals.is_empty() {
        let e = "no_valid_replicates".to_string();
        return (Err(e.clone()), Err(e));
    }
    let k = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / k;
    let sd = if vals.len() < 2 {
        Err("single_valid_replicate".to_string())
    } else {
        Ok((vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt())
    };
    (Ok(mean), sd)
}

/// Samples an ER or SF DAG for a cell; a missing value explains why none exists.
fn sample_dag(kind: GraphKind, n: usize, c: f64, rng: &mut Rng) -> std::result::Result<RandomDag, String> {
    if n == 1 {
        return Ok(RandomDag { dag: Dag::empty(1), causal_order: vec![0], clamped: false });
    }
    match kind {
        GraphKind::Er => sample_er_dag(n, c, rng).map_err(|e| format!("sampler_error: {e}")),
        GraphKind::Sf => {
            if c.fract() != 0.0 {
                return Err("sf_needs_integer_c".into());
            }
            if c as usize >= n {
                return Err("sf_needs_c_below_n".into());
            }
            sample_sf_dag(n, c as usize, rng).map_err(|e| format!("sampler_error: {e}"))
        }
        GraphKind::Forward => unreachable!("rejected by validate"),
    }
}

fn sortability_value(s: Result<f64>) -> Value {
    match s {
        Ok(v) => Ok(v),
        Err(Error::NoEdges) => Err("empty_graph".into()),
        Err(e) => Err(format!("error: {e}")),
    }
}

/// Oracle rel-sortability of random DAGs over an (n, c) grid.
pub fn run_heatmap(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    Ok(replicate(cfg, |cell, rng| {
        let value = sample_dag(cfg.graph, cell.n, cell.c, rng).and_then(|g| sortability_value(rel_sortability(&g.dag)));
        vec![row(None, None, "rel_sortability", value)]
    }))
}

/// Oracle rel-, empirical rel-, var- and R²-sortability per data scheme.
pub fn run_schemes(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    const METRICS: [&str; 4] = ["rel_oracle", "rel_empirical", "var", "r2"];
    Ok(replicate(cfg, |cell, rng| {
        let g = match sample_dag(cfg.graph, cell.n, cell.c, rng) {
            Ok(g) if g.dag.edge_count() > 0 => g.dag,
            Ok(_) => return na_rows(cfg, &METRICS, "empty_graph"),
            Err(e) => return na_rows(cfg, &METRICS, &e),
        };
        let oracle = rel_sortability(&g).expect("graph has edges");
        let scm = LinearScm::sample(g.clone(), &scm_params(cfg), rng);
        let mut rows = Vec::new();
        for &scheme in &cfg.schemes {
            let s = Some(scheme);
            let values = sample_observations(&scm, cfg.samples, scheme, rng).and_then(|data| {
                let rel = NodeCriterion::from(estimate_relative_counts(&data, cfg.alpha)?);
                Ok([
                    sortability(&g, &rel)?,
                    sortability(&g, &var_criterion(&data)?)?,
                    sortability(&g, &r2_criterion(&data)?.criterion)?,
                ])
            });
            rows.push(row(s, None, METRICS[0], Ok(oracle)));
            match values {
                Ok(v) => rows.extend(METRICS[1..].iter().zip(v).map(|(m, v)| row(s, None, *m, Ok(v)))),
                Err(e) => rows.extend(METRICS[1..].iter().map(|m| row(s, None, *m, Err(format!("error: {e}"))))),
            }
        }
        rows
    }))
}

fn scm_params(cfg: &ExperimentConfig) -> ScmParams {
    ScmParams { signed_weights: cfg.signed_weights, ..ScmParams::default() }
}

fn na_rows(cfg: &ExperimentConfig, metrics: &[&str], reason: &str) -> Vec<Row> {
    cfg.schemes
        .iter()
        .flat_map(|&s| metrics.iter().map(move |m| row(Some(s), None, *m, Err(reason.to_string()))))
        .collect()
}

/// Discovery methods compared by `discovery`, in output order.
pub const DISCOVERY_METHODS: [&str; 5] = ["rel", "var", "r2", "random", "oracle"];

/// SID and SHD of SortnRegress under the estimated relative order, var and
/// R² orders, a random order and the true causal order.
pub fn run_discovery(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    let metrics: Vec<String> = ["sid", "shd"]
        .iter()
        .flat_map(|m| DISCOVERY_METHODS.iter().map(move |d| format!("{m}:{d}")))
        .chain(["rel_oracle".into(), "rel_empirical".into()])
        .collect();
    Ok(replicate(cfg, |cell, rng| {
        let names: Vec<&str> = metrics.iter().map(String::as_str).collect();
        let g = match sample_dag(cfg.graph, cell.n, cell.c, rng) {
            Ok(g) => g,
            Err(e) => return na_rows(cfg, &names, &e),
        };
        let scm = LinearScm::sample(g.dag.clone(), &scm_params(cfg), rng);
        let mut rows = Vec::new();
        for &scheme in &cfg.schemes {
            let s = Some(scheme);
            match discovery_replicate(cfg, &g, &scm, scheme, rng) {
                Ok(vals) => rows.extend(names.iter().zip(vals).map(|(m, v)| row(s, None, *m, v))),
                Err(e) => rows.extend(names.iter().map(|m| row(s, None, *m, Err(format!("error: {e}"))))),
            }
        }
        rows
    }))
}

fn discovery_replicate(
    cfg: &ExperimentConfig,
    g: &RandomDag,
    scm: &LinearScm,
    scheme: Regime,
    rng: &mut Rng,
) -> Result<Vec<Value>> {
    let n = g.dag.n();
    let data = sample_observations(scm, cfg.samples, scheme, rng)?;
    let counts = estimate_relative_counts(&data, cfg.alpha)?;
    let rel = NodeCriterion::from(counts);
    let mut random: Vec<usize> = (0..n).collect();
    random.shuffle(rng);
    let orders = [
        criterion_order(&rel),
        criterion_order(&var_criterion(&data)?),
        criterion_order(&r2_criterion(&data)?.criterion),
        Ordering::new(random)?,
        Ordering::new(g.causal_order.clone())?,
    ];
    let est: Vec<Dag> = orders
        .iter()
        .map(|o| sort_n_regress(&data, o).map(|e| e.into_dag()))
        .collect::<Result<_>>()?;
    let mut vals: Vec<Value> = Vec::new();
    for e in &est {
        vals.push(Ok(sid(&g.dag, e)? as f64));
    }
    for e in &est {
        vals.push(Ok(shd(&g.dag, e)? as f64));
    }
    vals.push(sortability_value(rel_sortability(&g.dag)));
    vals.push(sortability_value(sortability(&g.dag, &rel)));
    Ok(vals)
}

/// Rel-sortability of time-unrolled summary graphs against the horizon `T`.
/// The summary graph of a replicate is shared by all horizons.
pub fn run_timeseries(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    Ok(replicate(cfg, |cell, rng| {
        let summary = match cfg.graph {
            GraphKind::Forward => SummaryGraph::one_directional_complete(cell.n),
            _ => sample_symmetric_summary(cell.n, cell.c, rng),
        };
        let mut rows = Vec::new();
        for &t in &cfg.t {
            let s = summary
                .as_ref()
                .map_err(|e| format!("error: {e}"))
                .and_then(|s| unroll(s, t).map_err(|e| format!("error: {e}")))
                .and_then(|g| sortability_value(rel_sortability(&g)));
            rows.push(row(None, Some(t), "rel_sortability", s.clone()));
            rows.push(row(None, Some(t), "abs_dev_half", s.map(|v| (v - 0.5).abs())));
        }
        rows
    }))
}

#[derive(Debug, Clone, Default)]
struct Bucket {
    edges: u64,
    strict: u64,
    score_sum: f64,
    bound_sum: f64,
    first_term_sum: f64,
}

/// Per-edge statistics of large ER DAGs pooled by quantile-position bucket
/// of tail and head: the frequency of a strict increase in relatives, the
/// mean edge score and the mean of the limiting lower bound over the
/// bucket's edges. Replicates are drawn in batches until every bucket has
/// `min_bucket_edges` edges or `reps` replicates have been used.
pub fn run_bound(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    const BATCH: usize = 16;
    let b = cfg.buckets;
    let mut out = Vec::new();
    for cell in cells(cfg) {
        let mut acc = vec![Bucket::default(); b * b];
        let mut used = 0;
        let mut filled = false;
        while used < cfg.reps && !filled {
            let batch: Vec<usize> = (used..(used + BATCH).min(cfg.reps)).collect();
            let parts: Vec<Vec<Bucket>> = batch
                .par_iter()
                .map(|&r| bound_replicate(cfg, &cell, r))
                .collect::<Result<_>>()?;
            for part in parts {
                for (a, p) in acc.iter_mut().zip(part) {
                    a.edges += p.edges;
                    a.strict += p.strict;
                    a.score_sum += p.score_sum;
                    a.bound_sum += p.bound_sum;
                    a.first_term_sum += p.first_term_sum;
                }
            }
            used += batch.len();
            filled = (0..b).all(|i| (i..b).all(|j| acc[i * b + j].edges >= cfg.min_bucket_edges as u64));
        }
        let rec = |metric: String, value: Value| {
            let (value, reason) = match value {
                Ok(v) => (Some(v), None),
                Err(e) => (None, Some(e)),
            };
            Record {
                experiment: cfg.experiment,
                graph: cfg.graph,
                n: cell.n,
                c: cell.c,
                scheme: None,
                t: None,
                rep: Rep::All,
                seed: None,
                metric,
                value,
                reason,
            }
        };
        out.push(rec("replicates".into(), Ok(used as f64)));
        out.push(rec("buckets_filled".into(), Ok(f64::from(u8::from(filled)))));
        for i in 0..b {
            for j in i..b {
                let a = &acc[i * b + j];
                let tag = format!("qx={i}:qy={j}");
                out.push(rec(format!("edges:{tag}"), Ok(a.edges as f64)));
                if a.edges == 0 {
                    for m in ["pr_strict", "se", "mean_score", "bound", "first_term"] {
                        out.push(rec(format!("{m}:{tag}"), Err("no_edges_in_bucket".into())));
                    }
                    continue;
                }
                let k = a.edges as f64;
                let p = a.strict as f64 / k;
                out.push(rec(format!("pr_strict:{tag}"), Ok(p)));
                out.push(rec(format!("se:{tag}"), Ok((p * (1.0 - p) / k).sqrt())));
                out.push(rec(format!("mean_score:{tag}"), Ok(a.score_sum / k)));
                out.push(rec(format!("bound:{tag}"), Ok(a.bound_sum / k)));
                out.push(rec(format!("first_term:{tag}"), Ok(a.first_term_sum / k)));
            }
        }
    }
    Ok(out)
}

fn bound_replicate(cfg: &ExperimentConfig, cell: &Cell, rep: usize) -> Result<Vec<Bucket>> {
    let b = cfg.buckets;
    let n = cell.n;
    let mut rng = crate::rng::seeded(replicate_seed(cfg, n, cell.c, rep));
    let g = sample_er_dag(n, cell.c, &mut rng)?;
    let pos = g.positions();
    let rel = g.dag.relative_counts();
    let mut acc = vec![Bucket::default(); b * b];
    for (x, y) in g.dag.edges() {
        // rank r = position + 1, quantile q = r / n
        let (rx, ry) = (pos[x] + 1, pos[y] + 1);
        let (qx, qy) = (rx as f64 / n as f64, ry as f64 / n as f64);
        let a = &mut acc[(pos[x] * b / n) * b + pos[y] * b / n];
        a.edges += 1;
        let score = crate::sortability::edge_score(rel[x] as f64, rel[y] as f64);
        a.strict += u64::from(score == 1.0);
        a.score_sum += score;
        a.bound_sum += lower_bound_edge(cell.c, qx, qy)?;
        a.first_term_sum += lower_bound_first_term(cell.c, qx, qy)?;
    }
    Ok(acc)
}
