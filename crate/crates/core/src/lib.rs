//! Relatives and rel-sortability in random DAGs: graph primitives, random
//! graph and SCM samplers, sortability criteria, order-based causal
//! discovery, Markov equivalence classes, evaluation metrics and a seeded
//! experiment runner.

pub mod discovery;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod mec;
pub mod metrics;
pub mod nodeset;
pub mod rng;
pub mod samplers;
pub mod scm;
pub mod sortability;
pub mod stats;

pub use discovery::{rel_sort_n_regress, sort_n_regress, EstimatedGraph, Ordering};
pub use error::{Error, Result};
pub use graph::Dag;
pub use nodeset::NodeSet;
pub use rng::{seeded, Rng, SeedStream};
pub use samplers::{sample_er_dag, sample_sf_dag, unroll, RandomDag, SummaryGraph};
pub use scm::{DataMatrix, LinearScm, Regime};
pub use sortability::{rel_sortability, sortability, NodeCriterion};
