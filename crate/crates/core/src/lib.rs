//! Probabilistic zero forcing on graphs.
//!
//! A blue vertex `u` forces each white neighbour independently with probability
//! `|N[u] ∩ Z| / deg(u)` per synchronous round, where `Z` is the current blue set.
//! This crate provides
//!
//! * [`graph`]: immutable CSR graphs, `G(n, p)` sampling, named families and
//!   expansion audits;
//! * [`forcing`]: the round engine (standard and alternative rules), classical
//!   zero forcing and trial records;
//! * [`exact`]: exact rational transition laws, expected propagation times and
//!   exhaustive edge-conditioning oracles;
//! * [`coupling`]: pathwise monotone couplings between processes;
//! * [`bounds`]: closed-form round predictors, Chernoff tails, phase thresholds,
//!   the η recursion and good-round audits;
//! * [`montecarlo`]: seeded trial orchestration, summaries, sweeps and fits;
//! * [`acceptance`]: the end-to-end verification checks used by the CLI and tests.

pub mod acceptance;
pub mod bounds;
pub mod coupling;
pub mod error;
pub mod exact;
pub mod forcing;
pub mod graph;
pub mod montecarlo;
pub mod rng;
pub mod vertex_set;

pub use error::{Error, Result};
pub use forcing::{ActiveRounds, ForcingRule, ProcessState, TrialRecord, TrialStatus};
pub use graph::{Graph, GraphSpec};
pub use vertex_set::VertexSet;
