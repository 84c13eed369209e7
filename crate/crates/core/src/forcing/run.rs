use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rule::ForcingRule;
use super::state::{ProcessState, Recording, RoundKernel};
use super::classical_step;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{stream, StreamRng};
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Forced,
    RoundCapReached,
}

/// One realisation of the process from a start set. Serialises as one JSONL line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub trial: u64,
    pub n: usize,
    pub p: Option<f64>,
    pub family: String,
    pub start: VertexSet,
    pub rule: ForcingRule,
    pub status: TrialStatus,
    /// Propagation time: first round at which every vertex is blue.
    pub pt: Option<u32>,
    pub b_trajectory: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_blue_trajectory: Option<Vec<u64>>,
    /// First round whose blue count reached each named threshold.
    pub crossings: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layer_degree_trajectory: Option<Vec<usize>>,
    /// Set when an active alternative rule had `d_lower > deg(u)` for a forcing source.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub coupling_violation: bool,
}

impl TrialRecord {
    pub fn is_forced(&self) -> bool {
        self.status == TrialStatus::Forced
    }

    /// Newly blue counts `y_i = b_i − b_{i−1}` for `i ≥ 1`.
    pub fn newly_blue_counts(&self) -> Vec<usize> {
        self.b_trajectory.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub max_rounds: u32,
    #[serde(default)]
    pub kernel: RoundKernel,
    #[serde(default)]
    pub recording: Recording,
    /// Named blue-count thresholds whose first crossing round is recorded.
    #[serde(default)]
    pub thresholds: Vec<(String, f64)>,
}

impl RunOptions {
    pub fn with_max_rounds(max_rounds: u32) -> Self {
        Self {
            max_rounds,
            kernel: RoundKernel::Auto,
            recording: Recording::default(),
            thresholds: Vec::new(),
        }
    }
}

/// Round cap far above any predicted propagation time:
/// `64·(log₂log₂n + log₂(1/p) + 1)` for `G(n, p)`, `64·(n + 1)` otherwise.
pub fn default_max_rounds(n: usize, p: Option<f64>) -> u32 {
    let rounds = match p {
        Some(p) if p > 0.0 => {
            let loglog = (n.max(4) as f64).log2().log2();
            64.0 * (loglog + (1.0 / p).log2() + 1.0)
        }
        _ => 64.0 * (n as f64 + 1.0),
    };
    rounds.ceil().min(u32::MAX as f64) as u32
}

/// Runs the process from `start` until every vertex is blue or `max_rounds` rounds pass.
pub fn run_process(
    g: &Graph,
    start: &VertexSet,
    rule: &ForcingRule,
    seed: u64,
    options: &RunOptions,
) -> Result<TrialRecord> {
    let mut rng = stream(seed);
    run_process_with(g, start, rule, seed, options, &mut rng, |_| {})
}

fn run_process_with(
    g: &Graph,
    start: &VertexSet,
    rule: &ForcingRule,
    seed: u64,
    options: &RunOptions,
    rng: &mut StreamRng,
    mut after_round: impl FnMut(&ProcessState),
) -> Result<TrialRecord> {
    if options.max_rounds == 0 {
        return Err(Error::InvalidParameter("max_rounds must be at least 1".into()));
    }
    rule.validate()?;
    let mut state = ProcessState::new(g, start, options.recording)?;
    let mut crossings = BTreeMap::new();
    let mut note_crossings = |state: &ProcessState| {
        let b = state.blue_count() as f64;
        for (name, value) in &options.thresholds {
            if b >= *value && !crossings.contains_key(name) {
                crossings.insert(name.clone(), state.round());
            }
        }
    };
    note_crossings(&state);
    after_round(&state);
    let mut violation = false;
    while !state.is_complete() && state.round() < options.max_rounds {
        violation |= state.step(g, rule, options.kernel, rng).validity_violated;
        note_crossings(&state);
        after_round(&state);
    }
    let forced = state.is_complete();
    Ok(TrialRecord {
        seed,
        trial: 0,
        n: g.n(),
        p: None,
        family: "custom".into(),
        start: start.clone(),
        rule: rule.clone(),
        status: if forced { TrialStatus::Forced } else { TrialStatus::RoundCapReached },
        pt: forced.then(|| state.round()),
        b_trajectory: state.blue_count_trajectory().to_vec(),
        e_blue_trajectory: state.blue_edge_trajectory().map(<[u64]>::to_vec),
        crossings,
        layer_degree_trajectory: state.layer_degree_trajectory().map(<[usize]>::to_vec),
        coupling_violation: violation,
    })
}

/// A probabilistic run together with the classical sequence from the same start.
#[derive(Debug, Clone)]
pub struct ShadowRun {
    pub record: TrialRecord,
    /// `|Z_t|` of the classical process for every round of the probabilistic run.
    pub classical_trajectory: Vec<usize>,
    /// `Z_t ⊆ blue_t` held at every round.
    pub contained: bool,
}

pub fn run_with_shadow(
    g: &Graph,
    start: &VertexSet,
    seed: u64,
    max_rounds: u32,
) -> Result<ShadowRun> {
    let mut classical = start.clone();
    let mut classical_trajectory = Vec::new();
    let mut contained = true;
    let mut rng = stream(seed);
    let options = RunOptions::with_max_rounds(max_rounds);
    let record = run_process_with(g, start, &ForcingRule::Standard, seed, &options, &mut rng, |s| {
        if s.round() > 0 {
            classical = classical_step(g, &classical);
        }
        classical_trajectory.push(classical.len());
        contained &= classical.is_subset(s.blue());
    })?;
    Ok(ShadowRun { record, classical_trajectory, contained })
}
