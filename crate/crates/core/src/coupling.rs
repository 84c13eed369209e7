//! Pathwise couplings of two forcing processes on one graph.
//!
//! Process 1 is driven by a main stream of uniforms, one per (round, source, neighbour)
//! edge in ascending order. Process 2 reuses each shared draw and reads any top-up or
//! fresh draws from a disjoint stream, so its marginal law is exactly that of an
//! uncoupled run while its blue set stays a superset of process 1's.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcing::ForcingRule;
use crate::graph::Graph;
use crate::rng::{derive_seed, stream};
use crate::vertex_set::VertexSet;

const MAIN_STREAM: u64 = 0;
const TOP_UP_STREAM: u64 = 1;

/// Paired blue-count trajectories of one coupled run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledRun {
    pub seed: u64,
    pub rounds: u32,
    pub trajectory1: Vec<usize>,
    pub trajectory2: Vec<usize>,
    /// `blue₁(t) ⊆ blue₂(t)` held at every recorded round.
    pub contained: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_violation: Option<u32>,
    /// Some source had a smaller per-edge probability in process 2 than in process 1.
    #[serde(default)]
    pub validity_violated: bool,
}

struct Side<'a> {
    rule: &'a ForcingRule,
    blue: VertexSet,
}

impl Side<'_> {
    fn probability(&self, g: &Graph, u: usize, round: u32) -> Option<f64> {
        if !self.blue.contains(u) {
            return None;
        }
        let closed = 1 + g.neighbors(u).iter().filter(|&&w| self.blue.contains(w as usize)).count();
        Some(self.rule.probability(closed, g.degree(u), round))
    }
}

fn coupled(
    g: &Graph,
    start1: &VertexSet,
    rule1: &ForcingRule,
    start2: &VertexSet,
    rule2: &ForcingRule,
    rounds: u32,
    seed: u64,
) -> Result<CoupledRun> {
    g.check_set(start1)?;
    g.check_set(start2)?;
    if start1.is_empty() {
        return Err(Error::EmptyStart);
    }
    rule1.validate()?;
    rule2.validate()?;
    let mut main = stream(derive_seed(seed, MAIN_STREAM));
    let mut top_up = stream(derive_seed(seed, TOP_UP_STREAM));
    let mut one = Side { rule: rule1, blue: start1.clone() };
    let mut two = Side { rule: rule2, blue: start2.clone() };
    let mut run = CoupledRun {
        seed,
        rounds: 0,
        trajectory1: vec![one.blue.len()],
        trajectory2: vec![two.blue.len()],
        contained: one.blue.is_subset(&two.blue),
        first_violation: None,
        validity_violated: false,
    };
    if !run.contained {
        run.first_violation = Some(0);
    }
    let n = g.n();
    let mut new1 = Vec::new();
    let mut new2 = Vec::new();
    for round in 0..rounds {
        if one.blue.len() == n && two.blue.len() == n {
            break;
        }
        new1.clear();
        new2.clear();
        for u in 0..n {
            let q1 = one.probability(g, u, round);
            let q2 = two.probability(g, u, round);
            if q1.is_none() && q2.is_none() {
                continue;
            }
            for &v in g.neighbors(u) {
                let v = v as usize;
                let white1 = !one.blue.contains(v);
                let white2 = !two.blue.contains(v);
                if !white1 && !white2 {
                    continue;
                }
                let (f1, f2) = match (q1, q2) {
                    (Some(a), Some(b)) => {
                        let f1 = main.random::<f64>() < a;
                        let f2 = if b >= a {
                            f1 || (a < 1.0 && top_up.random::<f64>() < (b - a) / (1.0 - a))
                        } else {
                            run.validity_violated = true;
                            f1 && top_up.random::<f64>() < b / a
                        };
                        (f1, f2)
                    }
                    (Some(a), None) => (main.random::<f64>() < a, false),
                    (None, Some(b)) => (false, top_up.random::<f64>() < b),
                    (None, None) => unreachable!(),
                };
                if f1 && white1 {
                    new1.push(v);
                }
                if f2 && white2 {
                    new2.push(v);
                }
            }
        }
        for &v in &new1 {
            one.blue.insert(v);
        }
        for &v in &new2 {
            two.blue.insert(v);
        }
        run.rounds = round + 1;
        run.trajectory1.push(one.blue.len());
        run.trajectory2.push(two.blue.len());
        if run.contained && !one.blue.is_subset(&two.blue) {
            run.contained = false;
            run.first_violation = Some(run.rounds);
        }
    }
    Ok(run)
}

/// Couples standard processes from `s1 ⊆ s2`. Where process 2's per-edge probability
/// `q` exceeds process 1's `p`, a top-up `Bernoulli((q − p)/(1 − p))` is added to the
/// shared draw; sources blue only in process 2 draw fresh with probability `q`.
pub fn coupled_run_subset(
    g: &Graph,
    s1: &VertexSet,
    s2: &VertexSet,
    rounds: u32,
    seed: u64,
) -> Result<CoupledRun> {
    if !s1.is_subset(s2) {
        return Err(Error::NotSubset);
    }
    coupled(g, s1, &ForcingRule::Standard, s2, &ForcingRule::Standard, rounds, seed)
}

/// Couples the standard process (process 1) with an alternative one (process 2) from
/// the same start. Containment is guaranteed while `d_lower ≤ δ(G)`; otherwise the
/// validity flag is raised and process 2 thins the shared draw.
pub fn coupled_run_alternative(
    g: &Graph,
    start: &VertexSet,
    rule: &ForcingRule,
    rounds: u32,
    seed: u64,
) -> Result<CoupledRun> {
    coupled(g, start, &ForcingRule::Standard, start, rule, rounds, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventEstimate {
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of `P(A(S, T, ℓ))`: starting from `start`, every vertex of
/// `target` is blue after `rounds` rounds.
pub fn estimate_force_event_probability(
    g: &Graph,
    start: &VertexSet,
    target: &VertexSet,
    rounds: u32,
    trials: u64,
    seed: u64,
) -> Result<EventEstimate> {
    use crate::forcing::{ProcessState, Recording, RoundKernel};
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    g.check_set(target)?;
    let rule = ForcingRule::Standard;
    let mut hits = 0;
    for t in 0..trials {
        let mut state = ProcessState::new(g, start, Recording::default())?;
        let mut rng = stream(derive_seed(seed, t));
        while state.round() < rounds && !target.is_subset(state.blue()) {
            state.step(g, &rule, RoundKernel::Auto, &mut rng);
        }
        if target.is_subset(state.blue()) {
            hits += 1;
        }
    }
    let estimate = hits as f64 / trials as f64;
    let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(EventEstimate { trials, hits, estimate, std_error })
}

/// One JSON object per coupled run.
pub fn write_pairs_jsonl<W: Write>(runs: &[CoupledRun], mut out: W) -> Result<()> {
    for run in runs {
        serde_json::to_writer(&mut out, run)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct VerdictRow {
    seed: u64,
    rounds: u32,
    contained: bool,
    validity_violated: bool,
    final_blue1: usize,
    final_blue2: usize,
}

/// `seed,rounds,contained,validity_violated,final_blue1,final_blue2`
pub fn write_verdict_csv<W: Write>(runs: &[CoupledRun], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for run in runs {
        w.serialize(VerdictRow {
            seed: run.seed,
            rounds: run.rounds,
            contained: run.contained,
            validity_violated: run.validity_violated,
            final_blue1: *run.trajectory1.last().unwrap(),
            final_blue2: *run.trajectory2.last().unwrap(),
        })
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("csv: {other:?}")),
    }
}
