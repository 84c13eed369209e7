use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rule::ForcingRule;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::vertex_set::VertexSet;

/// How one synchronous round draws its randomness. Both kernels sample the same law:
/// each white `v` turns blue independently with probability `1 − ∏ (1 − q(u))` over its
/// blue neighbours `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKernel {
    /// Pick the cheaper kernel for the current state (a deterministic function of it).
    #[default]
    Auto,
    /// Per blue source `u` (ascending), skip geometrically through `N(u)` with success
    /// probability `q(u)`; hits on white vertices are forced edges.
    Edge,
    /// Per white vertex `v` (ascending), one uniform against its stay-white probability.
    Vertex,
}

/// What to record beyond the blue-count trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recording {
    /// `e(Y_{≤i})` after every round.
    pub blue_edges: bool,
    /// `max_{v ∉ Y_{≤i}} |N(v) ∩ Y_i|` after every round.
    pub newest_layer_degree: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepReport {
    pub forced: usize,
    /// An active alternative rule had `d_lower > deg(u)` for some forcing source `u`.
    pub validity_violated: bool,
}

/// Blue set and per-round trajectories of one forcing process.
#[derive(Debug, Clone)]
pub struct ProcessState {
    blue: VertexSet,
    round: u32,
    newly_blue: Vec<u32>,
    blue_counts: Vec<usize>,
    blue_edges: Option<Vec<u64>>,
    layer_degrees: Option<Vec<usize>>,
    /// `|N(v) ∩ Z|` for every vertex.
    blue_neighbors: Vec<u32>,
    edges_inside: u64,
    scratch_q: Vec<f64>,
    scratch_mark: Vec<bool>,
}

impl ProcessState {
    pub fn new(g: &Graph, start: &VertexSet, recording: Recording) -> Result<Self> {
        if start.is_empty() {
            return Err(Error::EmptyStart);
        }
        g.check_set(start)?;
        let n = g.n();
        let mut state = Self {
            blue: VertexSet::empty(n),
            round: 0,
            newly_blue: Vec::new(),
            blue_counts: Vec::new(),
            blue_edges: recording.blue_edges.then(Vec::new),
            layer_degrees: recording.newest_layer_degree.then(Vec::new),
            blue_neighbors: vec![0; n],
            edges_inside: 0,
            scratch_q: Vec::new(),
            scratch_mark: Vec::new(),
        };
        let initial: Vec<u32> = start.iter().map(|v| v as u32).collect();
        state.absorb(g, initial);
        Ok(state)
    }

    pub fn blue(&self) -> &VertexSet {
        &self.blue
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn blue_count(&self) -> usize {
        *self.blue_counts.last().expect("trajectory starts at round 0")
    }

    pub fn is_complete(&self) -> bool {
        self.blue_count() == self.blue.universe()
    }

    /// `Y_i`: vertices turned blue by the latest round (the start set at round 0).
    pub fn newly_blue(&self) -> &[u32] {
        &self.newly_blue
    }

    /// `b_i = |Y_{≤i}|` for `i = 0..=round`.
    pub fn blue_count_trajectory(&self) -> &[usize] {
        &self.blue_counts
    }

    pub fn blue_edge_trajectory(&self) -> Option<&[u64]> {
        self.blue_edges.as_deref()
    }

    pub fn layer_degree_trajectory(&self) -> Option<&[usize]> {
        self.layer_degrees.as_deref()
    }

    /// `|N[u] ∩ Z|`, valid for blue `u`.
    #[inline]
    pub fn closed_blue_count(&self, u: usize) -> usize {
        self.blue_neighbors[u] as usize + 1
    }

    #[inline]
    fn white_neighbor_count(&self, g: &Graph, u: usize) -> usize {
        g.degree(u) - self.blue_neighbors[u] as usize
    }

    /// Turns `vertices` (sorted, all white) blue and closes the round's bookkeeping.
    fn absorb(&mut self, g: &Graph, mut vertices: Vec<u32>) {
        vertices.sort_unstable();
        for &v in &vertices {
            let v = v as usize;
            self.blue.insert(v);
            self.edges_inside += self.blue_neighbors[v] as u64;
            for &w in g.neighbors(v) {
                self.blue_neighbors[w as usize] += 1;
            }
        }
        self.blue_counts.push(self.blue.len());
        if let Some(t) = self.blue_edges.as_mut() {
            t.push(self.edges_inside);
        }
        if self.layer_degrees.is_some() {
            let d = self.max_layer_degree(g, &vertices);
            self.layer_degrees.as_mut().unwrap().push(d);
        }
        self.newly_blue = vertices;
    }

    fn max_layer_degree(&mut self, g: &Graph, layer: &[u32]) -> usize {
        let mut tally = vec![0u32; g.n()];
        let mut best = 0;
        for &u in layer {
            for &w in g.neighbors(u as usize) {
                let w = w as usize;
                if !self.blue.contains(w) {
                    tally[w] += 1;
                    best = best.max(tally[w] as usize);
                }
            }
        }
        best
    }

    /// One synchronous round. Newly blue vertices only act from the next round.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        g: &Graph,
        rule: &ForcingRule,
        kernel: RoundKernel,
        rng: &mut R,
    ) -> StepReport {
        let n = g.n();
        let round = self.round;
        let divisor = rule.active_divisor(round);
        let mut frontier: Vec<(u32, f64)> = Vec::new();
        let mut validity_violated = false;
        for u in self.blue.iter() {
            if self.white_neighbor_count(g, u) == 0 {
                continue;
            }
            let deg = g.degree(u);
            if divisor.is_some_and(|d| d > deg as f64) {
                validity_violated = true;
            }
            frontier.push((u as u32, rule.probability(self.closed_blue_count(u), deg, round)));
        }

        let kernel = match kernel {
            RoundKernel::Auto => self.choose_kernel(g, &frontier),
            k => k,
        };
        let forced = match kernel {
            RoundKernel::Edge | RoundKernel::Auto => self.edge_kernel(g, &frontier, rng),
            RoundKernel::Vertex => self.vertex_kernel(g, &frontier, rng),
        };
        let count = forced.len();
        debug_assert!(forced.iter().all(|&v| (v as usize) < n && !self.blue.contains(v as usize)));
        self.round += 1;
        self.absorb(g, forced);
        StepReport { forced: count, validity_violated }
    }

    fn choose_kernel(&self, g: &Graph, frontier: &[(u32, f64)]) -> RoundKernel {
        // Expected work: a geometric draw costs a logarithm per hit.
        let edge_cost: f64 = frontier
            .iter()
            .map(|&(u, q)| 2.0 + 4.0 * q * g.degree(u as usize) as f64)
            .sum();
        let mut vertex_cost = 0.0;
        for v in 0..g.n() {
            if !self.blue.contains(v) && self.blue_neighbors[v] > 0 {
                vertex_cost += 2.0 + g.degree(v) as f64;
            }
        }
        if vertex_cost < edge_cost {
            RoundKernel::Vertex
        } else {
            RoundKernel::Edge
        }
    }

    fn edge_kernel<R: Rng + ?Sized>(
        &mut self,
        g: &Graph,
        frontier: &[(u32, f64)],
        rng: &mut R,
    ) -> Vec<u32> {
        let mut mark = std::mem::take(&mut self.scratch_mark);
        mark.clear();
        mark.resize(g.n(), false);
        let mut forced = Vec::new();
        for &(u, q) in frontier {
            let nbrs = g.neighbors(u as usize);
            let mut hit = |v: u32, forced: &mut Vec<u32>| {
                let vi = v as usize;
                if !self.blue.contains(vi) && !mark[vi] {
                    mark[vi] = true;
                    forced.push(v);
                }
            };
            if q >= 1.0 {
                for &v in nbrs {
                    hit(v, &mut forced);
                }
                continue;
            }
            let log_stay = (-q).ln_1p();
            let deg = nbrs.len() as f64;
            let mut pos = 0usize;
            loop {
                let skip = ((1.0 - rng.random::<f64>()).ln() / log_stay).floor();
                let next = pos as f64 + skip;
                if next >= deg {
                    break;
                }
                let idx = next as usize;
                hit(nbrs[idx], &mut forced);
                pos = idx + 1;
            }
        }
        self.scratch_mark = mark;
        forced
    }

    fn vertex_kernel<R: Rng + ?Sized>(
        &mut self,
        g: &Graph,
        frontier: &[(u32, f64)],
        rng: &mut R,
    ) -> Vec<u32> {
        let mut q = std::mem::take(&mut self.scratch_q);
        q.clear();
        q.resize(g.n(), 0.0);
        for &(u, qu) in frontier {
            q[u as usize] = qu;
        }
        let mut forced = Vec::new();
        for v in 0..g.n() {
            if self.blue.contains(v) || self.blue_neighbors[v] == 0 {
                continue;
            }
            let stay: f64 = g.neighbors(v).iter().map(|&w| 1.0 - q[w as usize]).product();
            if rng.random::<f64>() < 1.0 - stay {
                forced.push(v as u32);
            }
        }
        self.scratch_q = q;
        forced
    }
}
