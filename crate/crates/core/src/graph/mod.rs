//! Immutable simple undirected graphs and their construction.

mod expansion;
mod io;
mod sample;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vertex_set::VertexSet;

pub use expansion::{check_expansion, ExpansionParams, ExpansionReport, SetSample};
pub use io::{read_edge_list, write_edge_list};
pub use sample::{sample_gnp, SamplerMode, SPARSE_THRESHOLD};

/// Simple undirected graph on vertices `0..n` in compressed sparse row form.
///
/// Neighbour lists are sorted ascending, symmetric, and free of loops and duplicates.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Graph {
    /// Builds a graph from an edge stream that visits each edge `u < v` exactly once in
    /// ascending lexicographic order. `emit` is called twice (count pass, fill pass) and
    /// must produce the same sequence both times.
    pub(crate) fn from_sorted_stream<F>(n: usize, mut emit: F) -> Self
    where
        F: FnMut(&mut dyn FnMut(u32, u32)),
    {
        let mut degree = vec![0usize; n];
        emit(&mut |u, v| {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        });
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut acc = 0;
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        drop(degree);
        let mut cursor: Vec<usize> = offsets[..n].to_vec();
        let mut targets = vec![0u32; acc];
        // Lexicographic order makes every list come out sorted: the entries of
        // list u below u arrive (as v-endpoints) before those above u.
        emit(&mut |u, v| {
            targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        });
        let g = Self { offsets, targets };
        debug_assert!(g.check_invariants().is_ok());
        g
    }

    /// Builds a graph from an arbitrary edge list. Loops, duplicates and out-of-range
    /// endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one vertex".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!("{n} vertices exceed the u32 id space")));
        }
        let mut sorted = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {a}")));
            }
            sorted.push((a.min(b) as u32, a.max(b) as u32));
        }
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!(
                "duplicate edge {} {}",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted_stream(n, |sink| {
            for &(u, v) in &sorted {
                sink(u, v);
            }
        }))
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().max().unwrap_or(0)
    }

    pub fn average_degree(&self) -> f64 {
        self.targets.len() as f64 / self.n() as f64
    }

    /// Edges `(u, v)` with `u < v` in ascending lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Checks symmetry, sortedness and absence of loops and duplicates.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n();
        for u in 0..n {
            let nb = self.neighbors(u);
            for w in nb.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidParameter(format!(
                        "adjacency of {u} not strictly ascending"
                    )));
                }
            }
            for &v in nb {
                let v = v as usize;
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if v == u {
                    return Err(Error::InvalidParameter(format!("self-loop at vertex {u}")));
                }
                if !self.has_edge(v, u) {
                    return Err(Error::InvalidParameter(format!("edge {u} {v} not symmetric")));
                }
            }
        }
        Ok(())
    }

    /// `N(S)`: vertices outside `S` adjacent to some vertex of `S`.
    pub fn neighborhood(&self, s: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(self.n());
        for u in s.iter() {
            for &v in self.neighbors(u) {
                if !s.contains(v as usize) {
                    out.insert(v as usize);
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                let v = v as usize;
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == n
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    pub(crate) fn check_set(&self, s: &VertexSet) -> Result<()> {
        match s.max() {
            Some(m) if m >= self.n() => Err(Error::VertexOutOfRange { vertex: m, n: self.n() }),
            _ => Ok(()),
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.edge_count())
            .finish()
    }
}

/// A graph family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphSpec {
    Gnp { n: usize, p: f64 },
    Path { n: usize },
    Cycle { n: usize },
    /// `n` leaves plus the centre, vertex 0.
    Star { n: usize },
    Complete { n: usize },
}

impl GraphSpec {
    pub fn family(&self) -> &'static str {
        match self {
            GraphSpec::Gnp { .. } => "gnp",
            GraphSpec::Path { .. } => "path",
            GraphSpec::Cycle { .. } => "cycle",
            GraphSpec::Star { .. } => "star",
            GraphSpec::Complete { .. } => "complete",
        }
    }

    /// Number of vertices of the constructed graph.
    pub fn vertex_count(&self) -> usize {
        match *self {
            GraphSpec::Star { n } => n + 1,
            GraphSpec::Gnp { n, .. }
            | GraphSpec::Path { n }
            | GraphSpec::Cycle { n }
            | GraphSpec::Complete { n } => n,
        }
    }

    pub fn edge_probability(&self) -> Option<f64> {
        match *self {
            GraphSpec::Gnp { p, .. } => Some(p),
            _ => None,
        }
    }

    /// Builds the graph; `seed` is only consumed by `gnp`.
    pub fn build(&self, seed: u64) -> Result<Graph> {
        match *self {
            GraphSpec::Gnp { n, p } => sample_gnp(n, p, seed),
            _ => named_graph(self),
        }
    }
}

/// Deterministic families with canonical labelling: path and cycle consecutive,
/// star centred at 0.
pub fn named_graph(spec: &GraphSpec) -> Result<Graph> {
    let need = |family: &'static str, min: usize, n: usize| {
        if n < min {
            Err(Error::GraphTooSmall { family, min, n })
        } else {
            Ok(())
        }
    };
    match *spec {
        GraphSpec::Path { n } => {
            need("path", 1, n)?;
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            Graph::from_edges(n, &edges)
        }
        GraphSpec::Cycle { n } => {
            need("cycle", 3, n)?;
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            Graph::from_edges(n, &edges)
        }
        GraphSpec::Star { n } => {
            need("star", 1, n)?;
            let edges: Vec<_> = (1..=n).map(|i| (0, i)).collect();
            Graph::from_edges(n + 1, &edges)
        }
        GraphSpec::Complete { n } => {
            need("complete", 1, n)?;
            Ok(Graph::from_sorted_stream(n, |sink| {
                for u in 0..n as u32 {
                    for v in u + 1..n as u32 {
                        sink(u, v);
                    }
                }
            }))
        }
        GraphSpec::Gnp { .. } => Err(Error::InvalidParameter(
            "gnp is a random family; use sample_gnp".into(),
        )),
    }
}

pub fn path(n: usize) -> Result<Graph> {
    named_graph(&GraphSpec::Path { n })
}

pub fn cycle(n: usize) -> Result<Graph> {
    named_graph(&GraphSpec::Cycle { n })
}

pub fn star(n: usize) -> Result<Graph> {
    named_graph(&GraphSpec::Star { n })
}

pub fn complete(n: usize) -> Result<Graph> {
    named_graph(&GraphSpec::Complete { n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_vec(g: &Graph) -> Vec<(usize, usize)> {
        g.edges().collect()
    }

    #[test]
    fn named_families() {
        assert_eq!(edge_vec(&path(3).unwrap()), vec![(0, 1), (1, 2)]);
        assert_eq!(edge_vec(&cycle(4).unwrap()), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        let s = star(3).unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(edge_vec(&s), vec![(0, 1), (0, 2), (0, 3)]);
        assert_eq!(s.degree(0), 3);
        let k = complete(5).unwrap();
        assert_eq!(k.edge_count(), 10);
        assert!(k.check_invariants().is_ok());
    }

    #[test]
    fn cycle_needs_three_vertices() {
        assert!(matches!(cycle(2), Err(Error::GraphTooSmall { .. })));
        assert!(path(0).is_err());
    }

    #[test]
    fn neighborhood_examples() {
        let p3 = path(3).unwrap();
        let n1 = p3.neighborhood(&VertexSet::from_vertices(3, [1]));
        assert_eq!(n1.to_vec(), vec![0, 2]);
        assert!(p3.neighborhood(&VertexSet::full(3)).is_empty());
        let c5 = cycle(5).unwrap();
        assert_eq!(c5.neighborhood(&VertexSet::from_vertices(5, [0, 1])).to_vec(), vec![2, 4]);
        assert!(p3.neighborhood(&VertexSet::empty(3)).is_empty());
    }

    #[test]
    fn connectivity() {
        assert!(path(5).unwrap().is_connected());
        assert!(!Graph::from_edges(2, &[]).unwrap().is_connected());
        assert!(complete(4).unwrap().is_connected());
        assert!(Graph::from_edges(1, &[]).unwrap().is_connected());
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn from_edges_sorts_lists() {
        let g = Graph::from_edges(4, &[(3, 0), (2, 0), (1, 3)]).unwrap();
        assert_eq!(g.neighbors(0), &[2, 3]);
        assert_eq!(g.neighbors(3), &[0, 1]);
        assert!(g.check_invariants().is_ok());
    }
}
