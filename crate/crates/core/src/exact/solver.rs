use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::ser::{Serialize, SerializeMap, Serializer};

use super::transition::transition_masks;
use super::{mask_vertices, rational_string, to_mask, MaskGraph, Rational};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::vertex_set::VertexSet;

pub const DEFAULT_SIZE_CAP: usize = 12;

/// Expected remaining rounds for every blue set visited by a solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpectationTable {
    pub entries: BTreeMap<u64, Rational>,
}

impl Serialize for ExpectationTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (mask, value) in &self.entries {
            let key = mask_vertices(*mask)
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",");
            map.serialize_entry(&key, &rational_string(value))?;
        }
        map.end()
    }
}

/// Memoised first-step solver for `E[pt(G, Z)]` over the absorbing chain of blue sets.
///
/// `E[V] = 0` and, for `Z ≠ V`,
/// `E[Z] = (1 + Σ_{Z' ≠ Z} P(Z → Z') E[Z']) / (1 − P(Z → Z))`.
/// Only sets reachable from the queried starts are visited.
#[derive(Debug, Clone)]
pub struct ExactSolver {
    graph: MaskGraph,
    memo: HashMap<u64, Rational>,
}

impl ExactSolver {
    pub fn new(g: &Graph) -> Result<Self> {
        Self::with_size_cap(g, DEFAULT_SIZE_CAP)
    }

    pub fn with_size_cap(g: &Graph, cap: usize) -> Result<Self> {
        if g.n() > cap.min(63) {
            return Err(Error::TooLarge { n: g.n(), cap: cap.min(63) });
        }
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(Self { graph: MaskGraph::new(g)?, memo: HashMap::new() })
    }

    pub fn expected(&mut self, start: &VertexSet) -> Result<Rational> {
        if start.is_empty() {
            return Err(Error::EmptyStart);
        }
        if start.max().is_some_and(|m| m >= self.graph.n) {
            return Err(Error::VertexOutOfRange { vertex: start.max().unwrap(), n: self.graph.n });
        }
        Ok(self.expected_mask(to_mask(start)))
    }

    pub fn expected_mask(&mut self, blue: u64) -> Rational {
        if blue == self.graph.full() {
            return Rational::zero();
        }
        if let Some(v) = self.memo.get(&blue) {
            return v.clone();
        }
        let law = transition_masks(&self.graph, blue);
        let stay = law.get(&blue).cloned().unwrap_or_else(Rational::zero);
        assert!(stay < Rational::one(), "blue set {blue:#b} cannot make progress");
        let mut numerator = Rational::one();
        for (succ, prob) in &law {
            if *succ != blue {
                numerator += prob * self.expected_mask(*succ);
            }
        }
        let value = numerator / (Rational::one() - stay);
        self.memo.insert(blue, value.clone());
        value
    }

    pub fn table(&self) -> ExpectationTable {
        let mut entries: BTreeMap<u64, Rational> =
            self.memo.iter().map(|(k, v)| (*k, v.clone())).collect();
        entries.insert(self.graph.full(), Rational::zero());
        ExpectationTable { entries }
    }
}

/// Exact `E[pt(G, start)]`.
pub fn expected_propagation_time(g: &Graph, start: &VertexSet) -> Result<Rational> {
    ExactSolver::new(g)?.expected(start)
}

/// `min_v E[pt(G, v)]` with the minimising vertex; ties go to the lowest id.
pub fn min_expected_propagation_time(g: &Graph) -> Result<(usize, Rational)> {
    let mut solver = ExactSolver::new(g)?;
    let mut best: Option<(usize, Rational)> = None;
    for v in 0..g.n() {
        let value = solver.expected_mask(1 << v);
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((v, value));
        }
    }
    Ok(best.expect("graph has at least one vertex"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::graph::{complete, cycle, path, sample_gnp};

    fn set(n: usize, v: &[usize]) -> VertexSet {
        VertexSet::from_vertices(n, v.iter().copied())
    }

    #[test]
    fn small_expectations() {
        assert_eq!(expected_propagation_time(&complete(2).unwrap(), &set(2, &[0])).unwrap(), ratio(1, 1));
        assert_eq!(expected_propagation_time(&path(3).unwrap(), &set(3, &[1])).unwrap(), ratio(2, 1));
        assert_eq!(expected_propagation_time(&path(3).unwrap(), &set(3, &[0])).unwrap(), ratio(2, 1));
        for v in 0..4 {
            assert_eq!(expected_propagation_time(&cycle(4).unwrap(), &set(4, &[v])).unwrap(), ratio(7, 3));
        }
    }

    #[test]
    fn minimisers() {
        assert_eq!(min_expected_propagation_time(&path(3).unwrap()).unwrap(), (0, ratio(2, 1)));
        assert_eq!(min_expected_propagation_time(&path(4).unwrap()).unwrap().1, ratio(8, 3));
        assert_eq!(min_expected_propagation_time(&cycle(5).unwrap()).unwrap().1, ratio(3, 1));
    }

    #[test]
    fn errors() {
        assert!(matches!(ExactSolver::new(&path(13).unwrap()), Err(Error::TooLarge { .. })));
        assert!(ExactSolver::with_size_cap(&path(13).unwrap(), 13).is_ok());
        let h = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(matches!(ExactSolver::new(&h), Err(Error::Disconnected)));
        let mut s = ExactSolver::new(&path(3).unwrap()).unwrap();
        assert!(matches!(s.expected(&VertexSet::empty(3)), Err(Error::EmptyStart)));
    }

    #[test]
    fn more_blue_never_slower() {
        let mut graphs = vec![path(5).unwrap(), cycle(6).unwrap(), complete(4).unwrap()];
        graphs.extend((0..20).map(|s| sample_gnp(6, 0.5, s).unwrap()).filter(Graph::is_connected));
        for g in graphs {
            let mut solver = ExactSolver::new(&g).unwrap();
            let full = (1u64 << g.n()) - 1;
            let values: Vec<Rational> = (1..=full).map(|m| solver.expected_mask(m)).collect();
            for small in 1..=full {
                for big in small..=full {
                    if small & big == small {
                        assert!(
                            values[(big - 1) as usize] <= values[(small - 1) as usize],
                            "{small:#b} vs {big:#b}"
                        );
                    }
                }
            }
            assert_eq!(solver.table().entries[&full], Rational::zero());
        }
    }
}
