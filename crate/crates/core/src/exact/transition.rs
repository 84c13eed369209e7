use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::ser::{Serialize, SerializeSeq, SerializeStruct, Serializer};

use super::{mask_vertices, one, rational_string, to_mask, MaskGraph, Rational};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::vertex_set::VertexSet;

/// Exact law of the blue set after one round from `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDistribution {
    pub base: u64,
    /// Successor blue set (bitmask) to probability.
    pub entries: BTreeMap<u64, Rational>,
}

impl TransitionDistribution {
    pub fn probability(&self, successor: u64) -> Rational {
        self.entries.get(&successor).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn stay_probability(&self) -> Rational {
        self.probability(self.base)
    }

    pub fn total(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |acc, p| acc + p)
    }
}

impl Serialize for TransitionDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Entries<'a>(&'a BTreeMap<u64, Rational>);
        impl Serialize for Entries<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for (mask, p) in self.0 {
                    seq.serialize_element(&(mask_vertices(*mask), rational_string(p)))?;
                }
                seq.end()
            }
        }
        let mut st = serializer.serialize_struct("TransitionDistribution", 2)?;
        st.serialize_field("base", &mask_vertices(self.base))?;
        st.serialize_field("entries", &Entries(&self.entries))?;
        st.end()
    }
}

/// Per-white-vertex force probabilities `r(v) = 1 − ∏_{u ∈ N(v) ∩ Z} (1 − |N[u] ∩ Z| / deg(u))`
/// for whites with a blue neighbour.
pub(crate) fn force_probabilities(g: &MaskGraph, blue: u64) -> Vec<(usize, Rational)> {
    let source_q: Vec<Option<Rational>> = (0..g.n)
        .map(|u| {
            (blue >> u & 1 == 1 && g.degree[u] > 0).then(|| {
                let closed = (g.open[u] & blue).count_ones() as i64 + 1;
                super::ratio(closed, g.degree[u] as i64)
            })
        })
        .collect();
    (0..g.n)
        .filter(|&v| blue >> v & 1 == 0 && g.open[v] & blue != 0)
        .map(|v| {
            let stay = mask_vertices(g.open[v] & blue)
                .into_iter()
                .fold(one(), |acc, u| acc * (one() - source_q[u].as_ref().unwrap()));
            (v, one() - stay)
        })
        .collect()
}

pub(crate) fn transition_masks(g: &MaskGraph, blue: u64) -> BTreeMap<u64, Rational> {
    let r = force_probabilities(g, blue);
    let mut entries: BTreeMap<u64, Rational> = BTreeMap::new();
    for outcome in 0u64..(1 << r.len()) {
        let mut prob = Rational::one();
        let mut succ = blue;
        for (i, (v, rv)) in r.iter().enumerate() {
            if outcome >> i & 1 == 1 {
                prob *= rv;
                succ |= 1 << v;
            } else {
                prob *= one() - rv;
            }
            if prob.is_zero() {
                break;
            }
        }
        if !prob.is_zero() {
            *entries.entry(succ).or_insert_with(Rational::zero) += prob;
        }
    }
    entries
}

/// Exact product-form law of one round: each white vertex turns blue independently.
pub fn transition_distribution(g: &Graph, blue: &VertexSet) -> Result<TransitionDistribution> {
    g.check_set(blue)?;
    if blue.is_empty() || blue.len() == g.n() {
        return Err(Error::DegenerateBlueSet);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mg = MaskGraph::new(g)?;
    let base = to_mask(blue);
    Ok(TransitionDistribution { base, entries: transition_masks(&mg, base) })
}
