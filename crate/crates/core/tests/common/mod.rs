#![allow(dead_code)]

use proptest::prelude::*;
use pzf_core::graph::sample_gnp;
use pzf_core::{Graph, VertexSet};

pub fn set(n: usize, v: &[usize]) -> VertexSet {
    VertexSet::from_vertices(n, v.iter().copied())
}

pub fn mask_set(n: usize, mask: u64) -> VertexSet {
    VertexSet::from_vertices(n, (0..n).filter(|v| mask >> v & 1 == 1))
}

/// A connected `G(n, p)` sample, found by scanning seeds upward from `seed`.
pub fn connected_gnp(n: usize, p: f64, seed: u64) -> Graph {
    (seed..)
        .map(|s| sample_gnp(n, p, s).unwrap())
        .find(Graph::is_connected)
        .unwrap()
}

prop_compose! {
    pub fn small_connected()(n in 3usize..=7, p in 0.3f64..0.9, seed in any::<u64>()) -> Graph {
        connected_gnp(n, p, seed % 1_000_000)
    }
}
