mod common;

use proptest::prelude::*;
use pzf_core::graph::{read_edge_list, sample_gnp, write_edge_list, SamplerMode};
use pzf_core::VertexSet;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_graphs_are_simple_and_reproducible(n in 1usize..120, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = sample_gnp(n, p, seed).unwrap();
        g.check_invariants().unwrap();
        prop_assert_eq!(&g, &sample_gnp(n, p, seed).unwrap());
        let mut text = Vec::new();
        write_edge_list(&g, &mut text).unwrap();
        let back = read_edge_list(&text[..]).unwrap();
        back.check_invariants().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn neighbourhood_excludes_the_set(n in 1usize..60, p in 0.0f64..0.5, seed in any::<u64>(), picks in proptest::collection::vec(any::<usize>(), 0..10)) {
        let g = sample_gnp(n, p, seed).unwrap();
        let s = VertexSet::from_vertices(n, picks.iter().map(|v| v % n));
        let nb = g.neighborhood(&s);
        prop_assert!(nb.is_disjoint(&s));
        for v in nb.iter() {
            prop_assert!(g.neighbors(v).iter().any(|&u| s.contains(u as usize)));
        }
        prop_assert!(g.neighborhood(&VertexSet::full(n)).is_empty());
    }
}

fn inclusion_z_scores(n: usize, p: f64, seeds: u64, pairs: &[(usize, usize)]) -> Vec<f64> {
    let mut hits = vec![0u64; pairs.len()];
    for seed in 0..seeds {
        let g = sample_gnp(n, p, seed).unwrap();
        for (h, &(u, v)) in hits.iter_mut().zip(pairs) {
            *h += g.has_edge(u, v) as u64;
        }
    }
    let se = (p * (1.0 - p) / seeds as f64).sqrt();
    hits.iter().map(|&h| (h as f64 / seeds as f64 - p).abs() / se).collect()
}

#[test]
fn pair_inclusion_frequency_dense_mode() {
    assert_eq!(SamplerMode::for_probability(0.3), SamplerMode::Dense);
    let pairs = [(0, 1), (0, 99), (17, 42), (98, 99), (50, 51)];
    for z in inclusion_z_scores(100, 0.3, 2000, &pairs) {
        assert!(z <= 5.0, "z = {z}");
    }
}

#[test]
fn pair_inclusion_frequency_sparse_mode() {
    assert_eq!(SamplerMode::for_probability(0.05), SamplerMode::Sparse);
    let pairs = [(0, 1), (0, 99), (17, 42), (98, 99), (50, 51)];
    for z in inclusion_z_scores(100, 0.05, 4000, &pairs) {
        assert!(z <= 5.0, "z = {z}");
    }
}

#[test]
fn edge_count_matches_expectation() {
    let (n, p) = (2000usize, 0.01);
    let g = sample_gnp(n, p, 5).unwrap();
    let pairs = (n * (n - 1) / 2) as f64;
    let z = (g.edge_count() as f64 - pairs * p) / (pairs * p * (1.0 - p)).sqrt();
    assert!(z.abs() < 5.0, "z = {z}");
}
