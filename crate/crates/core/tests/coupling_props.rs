mod common;

use common::{connected_gnp, mask_set, set};
use num_traits::ToPrimitive;
use proptest::prelude::*;
use pzf_core::coupling::{coupled_run_alternative, coupled_run_subset, estimate_force_event_probability};
use pzf_core::exact::transition_distribution;
use pzf_core::forcing::{ActiveRounds, ForcingRule};
use pzf_core::graph::{cycle, path};
use pzf_core::VertexSet;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn subset_coupling_contains(n in 10usize..150, p in 0.03f64..0.4, gseed in any::<u64>(), seed in any::<u64>(), extra in proptest::collection::vec(any::<usize>(), 0..6)) {
        let g = connected_gnp(n, p, gseed % 1_000_000);
        let s1 = set(n, &[0]);
        let mut s2 = s1.clone();
        for v in extra {
            s2.insert(v % n);
        }
        let r = coupled_run_subset(&g, &s1, &s2, 1000, seed).unwrap();
        prop_assert!(r.contained);
        prop_assert!(r.trajectory1.iter().zip(&r.trajectory2).all(|(a, b)| a <= b));
    }

    #[test]
    fn alternative_coupling_contains_when_valid(n in 10usize..150, p in 0.05f64..0.4, gseed in any::<u64>(), seed in any::<u64>(), scale in 0.2f64..=1.0, only in proptest::collection::btree_set(0u32..6, 0..4)) {
        let g = connected_gnp(n, p, gseed % 1_000_000);
        let d_lower = (g.min_degree() as f64 * scale).max(0.5);
        for active in [ActiveRounds::All, ActiveRounds::Only(only.clone())] {
            let rule = ForcingRule::Alternative { d_lower, active_rounds: active };
            let r = coupled_run_alternative(&g, &set(n, &[1]), &rule, 1000, seed).unwrap();
            prop_assert!(r.contained);
            prop_assert!(!r.validity_violated);
        }
    }
}

/// Distribution of the blue count after one coupled round for process 2, against the
/// exact law of an uncoupled round.
fn second_process_marginal(g: &pzf_core::Graph, s1: &VertexSet, s2: &VertexSet, samples: u64) -> f64 {
    let law = transition_distribution(g, s2).unwrap();
    let n = g.n();
    let mut exact = vec![0.0; n + 1];
    for (succ, p) in &law.entries {
        exact[succ.count_ones() as usize] += p.to_f64().unwrap();
    }
    let mut counts = vec![0u64; n + 1];
    for seed in 0..samples {
        let r = coupled_run_subset(g, s1, s2, 1, seed).unwrap();
        counts[r.trajectory2[1]] += 1;
    }
    let mut worst = 0.0f64;
    for (k, &p) in exact.iter().enumerate() {
        let freq = counts[k] as f64 / samples as f64;
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        let z = if se == 0.0 { if freq == p { 0.0 } else { f64::INFINITY } } else { (freq - p).abs() / se };
        worst = worst.max(z);
    }
    worst
}

#[test]
fn coupled_second_process_keeps_its_marginal_law() {
    for g in [path(3).unwrap(), cycle(4).unwrap()] {
        let n = g.n();
        for m2 in 1u64..(1 << n) - 1 {
            let s2 = mask_set(n, m2);
            // Every nonempty proper subset of s2 as process 1's start.
            let mut m1 = m2;
            while m1 != 0 {
                let z = second_process_marginal(&g, &mask_set(n, m1), &s2, 20_000);
                assert!(z <= 5.0, "s1={m1:#b} s2={m2:#b}: z = {z}");
                m1 = (m1 - 1) & m2;
            }
        }
    }
}

#[test]
fn event_probabilities_are_monotone_in_the_start_set() {
    let g = connected_gnp(40, 0.15, 4);
    let target = VertexSet::from_vertices(40, 20..30);
    let grid = [(vec![0], vec![0, 1]), (vec![0], vec![0, 5, 9]), (vec![3, 4], vec![3, 4, 30])];
    for rounds in [2u32, 3, 4] {
        for (a, b) in &grid {
            let e1 = estimate_force_event_probability(&g, &set(40, a), &target, rounds, 4000, 1).unwrap();
            let e2 = estimate_force_event_probability(&g, &set(40, b), &target, rounds, 4000, 2).unwrap();
            let slack = 5.0 * (e1.std_error.powi(2) + e2.std_error.powi(2)).sqrt();
            assert!(e1.estimate <= e2.estimate + slack.max(1e-12), "{a:?} vs {b:?} at {rounds}: {e1:?} {e2:?}");
        }
    }
}

#[test]
fn spec_sized_subset_coupling() {
    let g = pzf_core::graph::sample_gnp(200, 0.1, 77).unwrap();
    for seed in 0..1000 {
        let r = coupled_run_subset(&g, &set(200, &[0]), &set(200, &[0, 1]), 500, seed).unwrap();
        assert!(r.contained, "seed {seed}");
    }
}

#[test]
fn alternative_with_ninety_percent_of_mean_degree() {
    // d_lower = 0.9(n − 1)p can exceed the minimum degree; containment then is no
    // longer guaranteed and the violation is flagged.
    let g = pzf_core::graph::sample_gnp(300, 0.2, 5).unwrap();
    let d_lower = 0.9 * 299.0 * 0.2;
    let rule = ForcingRule::alternative(d_lower);
    let mut contained = 0;
    let mut flagged = 0;
    for seed in 0..200 {
        let r = coupled_run_alternative(&g, &set(300, &[0]), &rule, 500, seed).unwrap();
        contained += r.contained as u32;
        flagged += r.validity_violated as u32;
    }
    assert!((g.min_degree() as f64) < d_lower);
    assert!(flagged > 0);
    assert!(contained > 0);
}
