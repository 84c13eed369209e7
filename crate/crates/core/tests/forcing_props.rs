mod common;

use common::{connected_gnp, mask_set, set, small_connected};
use proptest::prelude::*;
use pzf_core::acceptance::one_step_max_z;
use pzf_core::forcing::{
    classical_step, run_process, run_with_shadow, ForcingRule, ProcessState, Recording, RoundKernel, RunOptions,
};
use pzf_core::graph::{cycle, path, star};
use pzf_core::rng::stream;
use pzf_core::VertexSet;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn blue_sets_only_grow(g in small_connected(), seed in any::<u64>(), start in 0usize..7) {
        let start = set(g.n(), &[start % g.n()]);
        let mut state = ProcessState::new(&g, &start, Recording::default()).unwrap();
        let mut rng = stream(seed);
        let mut prev = state.blue().clone();
        while !state.is_complete() {
            state.step(&g, &ForcingRule::Standard, RoundKernel::Auto, &mut rng);
            prop_assert!(prev.is_subset(state.blue()));
            prev = state.blue().clone();
        }
        prop_assert!(state.blue_count_trajectory().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn classical_shadow_is_contained(n in 20usize..120, p in 0.03f64..0.3, gseed in any::<u64>(), seed in any::<u64>()) {
        let g = connected_gnp(n, p, gseed % 1_000_000);
        let r = run_with_shadow(&g, &set(n, &[0]), seed, 10_000).unwrap();
        prop_assert!(r.contained);
        prop_assert_eq!(r.classical_trajectory.len(), r.record.b_trajectory.len());
    }

    #[test]
    fn records_are_reproducible(n in 10usize..200, p in 0.02f64..0.5, gseed in any::<u64>(), seed in any::<u64>()) {
        let g = connected_gnp(n, p, gseed % 1_000_000);
        let opts = RunOptions { recording: Recording { blue_edges: true, newest_layer_degree: true }, ..RunOptions::with_max_rounds(10_000) };
        let a = run_process(&g, &set(n, &[n / 2]), &ForcingRule::Standard, seed, &opts).unwrap();
        let b = run_process(&g, &set(n, &[n / 2]), &ForcingRule::Standard, seed, &opts).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.is_forced());
        prop_assert!(a.pt.unwrap() >= 1);
    }

    #[test]
    fn single_white_neighbour_with_full_closed_count_is_forced(n in 3usize..40, seed in any::<u64>()) {
        // On a path blue from 0 to k, vertex k has every neighbour but k + 1 blue.
        let g = path(n).unwrap();
        let k = (seed as usize) % (n - 1);
        let blue = VertexSet::from_vertices(n, 0..=k);
        let mut state = ProcessState::new(&g, &blue, Recording::default()).unwrap();
        state.step(&g, &ForcingRule::Standard, RoundKernel::Auto, &mut stream(seed));
        prop_assert!(state.blue().contains(k + 1));
    }

    #[test]
    fn classical_step_is_contained_in_every_round_outcome(g in small_connected(), mask in 1u64..127, seed in any::<u64>()) {
        let n = g.n();
        let mask = mask & ((1 << n) - 1);
        prop_assume!(mask != 0 && mask != (1 << n) - 1);
        let blue = mask_set(n, mask);
        let classical = classical_step(&g, &blue);
        for kernel in [RoundKernel::Edge, RoundKernel::Vertex] {
            let mut state = ProcessState::new(&g, &blue, Recording::default()).unwrap();
            state.step(&g, &ForcingRule::Standard, kernel, &mut stream(seed));
            prop_assert!(classical.is_subset(state.blue()));
        }
    }
}

#[test]
fn both_kernels_sample_the_exact_one_round_law() {
    for g in [path(4).unwrap(), cycle(4).unwrap(), star(3).unwrap(), connected_gnp(5, 0.5, 3)] {
        for kernel in [RoundKernel::Edge, RoundKernel::Vertex, RoundKernel::Auto] {
            let z = one_step_max_z(&g, 20_000, kernel, 11).unwrap();
            assert!(z <= 5.0, "{kernel:?}: z = {z}");
        }
    }
}

#[test]
fn alternative_rule_with_divisor_one_forces_everything_adjacent() {
    let g = connected_gnp(60, 0.1, 1);
    let start = set(60, &[0]);
    let mut state = ProcessState::new(&g, &start, Recording::default()).unwrap();
    state.step(&g, &ForcingRule::alternative(1.0), RoundKernel::Auto, &mut stream(0));
    assert_eq!(state.blue_count(), 1 + g.degree(0));
}

#[test]
fn oversized_divisor_sets_the_violation_flag() {
    let g = path(10).unwrap();
    let r = run_process(&g, &set(10, &[0]), &ForcingRule::alternative(5.0), 1, &RunOptions::with_max_rounds(10_000)).unwrap();
    assert!(r.coupling_violation);
    let r = run_process(&g, &set(10, &[0]), &ForcingRule::alternative(1.0), 1, &RunOptions::with_max_rounds(10_000)).unwrap();
    assert!(!r.coupling_violation);
}

#[test]
fn jsonl_record_round_trip() {
    let g = connected_gnp(50, 0.2, 2);
    let opts = RunOptions { recording: Recording { blue_edges: true, newest_layer_degree: false }, ..RunOptions::with_max_rounds(500) };
    let r = run_process(&g, &set(50, &[3]), &ForcingRule::alternative(4.0), 9, &opts).unwrap();
    let line = serde_json::to_string(&r).unwrap();
    assert!(line.starts_with(r#"{"seed":9,"trial":0,"n":50,"p":null,"family":"custom","start":[3],"rule":{"kind":"alternative""#));
    let back: pzf_core::TrialRecord = serde_json::from_str(&line).unwrap();
    assert_eq!(back, r);
}
