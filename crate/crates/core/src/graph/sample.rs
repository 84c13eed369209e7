use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::rng::stream;

/// Below this edge probability the sampler skips geometrically over the pair stream.
pub const SPARSE_THRESHOLD: f64 = 0.1;

/// How a `G(n, p)` sample consumes its random stream. The two modes have the same
/// distribution but produce different graphs for the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    /// One uniform per unordered pair, pairs in lexicographic order.
    Dense,
    /// Geometric gaps between successive present pairs.
    Sparse,
}

impl SamplerMode {
    pub fn for_probability(p: f64) -> Self {
        if p < SPARSE_THRESHOLD {
            SamplerMode::Sparse
        } else {
            SamplerMode::Dense
        }
    }
}

/// Samples `G(n, p)`: every unordered pair is an edge independently with probability `p`.
/// The result is a pure function of `(n, p, seed)`.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("graph needs at least one vertex".into()));
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidParameter(format!("{n} vertices exceed the u32 id space")));
    }
    if p == 0.0 {
        return Ok(Graph::from_sorted_stream(n, |_| {}));
    }
    let n32 = n as u32;
    match SamplerMode::for_probability(p) {
        SamplerMode::Dense => Ok(Graph::from_sorted_stream(n, |sink| {
            let mut rng = stream(seed);
            for u in 0..n32 {
                for v in u + 1..n32 {
                    if rng.random::<f64>() < p {
                        sink(u, v);
                    }
                }
            }
        })),
        SamplerMode::Sparse => {
            let log_q = (-p).ln_1p();
            Ok(Graph::from_sorted_stream(n, |sink| {
                let mut rng = stream(seed);
                let n = n as u64;
                let mut u: u64 = 0;
                // `v` is the last visited column of row `u`; row u spans u+1..n.
                let mut v: u64 = 0;
                loop {
                    let uniform = 1.0 - rng.random::<f64>();
                    let skip = (uniform.ln() / log_q).floor();
                    let skip = if skip >= 1e18 { u64::MAX / 4 } else { skip as u64 };
                    v = v.saturating_add(1).saturating_add(skip);
                    while v >= n {
                        let overflow = v - n;
                        u += 1;
                        if u + 1 >= n {
                            return;
                        }
                        v = u + 1 + overflow;
                    }
                    sink(u as u32, v as u32);
                }
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        let g = sample_gnp(1, 0.5, 9).unwrap();
        assert_eq!((g.n(), g.edge_count()), (1, 0));
        let g = sample_gnp(5, 1.0, 9).unwrap();
        assert_eq!(g.edge_count(), 10);
        let g = sample_gnp(50, 0.0, 9).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(matches!(sample_gnp(5, 1.5, 0), Err(Error::InvalidProbability(_))));
        assert!(sample_gnp(5, -0.1, 0).is_err());
        assert!(sample_gnp(5, f64::NAN, 0).is_err());
    }

    #[test]
    fn deterministic_in_both_modes() {
        for p in [0.02, 0.4] {
            let a = sample_gnp(300, p, 77).unwrap();
            let b = sample_gnp(300, p, 77).unwrap();
            let c = sample_gnp(300, p, 78).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
            assert!(a.check_invariants().is_ok());
        }
    }

    #[test]
    fn sparse_mode_reaches_last_pair() {
        // With p just under the threshold every row, including the last pair, is visited.
        let mut seen_last = false;
        for seed in 0..200 {
            let g = sample_gnp(4, 0.099, seed).unwrap();
            seen_last |= g.has_edge(2, 3);
            assert!(g.check_invariants().is_ok());
        }
        assert!(seen_last);
    }
}
