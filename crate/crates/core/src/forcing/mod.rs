//! Round-synchronised probabilistic and classical zero forcing.

mod rule;
mod run;
mod state;

pub use rule::{ActiveRounds, ForcingRule};
pub use run::{
    default_max_rounds, run_process, run_with_shadow, RunOptions, ShadowRun, TrialRecord,
    TrialStatus,
};
pub use state::{ProcessState, Recording, RoundKernel, StepReport};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::vertex_set::VertexSet;

/// `|N[u] ∩ Z| / deg(u)`: the probability that blue `u` forces any one white neighbour
/// this round.
pub fn force_probability(g: &Graph, blue: &VertexSet, u: usize) -> Result<f64> {
    g.check_vertex(u)?;
    if !blue.contains(u) {
        return Err(Error::InvalidParameter(format!("vertex {u} is not blue")));
    }
    let deg = g.degree(u);
    if deg == 0 {
        return Err(Error::IsolatedVertex(u));
    }
    let closed = 1 + g.neighbors(u).iter().filter(|&&v| blue.contains(v as usize)).count();
    Ok(closed as f64 / deg as f64)
}

/// One simultaneous application of the classical colour-change rule: a blue vertex
/// whose only white neighbour is `v` turns `v` blue.
pub fn classical_step(g: &Graph, blue: &VertexSet) -> VertexSet {
    let mut next = blue.clone();
    for u in blue.iter() {
        let mut whites = g.neighbors(u).iter().filter(|&&v| !blue.contains(v as usize));
        if let (Some(&v), None) = (whites.next(), whites.next()) {
            next.insert(v as usize);
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, path, star};

    fn set(n: usize, v: &[usize]) -> VertexSet {
        VertexSet::from_vertices(n, v.iter().copied())
    }

    #[test]
    fn force_probability_examples() {
        assert_eq!(force_probability(&complete(2).unwrap(), &set(2, &[0]), 0).unwrap(), 1.0);
        assert_eq!(force_probability(&path(3).unwrap(), &set(3, &[1]), 1).unwrap(), 0.5);
        assert_eq!(force_probability(&cycle(4).unwrap(), &set(4, &[0, 1]), 0).unwrap(), 1.0);
    }

    #[test]
    fn force_probability_errors() {
        let g = crate::graph::Graph::from_edges(2, &[]).unwrap();
        assert!(matches!(force_probability(&g, &set(2, &[0]), 0), Err(Error::IsolatedVertex(0))));
        assert!(force_probability(&path(3).unwrap(), &set(3, &[1]), 0).is_err());
    }

    #[test]
    fn classical_examples() {
        assert_eq!(classical_step(&path(3).unwrap(), &set(3, &[0])).to_vec(), vec![0, 1]);
        assert_eq!(classical_step(&complete(3).unwrap(), &set(3, &[0])).to_vec(), vec![0]);
        assert_eq!(classical_step(&star(3).unwrap(), &set(4, &[0])).to_vec(), vec![0]);
    }
}
