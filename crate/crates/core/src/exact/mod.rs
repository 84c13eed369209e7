//! Exact rational computations on small graphs: one-round transition laws, expected
//! propagation times and exhaustive edge-conditioning oracles.
//!
//! Blue sets are bitmasks over at most 63 vertices. No floating point is used.

mod oracle;
mod solver;
mod transition;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use oracle::{
    edge_conditionals, verify_edge_count_domination, verify_lemma_edge_probability,
    ConditionalEntry, OracleKind, OracleReport, Witness,
};
pub use solver::{
    expected_propagation_time, min_expected_propagation_time, ExactSolver, ExpectationTable,
    DEFAULT_SIZE_CAP,
};
pub use transition::{transition_distribution, TransitionDistribution};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::vertex_set::VertexSet;

pub type Rational = BigRational;

/// Formats as `numerator/denominator`, always with an explicit denominator.
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    let num: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(num))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn to_mask(set: &VertexSet) -> u64 {
    set.iter().fold(0u64, |m, v| m | (1 << v))
}

pub fn mask_vertices(mask: u64) -> Vec<usize> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Adjacency bitmasks of a graph with at most 63 vertices.
#[derive(Debug, Clone)]
pub(crate) struct MaskGraph {
    pub n: usize,
    pub open: Vec<u64>,
    pub degree: Vec<usize>,
}

impl MaskGraph {
    pub fn new(g: &Graph) -> Result<Self> {
        if g.n() > 63 {
            return Err(Error::TooLarge { n: g.n(), cap: 63 });
        }
        let open: Vec<u64> = (0..g.n())
            .map(|u| g.neighbors(u).iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect();
        Ok(Self { n: g.n(), degree: (0..g.n()).map(|u| g.degree(u)).collect(), open })
    }

    pub fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }
}

pub(crate) fn one() -> Rational {
    Rational::one()
}
