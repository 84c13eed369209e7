//! Empirical audit of neighbourhood expansion: every small set `S` should satisfy
//! `|N(S)| ≈ |S|·d` and every degree should be close to `d`.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionParams {
    pub omega: f64,
    pub sample_count: usize,
    pub seed: u64,
    /// Reference degree; defaults to the average degree of the graph.
    pub expected_degree: Option<f64>,
    /// Maximum accepted relative deviation of any degree from `d`.
    pub degree_tolerance: f64,
    /// Maximum accepted relative deviation of `|N(S)|` from `|S|·d`.
    pub set_tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetSample {
    pub size: usize,
    pub neighborhood: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub n: usize,
    pub d: f64,
    pub omega: f64,
    pub min_degree: usize,
    pub max_degree: usize,
    /// `max_v |deg(v) − d| / d`.
    pub degree_deviation: f64,
    /// Largest sampled set size, `max(1, ⌊n / (d·ω)⌋)`.
    pub set_size_cap: usize,
    pub samples: Vec<SetSample>,
    pub max_set_deviation: f64,
    pub degree_ok: bool,
    pub sets_ok: bool,
    pub set_violations: usize,
}

impl ExpansionReport {
    pub fn passed(&self) -> bool {
        self.degree_ok && self.sets_ok
    }
}

pub fn check_expansion(g: &Graph, params: &ExpansionParams) -> Result<ExpansionReport> {
    if params.omega.is_nan() || params.omega <= 1.0 {
        return Err(Error::InvalidParameter(format!("omega must exceed 1, got {}", params.omega)));
    }
    let n = g.n();
    let d = params.expected_degree.unwrap_or_else(|| g.average_degree());
    if d.is_nan() || d <= 0.0 {
        return Err(Error::InvalidParameter(format!("reference degree must be positive, got {d}")));
    }
    let (min_degree, max_degree) = (g.min_degree(), g.max_degree());
    let degree_deviation = g
        .degrees()
        .map(|k| (k as f64 - d).abs() / d)
        .fold(0.0, f64::max);

    let set_size_cap = ((n as f64 / (d * params.omega)).floor() as usize).clamp(1, n);
    let mut rng = stream(params.seed);
    let mut samples = Vec::with_capacity(params.sample_count);
    for _ in 0..params.sample_count {
        let size = rng.random_range(1..=set_size_cap);
        let members = index::sample(&mut rng, n, size);
        let set = VertexSet::from_vertices(n, members.iter());
        let neighborhood = g.neighborhood(&set).len();
        let target = size as f64 * d;
        samples.push(SetSample {
            size,
            neighborhood,
            deviation: (neighborhood as f64 - target).abs() / target,
        });
    }
    let max_set_deviation = samples.iter().map(|s| s.deviation).fold(0.0, f64::max);
    let set_violations = samples.iter().filter(|s| s.deviation > params.set_tolerance).count();
    Ok(ExpansionReport {
        n,
        d,
        omega: params.omega,
        min_degree,
        max_degree,
        degree_deviation,
        set_size_cap,
        samples,
        max_set_deviation,
        degree_ok: degree_deviation <= params.degree_tolerance,
        sets_ok: set_violations == 0,
        set_violations,
    })
}
