use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ExperimentConfig, SummaryStats, SweepRow};
use crate::coupling::csv_error;
use crate::error::Result;
use crate::forcing::TrialRecord;

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<(usize, f64)>,
    pub engine_version: String,
    /// `dense` or `sparse` `G(n, p)` sampling, when a random graph was sampled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler_mode: Option<String>,
    pub wall_time_seconds: f64,
    /// SHA-256 of the canonical JSON form of the configuration.
    pub config_hash: String,
    pub config: ExperimentConfig,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, grid: Vec<(usize, f64)>, wall_time_seconds: f64) -> Result<Self> {
        let p = config.graph.and_then(|g| g.edge_probability()).or(grid.first().map(|c| c.1));
        Ok(Self {
            master_seed: config.master_seed,
            grid,
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            sampler_mode: p.map(|p| format!("{:?}", crate::graph::SamplerMode::for_probability(p)).to_lowercase()),
            wall_time_seconds,
            config_hash: config_hash(config)?,
            config: config.clone(),
        })
    }
}

pub fn config_hash(config: &ExperimentConfig) -> Result<String> {
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(config)?)))
}

pub fn write_manifest(manifest: &Manifest, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, manifest)?;
    file.write_all(b"\n")?;
    Ok(())
}

/// One record per line, in the given order.
pub fn write_records_jsonl<'a, W: Write>(records: impl IntoIterator<Item = &'a TrialRecord>, mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Flat CSV form of a summary, optionally with bound columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub p: Option<f64>,
    pub records: usize,
    pub count: usize,
    pub cap_hits: usize,
    pub mean: Option<f64>,
    pub std_error: Option<f64>,
    pub median: Option<f64>,
    pub q10: Option<f64>,
    pub q90: Option<f64>,
    pub min: Option<u32>,
    pub max: Option<u32>,
    pub upper: Option<f64>,
    pub lower: Option<f64>,
    pub regime: Option<String>,
    pub error: Option<String>,
}

impl SummaryRow {
    pub fn from_stats(n: usize, p: Option<f64>, s: &SummaryStats) -> Self {
        let bounds = p.and_then(|p| crate::bounds::predict_bounds(n, p).ok());
        Self {
            n,
            p,
            records: s.records,
            count: s.count,
            cap_hits: s.cap_hits,
            mean: s.mean,
            std_error: s.std_error,
            median: s.median,
            q10: s.q10,
            q90: s.q90,
            min: s.min,
            max: s.max,
            upper: bounds.map(|b| b.upper),
            lower: bounds.map(|b| b.lower),
            regime: bounds.map(|b| b.regime.label().to_string()),
            error: None,
        }
    }
}

impl From<&SweepRow> for SummaryRow {
    fn from(row: &SweepRow) -> Self {
        let empty = super::summarize(std::iter::empty());
        let mut out = Self::from_stats(row.n, Some(row.p), row.stats.as_ref().unwrap_or(&empty));
        if row.stats.is_none() {
            out.records = 0;
        }
        out.error = row.error.clone();
        out
    }
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;
    use crate::montecarlo::{run_trials, summarize, StartPolicy};

    #[test]
    fn jsonl_is_reproducible() {
        let c = ExperimentConfig::new(GraphSpec::Gnp { n: 100, p: 0.2 }, StartPolicy::Vertex { vertex: 0 }, 10, 42);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_records_jsonl(&run_trials(&c).unwrap(), &mut a).unwrap();
        write_records_jsonl(&run_trials(&c).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let first: TrialRecord = serde_json::from_slice(a.split(|&c| c == b'\n').next().unwrap()).unwrap();
        assert_eq!(first.trial, 0);
        assert_eq!(first.family, "gnp");
    }

    #[test]
    fn summary_csv_columns() {
        let c = ExperimentConfig::new(GraphSpec::Gnp { n: 100, p: 0.2 }, StartPolicy::Vertex { vertex: 0 }, 10, 42);
        let s = summarize(&run_trials(&c).unwrap());
        let mut buf = Vec::new();
        write_summary_csv(&[SummaryRow::from_stats(100, Some(0.2), &s)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,p,records,count,cap_hits,mean,std_error,median,q10,q90,min,max,upper,lower,regime,error"
        );
        assert!(lines.next().unwrap().starts_with("100,0.2,10,10,0,"));
    }

    #[test]
    fn manifest_hash_is_stable() {
        let c = ExperimentConfig::new(GraphSpec::Gnp { n: 100, p: 0.05 }, StartPolicy::Vertex { vertex: 0 }, 10, 42);
        let m = Manifest::new(&c, vec![], 0.5).unwrap();
        assert_eq!(m.config_hash.len(), 64);
        assert_eq!(m.config_hash, config_hash(&c.clone()).unwrap());
        assert_eq!(m.sampler_mode.as_deref(), Some("sparse"));
        let mut d = c.clone();
        d.master_seed = 43;
        assert_ne!(config_hash(&d).unwrap(), m.config_hash);
    }
}
