//! Seeded trial orchestration, summaries, parameter sweeps and growth fits.
//!
//! Trial `k` of an experiment uses seed `derive_seed(master_seed, k)`; a random graph is
//! sampled once per experiment from `derive_seed(master_seed, GRAPH_STREAM)` and shared
//! by all its trials. Output is a pure function of the configuration, whatever the
//! worker count.

mod output;
mod stats;
mod sweep;

pub use output::{
    config_hash, write_manifest, write_records_jsonl, write_summary_csv, Manifest, SummaryRow,
};
pub use stats::{summarize, SummaryAccumulator, SummaryStats};
pub use sweep::{fit_growth, fit_line, sweep, GrowthFit, GrowthModel, SweepRow};

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::phase_thresholds;
use crate::error::{Error, Result};
use crate::forcing::{
    default_max_rounds, run_process, ForcingRule, ProcessState, Recording, RoundKernel,
    RunOptions, TrialRecord,
};
use crate::graph::{read_edge_list, Graph, GraphSpec};
use crate::rng::{derive_seed, stream, GRAPH_STREAM};
use crate::vertex_set::VertexSet;

/// Trials handed to the worker pool at a time; records are released in trial order.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum StartPolicy {
    Vertex { vertex: usize },
    Set { vertices: Vec<usize> },
    /// Each trial runs one process per start vertex, with seeds
    /// `derive_seed(trial_seed, v)`, and keeps the fastest (ties to the lowest vertex).
    AllSingletonsMin,
}

impl Default for StartPolicy {
    fn default() -> Self {
        StartPolicy::Vertex { vertex: 0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    /// Edge-list file, used when `graph` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_file: Option<PathBuf>,
    #[serde(default)]
    pub start: StartPolicy,
    #[serde(default)]
    pub rule: ForcingRule,
    pub trials: u64,
    /// Defaults to [`default_max_rounds`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<u32>,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub outputs: OutputPaths,
    /// Records first crossings of the phase thresholds computed with this `ω`
    /// (random graphs only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_omega: Option<f64>,
    #[serde(default)]
    pub recording: Recording,
    #[serde(default)]
    pub kernel: RoundKernel,
}

impl ExperimentConfig {
    pub fn new(graph: GraphSpec, start: StartPolicy, trials: u64, master_seed: u64) -> Self {
        Self {
            graph: Some(graph),
            graph_file: None,
            start,
            rule: ForcingRule::Standard,
            trials,
            max_rounds: None,
            master_seed,
            workers: None,
            outputs: OutputPaths::default(),
            threshold_omega: None,
            recording: Recording::default(),
            kernel: RoundKernel::Auto,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.graph.is_none() && self.graph_file.is_none() {
            return Err(Error::InvalidParameter("config needs a graph or a graph_file".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        self.rule.validate()
    }

    /// Builds (or loads) the experiment's graph.
    pub fn load_graph(&self) -> Result<Graph> {
        match (&self.graph, &self.graph_file) {
            (Some(spec), _) => spec.build(derive_seed(self.master_seed, GRAPH_STREAM)),
            (None, Some(path)) => read_edge_list(BufReader::new(File::open(path)?)),
            (None, None) => Err(Error::InvalidParameter("config needs a graph or a graph_file".into())),
        }
    }

    fn family(&self) -> String {
        self.graph.map_or_else(|| "file".into(), |g| g.family().into())
    }

    fn resolved_max_rounds(&self, n: usize) -> u32 {
        self.max_rounds
            .unwrap_or_else(|| default_max_rounds(n, self.graph.and_then(|g| g.edge_probability())))
    }

    fn run_options(&self, g: &Graph) -> Result<RunOptions> {
        let mut opts = RunOptions::with_max_rounds(self.resolved_max_rounds(g.n()));
        opts.kernel = self.kernel;
        opts.recording = self.recording;
        if let (Some(omega), Some(p)) = (self.threshold_omega, self.graph.and_then(|s| s.edge_probability())) {
            opts.thresholds = phase_thresholds(g.n(), p, omega)?.named();
        }
        Ok(opts)
    }
}

fn resolve_start(policy: &StartPolicy, n: usize) -> Result<Option<VertexSet>> {
    let check = |v: usize| if v < n { Ok(()) } else { Err(Error::VertexOutOfRange { vertex: v, n }) };
    match policy {
        StartPolicy::Vertex { vertex } => {
            check(*vertex)?;
            Ok(Some(VertexSet::from_vertices(n, [*vertex])))
        }
        StartPolicy::Set { vertices } => {
            if vertices.is_empty() {
                return Err(Error::EmptyStart);
            }
            for &v in vertices {
                check(v)?;
            }
            Ok(Some(VertexSet::from_vertices(n, vertices.iter().copied())))
        }
        StartPolicy::AllSingletonsMin => Ok(None),
    }
}

/// Propagation time only, consuming randomness exactly as [`run_process`] does.
fn propagation_time(g: &Graph, start: &VertexSet, rule: &ForcingRule, seed: u64, opts: &RunOptions) -> Result<Option<u32>> {
    let mut state = ProcessState::new(g, start, Recording::default())?;
    let mut rng = stream(seed);
    while !state.is_complete() && state.round() < opts.max_rounds {
        state.step(g, rule, opts.kernel, &mut rng);
    }
    Ok(state.is_complete().then(|| state.round()))
}

fn run_one(g: &Graph, config: &ExperimentConfig, start: Option<&VertexSet>, opts: &RunOptions, trial: u64) -> Result<TrialRecord> {
    let seed = derive_seed(config.master_seed, trial);
    let mut record = match start {
        Some(s) => run_process(g, s, &config.rule, seed, opts)?,
        None => {
            let mut best: Option<(usize, u32)> = None;
            for v in 0..g.n() {
                let single = VertexSet::from_vertices(g.n(), [v]);
                if let Some(pt) = propagation_time(g, &single, &config.rule, derive_seed(seed, v as u64), opts)? {
                    if best.is_none_or(|(_, b)| pt < b) {
                        best = Some((v, pt));
                    }
                }
            }
            let v = best.map_or(0, |(v, _)| v);
            let mut r = run_process(g, &VertexSet::from_vertices(g.n(), [v]), &config.rule, derive_seed(seed, v as u64), opts)?;
            r.seed = seed;
            r
        }
    };
    record.seed = seed;
    record.trial = trial;
    record.family = config.family();
    record.p = config.graph.and_then(|s| s.edge_probability());
    Ok(record)
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    builder.build().map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

/// Runs every trial on `g`, handing records to `sink` in trial order.
pub fn run_trials_on(g: &Graph, config: &ExperimentConfig, mut sink: impl FnMut(TrialRecord) -> Result<()>) -> Result<()> {
    config.validate()?;
    let start = resolve_start(&config.start, g.n())?;
    let opts = config.run_options(g)?;
    let pool = pool(config.workers)?;
    let mut first = 0;
    while first < config.trials {
        let last = (first + CHUNK).min(config.trials);
        let chunk: Vec<Result<TrialRecord>> = pool.install(|| {
            (first..last).into_par_iter().map(|k| run_one(g, config, start.as_ref(), &opts, k)).collect()
        });
        for record in chunk {
            sink(record?)?;
        }
        first = last;
    }
    Ok(())
}

/// Builds the graph and collects every record, ordered by trial index.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let g = config.load_graph()?;
    let mut out = Vec::with_capacity(config.trials.min(1 << 20) as usize);
    run_trials_on(&g, config, |r| {
        out.push(r);
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_two_always_one_round() {
        let c = ExperimentConfig::new(GraphSpec::Complete { n: 2 }, StartPolicy::Vertex { vertex: 0 }, 100, 1);
        let recs = run_trials(&c).unwrap();
        assert_eq!(recs.len(), 100);
        assert!(recs.iter().all(|r| r.pt == Some(1)));
        assert!(recs.iter().enumerate().all(|(k, r)| r.trial == k as u64 && r.family == "complete"));
    }

    #[test]
    fn path_three_from_end() {
        let c = ExperimentConfig::new(GraphSpec::Path { n: 3 }, StartPolicy::Vertex { vertex: 0 }, 50, 2);
        assert!(run_trials(&c).unwrap().iter().all(|r| r.pt == Some(2)));
    }

    #[test]
    fn all_singletons_on_path_four() {
        // Ends finish in exactly 3 rounds; from an inner vertex pt = 2 w.p. 1/2 and
        // pt ≥ 3 otherwise, so E[min] = 2 + (1/2)² = 9/4.
        let c = ExperimentConfig::new(GraphSpec::Path { n: 4 }, StartPolicy::AllSingletonsMin, 20_000, 3);
        let recs = run_trials(&c).unwrap();
        let s = summarize(&recs);
        assert!((s.mean.unwrap() - 2.25).abs() < 4.0 * s.std_error.unwrap(), "{s:?}");
        assert!(recs.iter().all(|r| r.pt.unwrap() <= 3));
        assert!(recs.iter().any(|r| r.start.contains(1)) && recs.iter().any(|r| r.start.contains(2)));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let mut c = ExperimentConfig::new(GraphSpec::Gnp { n: 300, p: 0.05 }, StartPolicy::Vertex { vertex: 0 }, 40, 9);
        c.workers = Some(1);
        let a = run_trials(&c).unwrap();
        c.workers = Some(3);
        let b = run_trials(&c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn thresholds_are_recorded() {
        let mut c = ExperimentConfig::new(GraphSpec::Gnp { n: 2000, p: 0.05 }, StartPolicy::Vertex { vertex: 0 }, 3, 4);
        c.threshold_omega = Some(10.0);
        let recs = run_trials(&c).unwrap();
        assert!(recs.iter().all(|r| r.crossings.contains_key("b4")));
    }

    #[test]
    fn invalid_configs() {
        let mut c = ExperimentConfig::new(GraphSpec::Path { n: 3 }, StartPolicy::Vertex { vertex: 7 }, 5, 0);
        assert!(matches!(run_trials(&c), Err(Error::VertexOutOfRange { .. })));
        c.start = StartPolicy::Set { vertices: vec![] };
        assert!(matches!(run_trials(&c), Err(Error::EmptyStart)));
        c.start = StartPolicy::default();
        c.trials = 0;
        assert!(run_trials(&c).is_err());
        assert!(ExperimentConfig::from_json(r#"{"trials": 3, "master_seed": 1}"#).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let text = r#"{"graph":{"family":"gnp","n":100,"p":0.1},"start":{"policy":"all_singletons_min"},"trials":5,"master_seed":7}"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(c.start, StartPolicy::AllSingletonsMin);
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
