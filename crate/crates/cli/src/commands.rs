use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::ToPrimitive;
use serde::Serialize;

use pzf_core::acceptance::{run_one, CRITERIA};
use pzf_core::bounds::{eta_sequence, phase_thresholds, predict_bounds};
use pzf_core::coupling::{coupled_run_alternative, coupled_run_subset, write_pairs_jsonl, write_verdict_csv, CoupledRun};
use pzf_core::exact::{
    parse_rational, verify_edge_count_domination, verify_lemma_edge_probability, ExactSolver, OracleReport,
};
use pzf_core::forcing::default_max_rounds;
use pzf_core::graph::{check_expansion, write_edge_list, ExpansionParams};
use pzf_core::montecarlo::{
    fit_growth, run_trials_on, sweep, write_manifest, write_summary_csv, ExperimentConfig, GrowthModel, Manifest,
    OutputPaths, StartPolicy, SummaryAccumulator, SummaryRow,
};
use pzf_core::rng::{derive_seed, GRAPH_STREAM};
use pzf_core::{ForcingRule, Graph, GraphSpec, VertexSet};

use crate::args::{Cli, Command, Common, CoupleMode, Family, FitModel, OracleChoice};
use crate::plot::{emit_plot_data, Axes};
use crate::{CliError, EXIT_OK, EXIT_VERIFY_FAILED};

type Out<'a> = &'a mut dyn Write;
type CliResult<T = i32> = Result<T, CliError>;

const DEFAULT_TRIALS: u64 = 100;
const DEFAULT_COUPLED_RUNS: u64 = 1000;
const DEFAULT_OMEGA: f64 = 20.0;

pub(crate) fn dispatch(cli: &Cli, out: Out, err: Out) -> CliResult {
    let c = &cli.common;
    match &cli.command {
        Command::Sample => sample(c, out),
        Command::Exact => exact(c, out),
        Command::Run => run(c, out),
        Command::Sweep { fit } => sweep_cmd(c, *fit, out, err),
        Command::Couple { mode, extra } => couple(c, *mode, extra, out),
        Command::Expansion => expansion(c, out),
        Command::Bounds => bounds(c, out),
        Command::Oracle { kind } => oracle(c, *kind, out),
        Command::Verify { criterion } => verify(c, criterion, out),
        Command::Plotdata { input, x, y } => plotdata(c, input, x, y, out),
    }
}

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn single<'a, T>(values: &'a [T], flag: &str) -> CliResult<Option<&'a T>> {
    match values {
        [] => Ok(None),
        [v] => Ok(Some(v)),
        _ => usage(format!("{flag} takes a single value here")),
    }
}

/// `0.25`, `1e-6`, `1/4` or `n^-0.5`.
fn parse_p(raw: &str, n: usize) -> CliResult<f64> {
    let p = match raw.trim().strip_prefix("n^") {
        Some(exp) => {
            let exp: f64 = exp.parse().map_err(|_| CliError::Usage(format!("bad exponent in --p {raw:?}")))?;
            (n as f64).powf(exp)
        }
        None => match raw.trim().parse::<f64>() {
            Ok(p) => p,
            Err(_) => parse_rational(raw)?.to_f64().unwrap_or(f64::NAN),
        },
    };
    if !(0.0..=1.0).contains(&p) {
        return usage(format!("--p {raw} gives {p}, outside [0, 1]"));
    }
    Ok(p)
}

fn parse_vertices(raw: &str) -> CliResult<Vec<usize>> {
    raw.split(',')
        .map(|v| v.trim().parse().map_err(|_| CliError::Usage(format!("bad vertex {v:?} in --start"))))
        .collect()
}

fn parse_start(raw: &str) -> CliResult<StartPolicy> {
    if matches!(raw.trim(), "min" | "all") {
        return Ok(StartPolicy::AllSingletonsMin);
    }
    let vertices = parse_vertices(raw)?;
    Ok(match vertices.as_slice() {
        [v] => StartPolicy::Vertex { vertex: *v },
        _ => StartPolicy::Set { vertices },
    })
}

fn start_set(c: &Common, n: usize) -> CliResult<VertexSet> {
    let vertices = match &c.start {
        Some(raw) => parse_vertices(raw)?,
        None => vec![0],
    };
    if let Some(&v) = vertices.iter().find(|&&v| v >= n) {
        return Err(pzf_core::Error::VertexOutOfRange { vertex: v, n }.into());
    }
    Ok(VertexSet::from_vertices(n, vertices))
}

fn spec_of(family: Family, n: usize, p: Option<f64>) -> CliResult<GraphSpec> {
    Ok(match family {
        Family::Gnp => match p {
            Some(p) => GraphSpec::Gnp { n, p },
            None => return usage("family gnp needs --p"),
        },
        Family::Path => GraphSpec::Path { n },
        Family::Cycle => GraphSpec::Cycle { n },
        Family::Star => GraphSpec::Star { n },
        Family::Complete => GraphSpec::Complete { n },
    })
}

fn family_of(spec: &GraphSpec) -> Family {
    match spec {
        GraphSpec::Gnp { .. } => Family::Gnp,
        GraphSpec::Path { .. } => Family::Path,
        GraphSpec::Cycle { .. } => Family::Cycle,
        GraphSpec::Star { .. } => Family::Star,
        GraphSpec::Complete { .. } => Family::Complete,
    }
}

/// Graph from the flags, filling gaps from `base`.
fn graph_spec(c: &Common, base: Option<&GraphSpec>) -> CliResult<GraphSpec> {
    let n = match (single(&c.n, "--n")?, base) {
        (Some(&n), _) => n,
        (None, Some(b)) => match b {
            GraphSpec::Star { n } => *n,
            other => other.vertex_count(),
        },
        (None, None) => return usage("missing --n"),
    };
    let p = match single(&c.p, "--p")? {
        Some(raw) => Some(parse_p(raw, n)?),
        None => base.and_then(|b| b.edge_probability()),
    };
    let family = c
        .family
        .or(base.map(family_of))
        .or(p.map(|_| Family::Gnp))
        .ok_or_else(|| CliError::Usage("missing --family (or --p for G(n, p))".into()))?;
    spec_of(family, n, p)
}

fn build_graph(spec: &GraphSpec, seed: u64) -> CliResult<Graph> {
    Ok(spec.build(derive_seed(seed, GRAPH_STREAM))?)
}

fn out_dir(c: &Common) -> CliResult<Option<&Path>> {
    if let Some(dir) = &c.out {
        fs::create_dir_all(dir)?;
    }
    Ok(c.out.as_deref())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Flags over the config file over defaults.
fn experiment(c: &Common, graph: Option<GraphSpec>) -> CliResult<ExperimentConfig> {
    let file: Option<ExperimentConfig> = match &c.config {
        Some(path) => Some(serde_json::from_reader(BufReader::new(File::open(path)?))?),
        None => None,
    };
    let graph_flags = !c.n.is_empty() || !c.p.is_empty() || c.family.is_some();
    let base_graph = file.as_ref().and_then(|f| f.graph);
    let graph = match graph {
        Some(g) => Some(g),
        None if graph_flags || file.as_ref().is_none_or(|f| f.graph_file.is_none()) => {
            Some(graph_spec(c, base_graph.as_ref())?)
        }
        None => base_graph,
    };
    let mut config = file.unwrap_or_else(|| {
        ExperimentConfig::new(GraphSpec::Path { n: 1 }, StartPolicy::default(), DEFAULT_TRIALS, 0)
    });
    if graph.is_some() {
        config.graph = graph;
        config.graph_file = None;
    }
    if let Some(raw) = &c.start {
        config.start = parse_start(raw)?;
    }
    if let Some(d_lower) = c.dlower {
        config.rule = ForcingRule::alternative(d_lower);
    }
    if let Some(t) = c.trials {
        config.trials = t;
    }
    if let Some(s) = c.seed {
        config.master_seed = s;
    }
    config.max_rounds = c.max_rounds.or(config.max_rounds);
    config.workers = c.workers.or(config.workers);
    config.threshold_omega = c.omega.or(config.threshold_omega);
    if let Some(dir) = &c.out {
        config.outputs = OutputPaths {
            records: Some(dir.join("records.jsonl")),
            summary: Some(dir.join("summary.csv")),
            manifest: Some(dir.join("manifest.json")),
        };
    }
    config.validate()?;
    Ok(config)
}

fn create_parent(path: &Path) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(())
}

fn sample(c: &Common, out: Out) -> CliResult {
    let seed = c.seed.unwrap_or(0);
    let spec = graph_spec(c, None)?;
    let start = Instant::now();
    let g = build_graph(&spec, seed)?;
    match out_dir(c)? {
        None => write_edge_list(&g, &mut *out)?,
        Some(dir) => {
            let path = dir.join("graph.edges");
            write_edge_list(&g, BufWriter::new(File::create(&path)?))?;
            let config = ExperimentConfig::new(spec, StartPolicy::default(), 1, seed);
            write_manifest(&Manifest::new(&config, vec![], start.elapsed().as_secs_f64())?, &dir.join("manifest.json"))?;
            writeln!(
                out,
                "{}: n={} m={} min_degree={} max_degree={} connected={} -> {}",
                spec.family(),
                g.n(),
                g.edge_count(),
                g.min_degree(),
                g.max_degree(),
                g.is_connected(),
                path.display()
            )?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ExactOutput {
    family: &'static str,
    n: usize,
    per_vertex: Vec<String>,
    minimum: Option<String>,
    minimizer: Option<usize>,
    start: Option<Vec<usize>>,
    expected: Option<String>,
    table: pzf_core::exact::ExpectationTable,
}

fn exact(c: &Common, out: Out) -> CliResult {
    let spec = graph_spec(c, None)?;
    let g = build_graph(&spec, c.seed.unwrap_or(0))?;
    let mut solver = ExactSolver::new(&g)?;
    let mut result = ExactOutput {
        family: spec.family(),
        n: g.n(),
        per_vertex: vec![],
        minimum: None,
        minimizer: None,
        start: None,
        expected: None,
        table: Default::default(),
    };
    match c.start.as_deref().filter(|s| !matches!(*s, "min" | "all")) {
        Some(_) => {
            let start = start_set(c, g.n())?;
            let e = solver.expected(&start)?;
            writeln!(out, "expected propagation time from {:?}: {} ({:.6})", start.to_vec(), e, e.to_f64().unwrap_or(f64::NAN))?;
            result.start = Some(start.to_vec());
            result.expected = Some(e.to_string());
        }
        None => {
            let mut best: Option<(usize, pzf_core::exact::Rational)> = None;
            for v in 0..g.n() {
                let e = solver.expected(&VertexSet::from_vertices(g.n(), [v]))?;
                writeln!(out, "vertex {v}: {e} ({:.6})", e.to_f64().unwrap_or(f64::NAN))?;
                result.per_vertex.push(e.to_string());
                if best.as_ref().is_none_or(|(_, b)| e < *b) {
                    best = Some((v, e));
                }
            }
            let (v, e) = best.expect("graph has at least one vertex");
            writeln!(out, "minimum: {e} at vertex {v} ({:.6})", e.to_f64().unwrap_or(f64::NAN))?;
            result.minimum = Some(e.to_string());
            result.minimizer = Some(v);
        }
    }
    if let Some(dir) = out_dir(c)? {
        result.table = solver.table();
        write_json(&dir.join("exact.json"), &result)?;
    }
    Ok(EXIT_OK)
}

fn run(c: &Common, out: Out) -> CliResult {
    let config = experiment(c, None)?;
    let started = Instant::now();
    let g = config.load_graph()?;
    let mut records = match &config.outputs.records {
        Some(path) => {
            create_parent(path)?;
            Some(BufWriter::new(File::create(path)?))
        }
        None => None,
    };
    let mut acc = SummaryAccumulator::default();
    run_trials_on(&g, &config, |r| {
        acc.push(&r);
        if let Some(w) = records.as_mut() {
            serde_json::to_writer(&mut *w, &r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    if let Some(mut w) = records {
        w.flush()?;
    }
    let stats = acc.finish();
    let p = config.graph.and_then(|s| s.edge_probability());
    let rows = [SummaryRow::from_stats(g.n(), p, &stats)];
    write_summary_csv(&rows, &mut *out)?;
    if let Some(path) = &config.outputs.summary {
        create_parent(path)?;
        write_summary_csv(&rows, File::create(path)?)?;
    }
    if let Some(path) = &config.outputs.manifest {
        create_parent(path)?;
        let grid = p.map(|p| vec![(g.n(), p)]).unwrap_or_default();
        write_manifest(&Manifest::new(&config, grid, started.elapsed().as_secs_f64())?, path)?;
    }
    Ok(EXIT_OK)
}

fn sweep_cmd(c: &Common, fit: Option<FitModel>, out: Out, err: Out) -> CliResult {
    if c.n.is_empty() || c.p.is_empty() {
        return usage("sweep needs --n and --p lists");
    }
    let mut grid = Vec::new();
    for &n in &c.n {
        for raw in &c.p {
            grid.push((n, parse_p(raw, n)?));
        }
    }
    if fit.is_some() && grid.len() < 3 {
        return usage("--fit needs at least 3 grid cells");
    }
    let (n0, p0) = grid[0];
    let mut template = experiment(c, Some(GraphSpec::Gnp { n: n0, p: p0 }))?;
    template.outputs.records = None;
    let started = Instant::now();
    let rows = sweep(&grid, &template)?;
    let table: Vec<SummaryRow> = rows.iter().map(SummaryRow::from).collect();
    write_summary_csv(&table, &mut *out)?;
    let growth = match fit {
        Some(model) => {
            let model = match model {
                FitModel::LoglogN => GrowthModel::LogLogN,
                FitModel::LogInvP => GrowthModel::LogInvP,
            };
            let f = fit_growth(&rows, model)?;
            writeln!(err, "fit: slope {:.6}, intercept {:.6}, max residual {:.6}", f.slope, f.intercept, f.max_residual)?;
            Some(f)
        }
        None => None,
    };
    if let Some(dir) = out_dir(c)? {
        write_summary_csv(&table, File::create(dir.join("summary.csv"))?)?;
        write_manifest(&Manifest::new(&template, grid, started.elapsed().as_secs_f64())?, &dir.join("manifest.json"))?;
        if let Some(f) = &growth {
            write_json(&dir.join("fit.json"), f)?;
        }
    }
    Ok(EXIT_OK)
}

fn couple(c: &Common, mode: CoupleMode, extra: &[usize], out: Out) -> CliResult {
    let seed = c.seed.unwrap_or(0);
    let spec = graph_spec(c, None)?;
    let started = Instant::now();
    let g = build_graph(&spec, seed)?;
    let n = g.n();
    let start = start_set(c, n)?;
    let runs = c.trials.unwrap_or(DEFAULT_COUPLED_RUNS);
    let rounds = c.max_rounds.unwrap_or_else(|| default_max_rounds(n, spec.edge_probability()));
    let results: Vec<CoupledRun> = match mode {
        CoupleMode::Subset => {
            let mut larger = start.clone();
            if extra.is_empty() {
                match (0..n).find(|&v| !start.contains(v)) {
                    Some(v) => larger.insert(v),
                    None => return usage("start set already covers the graph"),
                };
            }
            for &v in extra {
                if v >= n {
                    return Err(pzf_core::Error::VertexOutOfRange { vertex: v, n }.into());
                }
                larger.insert(v);
            }
            (0..runs)
                .map(|k| coupled_run_subset(&g, &start, &larger, rounds, derive_seed(seed, k)))
                .collect::<Result<_, _>>()?
        }
        CoupleMode::Alternative => {
            let rule = ForcingRule::alternative(c.dlower.unwrap_or(g.min_degree() as f64));
            rule.validate()?;
            (0..runs)
                .map(|k| coupled_run_alternative(&g, &start, &rule, rounds, derive_seed(seed, k)))
                .collect::<Result<_, _>>()?
        }
    };
    let contained = results.iter().filter(|r| r.contained).count();
    let flagged = results.iter().filter(|r| r.validity_violated).count();
    writeln!(out, "containment: {contained}/{runs}")?;
    if mode == CoupleMode::Alternative {
        writeln!(out, "validity violations: {flagged}/{runs}")?;
    }
    if let Some(dir) = out_dir(c)? {
        write_pairs_jsonl(&results, BufWriter::new(File::create(dir.join("pairs.jsonl"))?))?;
        write_verdict_csv(&results, File::create(dir.join("verdict.csv"))?)?;
        let config = ExperimentConfig::new(spec, StartPolicy::Set { vertices: start.to_vec() }, runs.max(1), seed);
        write_manifest(&Manifest::new(&config, vec![], started.elapsed().as_secs_f64())?, &dir.join("manifest.json"))?;
    }
    Ok(EXIT_OK)
}

fn expansion(c: &Common, out: Out) -> CliResult {
    let seed = c.seed.unwrap_or(0);
    let n = *single(&c.n, "--n")?.ok_or_else(|| CliError::Usage("missing --n".into()))?;
    let ln = (n as f64).ln();
    // Default density d = 20 ln n.
    let p = match single(&c.p, "--p")? {
        Some(raw) => parse_p(raw, n)?,
        None => (20.0 * ln / (n as f64 - 1.0)).min(1.0),
    };
    let spec = GraphSpec::Gnp { n, p };
    let started = Instant::now();
    let g = build_graph(&spec, seed)?;
    let d = p * (n as f64 - 1.0);
    let omega = c.omega.unwrap_or(DEFAULT_OMEGA);
    let params = ExpansionParams {
        omega,
        sample_count: c.trials.unwrap_or(100) as usize,
        seed: derive_seed(seed, 1),
        expected_degree: Some(d),
        degree_tolerance: 3.0 * (ln / d).sqrt(),
        set_tolerance: 5.0 / omega.sqrt(),
    };
    let report = check_expansion(&g, &params)?;
    let verdict = |ok: bool| if ok { "ok" } else { "exceeded" };
    writeln!(out, "n={n} d={d:.3} omega={omega}")?;
    writeln!(
        out,
        "degrees: min {} max {}, deviation {:.4} (tolerance {:.4}) {}",
        report.min_degree,
        report.max_degree,
        report.degree_deviation,
        params.degree_tolerance,
        verdict(report.degree_ok)
    )?;
    writeln!(
        out,
        "sets: {} sampled up to size {}, deviation {:.4} (tolerance {:.4}), {} violations {}",
        report.samples.len(),
        report.set_size_cap,
        report.max_set_deviation,
        params.set_tolerance,
        report.set_violations,
        verdict(report.sets_ok)
    )?;
    writeln!(out, "verdict: {}", if report.passed() { "pass" } else { "fail" })?;
    if let Some(dir) = out_dir(c)? {
        write_json(&dir.join("expansion.json"), &report)?;
        let config = ExperimentConfig::new(spec, StartPolicy::default(), params.sample_count.max(1) as u64, seed);
        write_manifest(&Manifest::new(&config, vec![], started.elapsed().as_secs_f64())?, &dir.join("manifest.json"))?;
    }
    Ok(EXIT_OK)
}

fn bounds(c: &Common, out: Out) -> CliResult {
    let dir = out_dir(c)?;
    let mut buffer = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buffer);
        match (c.c1, c.c2) {
            (Some(c1), Some(c2)) => eta_table(c, c1, c2, &mut w)?,
            (None, None) => bound_table(c, &mut w)?,
            _ => return usage("--c1 and --c2 go together"),
        }
        w.flush()?;
    }
    out.write_all(&buffer)?;
    if let Some(dir) = dir {
        fs::write(dir.join("bounds.csv"), &buffer)?;
    }
    Ok(EXIT_OK)
}

fn cell(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        String::new()
    }
}

fn bound_table<W: Write>(c: &Common, w: &mut csv::Writer<W>) -> CliResult<()> {
    let ns: Vec<usize> = if c.n.is_empty() { (1..=6).map(|k| 1usize << (4 * k)).collect() } else { c.n.clone() };
    let ps: Vec<String> = if c.p.is_empty() {
        ["0.5", "0.25", "0.1", "n^-0.3", "n^-0.5"].map(String::from).to_vec()
    } else {
        c.p.clone()
    };
    let mut header = vec!["n", "p", "regime", "upper", "lower", "outside_hypothesis"];
    if c.omega.is_some() {
        header.extend(["t1", "t2", "t3", "t4", "b1", "b2", "b3", "b4"]);
    }
    w.write_record(&header)?;
    for &n in &ns {
        for raw in &ps {
            let p = parse_p(raw, n)?;
            let b = predict_bounds(n, p)?;
            let mut row = vec![
                n.to_string(),
                p.to_string(),
                b.regime.label().to_string(),
                cell(b.upper),
                cell(b.lower),
                b.outside_hypothesis.to_string(),
            ];
            if let Some(omega) = c.omega {
                let t = phase_thresholds(n, p, omega)?;
                row.extend([t.t1, t.t2, t.t3, t.t4, t.b1, t.b2, t.b3, t.b4].map(cell));
            }
            w.write_record(&row)?;
        }
    }
    Ok(())
}

fn eta_table<W: Write>(c: &Common, c1: f64, c2: f64, w: &mut csv::Writer<W>) -> CliResult<()> {
    let ps: Vec<f64> = if c.p.is_empty() {
        vec![1e-3, 1e-6, 1e-9, 1e-12]
    } else {
        let n = single(&c.n, "--n")?.copied().unwrap_or(0);
        c.p.iter().map(|raw| parse_p(raw, n)).collect::<CliResult<_>>()?
    };
    let terms = c.trials.unwrap_or(100) as usize;
    w.write_record(["p", "c1", "c2", "eps", "envelope", "fixed_point", "max_eta", "envelope_holds", "monotone"])?;
    for p in ps {
        let s = eta_sequence(p, c1, c2, terms)?;
        let max_eta = s.values.iter().cloned().fold(0.0, f64::max);
        w.write_record([
            p.to_string(),
            c1.to_string(),
            c2.to_string(),
            cell(s.eps),
            cell(s.envelope),
            s.fixed_point.map(cell).unwrap_or_default(),
            cell(max_eta),
            s.envelope_holds().to_string(),
            s.is_monotone().to_string(),
        ])?;
    }
    Ok(())
}

fn oracle(c: &Common, kind: OracleChoice, out: Out) -> CliResult {
    let n = *single(&c.n, "--n")?.ok_or_else(|| CliError::Usage("missing --n".into()))?;
    let p = parse_rational(single(&c.p, "--p")?.ok_or_else(|| CliError::Usage("missing --p".into()))?)?;
    let raw_start = c.start.as_deref().ok_or_else(|| CliError::Usage("missing --start (the blue set Y0)".into()))?;
    let y0_vertices = parse_vertices(raw_start)?;
    if let Some(&v) = y0_vertices.iter().find(|&&v| v >= n) {
        return Err(pzf_core::Error::VertexOutOfRange { vertex: v, n }.into());
    }
    let y0 = VertexSet::from_vertices(n, y0_vertices);
    let d_lower = parse_rational(&c.dlower.unwrap_or(2.0).to_string())?;
    let report: OracleReport = match kind {
        OracleChoice::Edge => verify_lemma_edge_probability(n, &p, &y0, &d_lower)?,
        OracleChoice::Domination => verify_edge_count_domination(n, &p, &y0, &d_lower)?,
    };
    writeln!(out, "events: {}, checks: {}", report.events, report.checks)?;
    match kind {
        OracleChoice::Edge => writeln!(out, "max conditional edge probability: {} (bound {})", report.extreme, report.bound)?,
        OracleChoice::Domination => writeln!(out, "min tail gap: {} (bound {})", report.extreme, report.bound)?,
    }
    if let Some(q) = report.quotient_form_matches {
        writeln!(out, "quotient form matches: {q}")?;
    }
    if let Some(q) = report.product_form_matches {
        writeln!(out, "product form matches: {q}")?;
    }
    writeln!(out, "holds: {}", report.holds)?;
    if let Some(dir) = out_dir(c)? {
        write_json(&dir.join("oracle.json"), &report)?;
    }
    Ok(EXIT_OK)
}

fn verify(c: &Common, criteria: &[u8], out: Out) -> CliResult {
    let seed = c.seed.ok_or_else(|| CliError::Usage("verify needs an explicit --seed".into()))?;
    let ids: Vec<u8> = if criteria.is_empty() { CRITERIA.iter().map(|(id, _)| *id).collect() } else { criteria.to_vec() };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|(k, _)| k == *id)) {
        return usage(format!("no criterion {bad}; expected 1 to {}", CRITERIA.len()));
    }
    let mut outcomes = Vec::new();
    for id in ids {
        let outcome = run_one(id, seed);
        writeln!(out, "{outcome}")?;
        out.flush()?;
        outcomes.push(outcome);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    writeln!(out, "verify: {passed}/{} passed", outcomes.len())?;
    if let Some(dir) = out_dir(c)? {
        write_json(&dir.join("verify.json"), &outcomes)?;
    }
    Ok(if passed == outcomes.len() { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn plotdata(c: &Common, input: &PathBuf, x: &str, y: &str, out: Out) -> CliResult {
    let axes = Axes { x: x.parse()?, y: y.parse()? };
    let rows: Vec<SummaryRow> = csv::Reader::from_path(input)?.deserialize().collect::<Result<_, _>>()?;
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let files = emit_plot_data(&rows, axes, &dir)?;
    writeln!(out, "wrote {} rows to {} and {}", files.rows, files.data.display(), files.script.display())?;
    Ok(EXIT_OK)
}
