use serde::{Deserialize, Serialize};

use super::{run_trials_on, ExperimentConfig, SummaryAccumulator, SummaryStats};
use crate::bounds::{log2log2, predict_bounds, BoundPrediction};
use crate::error::{Error, Result};
use crate::graph::GraphSpec;

/// One `(n, p)` cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub p: f64,
    pub stats: Option<SummaryStats>,
    pub bounds: Option<BoundPrediction>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn median(&self) -> Option<f64> {
        self.stats.as_ref().and_then(|s| s.median)
    }
}

/// Runs the template on `G(n, p)` for every grid cell. The template's master seed is
/// reused per cell; a failing cell is recorded and the sweep continues.
pub fn sweep(grid: &[(usize, f64)], template: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("sweep grid is empty".into()));
    }
    Ok(grid
        .iter()
        .map(|&(n, p)| {
            let mut config = template.clone();
            config.graph = Some(GraphSpec::Gnp { n, p });
            config.graph_file = None;
            let stats = config.load_graph().and_then(|g| {
                let mut acc = SummaryAccumulator::default();
                run_trials_on(&g, &config, |r| {
                    acc.push(&r);
                    Ok(())
                })?;
                Ok(acc.finish())
            });
            let (stats, error) = match stats {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepRow { n, p, stats, bounds: predict_bounds(n, p).ok(), error }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModel {
    /// Regressor `log₂log₂n`.
    LogLogN,
    /// Regressor `ln(1/p)`.
    LogInvP,
}

impl GrowthModel {
    pub fn regressor(self, n: usize, p: f64) -> f64 {
        match self {
            GrowthModel::LogLogN => log2log2(n),
            GrowthModel::LogInvP => (1.0 / p).ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub model: GrowthModel,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::TooFewRows { need: 2, got: xs.len().min(ys.len()) });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) {
        return Err(Error::DegenerateRegressor);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fits the median propagation time of each row against the model's regressor. Rows
/// without a median are skipped.
pub fn fit_growth(rows: &[SweepRow], model: GrowthModel) -> Result<GrowthFit> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.median().map(|m| (model.regressor(r.n, r.p), m)))
        .collect();
    if points.len() < 3 {
        return Err(Error::TooFewRows { need: 3, got: points.len() });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    let (slope, intercept) = fit_line(&xs, &ys)?;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - (slope * x + intercept)).collect();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(GrowthFit { model, slope, intercept, residuals, max_residual })
}

#[cfg(test)]
fn summarize_cell(n: usize, p: f64, template: &ExperimentConfig) -> Result<SummaryStats> {
    let mut config = template.clone();
    config.graph = Some(GraphSpec::Gnp { n, p });
    Ok(super::summarize(&super::run_trials(&config)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::StartPolicy;

    fn row(n: usize, p: f64, median: f64) -> SweepRow {
        let mut stats = crate::montecarlo::summarize(std::iter::empty());
        stats.median = Some(median);
        SweepRow { n, p, stats: Some(stats), bounds: None, error: None }
    }

    #[test]
    fn exact_loglog_fit() {
        let rows: Vec<_> = [1usize << 4, 1 << 8, 1 << 16].iter().map(|&n| row(n, 0.5, log2log2(n))).collect();
        let f = fit_growth(&rows, GrowthModel::LogLogN).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!(f.intercept.abs() < 1e-12);
        assert!(f.max_residual < 1e-12);
    }

    #[test]
    fn log_inverse_p_fit() {
        let rows: Vec<_> = [0.1, 0.01, 0.001]
            .iter()
            .map(|&p: &f64| row(1000, p, 2.0 * (1.0 / p).ln() / 4f64.ln() + 1.0))
            .collect();
        let f = fit_growth(&rows, GrowthModel::LogInvP).unwrap();
        assert!((f.slope - 2.0 / 4f64.ln()).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        let rows = vec![row(100, 0.5, 1.0), row(100, 0.5, 2.0), row(100, 0.5, 3.0)];
        assert!(matches!(fit_growth(&rows, GrowthModel::LogLogN), Err(Error::DegenerateRegressor)));
        assert!(matches!(fit_growth(&rows[..2], GrowthModel::LogLogN), Err(Error::TooFewRows { .. })));
    }

    #[test]
    fn one_cell_matches_direct_run() {
        let template = ExperimentConfig::new(GraphSpec::Path { n: 2 }, StartPolicy::Vertex { vertex: 0 }, 30, 5);
        let rows = sweep(&[(200, 0.1)], &template).unwrap();
        assert_eq!(rows[0].stats.as_ref(), Some(&super::summarize_cell(200, 0.1, &template).unwrap()));
        assert!(rows[0].bounds.is_some());
    }

    #[test]
    fn failing_cell_does_not_stop_sweep() {
        let template = ExperimentConfig::new(GraphSpec::Path { n: 2 }, StartPolicy::Vertex { vertex: 50 }, 5, 5);
        let rows = sweep(&[(20, 0.5), (100, 0.5)], &template).unwrap();
        assert!(rows[0].error.is_some() && rows[0].stats.is_none());
        assert!(rows[1].error.is_none() && rows[1].stats.is_some());
        assert!(sweep(&[], &template).is_err());
    }
}
