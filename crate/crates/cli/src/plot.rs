//! Two-column projections of summary tables, with a gnuplot script to draw them.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pzf_core::bounds::log2log2;
use pzf_core::montecarlo::SummaryRow;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    N,
    P,
    LoglogN,
    LogInvP,
    Mean,
    Median,
    Q10,
    Q90,
    Min,
    Max,
    StdError,
    Upper,
    Lower,
}

const AXES: [(&str, Axis); 13] = [
    ("n", Axis::N),
    ("p", Axis::P),
    ("loglog_n", Axis::LoglogN),
    ("log_inv_p", Axis::LogInvP),
    ("mean", Axis::Mean),
    ("median", Axis::Median),
    ("q10", Axis::Q10),
    ("q90", Axis::Q90),
    ("min", Axis::Min),
    ("max", Axis::Max),
    ("std_error", Axis::StdError),
    ("upper", Axis::Upper),
    ("lower", Axis::Lower),
];

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AXES.iter().find(|(name, _)| *name == s).map(|(_, a)| *a).ok_or_else(|| {
            let known: Vec<_> = AXES.iter().map(|(name, _)| *name).collect();
            CliError::Usage(format!("unknown axis {s:?}; expected one of {}", known.join(", ")))
        })
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = AXES.iter().find(|(_, a)| a == self).map(|(name, _)| *name).unwrap_or("?");
        f.write_str(name)
    }
}

impl Axis {
    /// Value of this axis for a row; `None` when the row lacks it.
    pub fn value(self, row: &SummaryRow) -> Option<f64> {
        let v = match self {
            Axis::N => Some(row.n as f64),
            Axis::P => row.p,
            Axis::LoglogN => (row.n >= 4).then(|| log2log2(row.n)),
            Axis::LogInvP => row.p.filter(|&p| p > 0.0).map(|p| (1.0 / p).ln()),
            Axis::Mean => row.mean,
            Axis::Median => row.median,
            Axis::Q10 => row.q10,
            Axis::Q90 => row.q90,
            Axis::Min => row.min.map(f64::from),
            Axis::Max => row.max.map(f64::from),
            Axis::StdError => row.std_error,
            Axis::Upper => row.upper,
            Axis::Lower => row.lower,
        };
        v.filter(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Axes {
    pub x: Axis,
    pub y: Axis,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotFiles {
    pub data: PathBuf,
    pub script: PathBuf,
    pub rows: usize,
}

/// Writes `<y>_vs_<x>.csv` (columns `x,y`, rows lacking either value dropped, sorted by
/// x) and a matching `.gp` script into `dir`. Nothing is written if no row survives.
pub fn emit_plot_data(table: &[SummaryRow], axes: Axes, dir: &Path) -> Result<PlotFiles, CliError> {
    let mut points: Vec<(f64, f64)> =
        table.iter().filter_map(|r| Some((axes.x.value(r)?, axes.y.value(r)?))).collect();
    if points.is_empty() {
        return Err(CliError::Usage(format!("no rows with both {} and {} values", axes.x, axes.y)));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));

    fs::create_dir_all(dir)?;
    let stem = format!("{}_vs_{}", axes.y, axes.x);
    let data = dir.join(format!("{stem}.csv"));
    let script = dir.join(format!("{stem}.gp"));

    let mut w = csv::Writer::from_path(&data)?;
    w.write_record(["x", "y"])?;
    for (x, y) in &points {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;

    let gp = format!(
        "set datafile separator ','\n\
         set key off\n\
         set xlabel '{x}'\n\
         set ylabel '{y}'\n\
         plot '{stem}.csv' using 1:2 skip 1 with linespoints\n",
        x = axes.x,
        y = axes.y,
    );
    fs::write(&script, gp)?;
    Ok(PlotFiles { data, script, rows: points.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_names_round_trip() {
        for (name, axis) in AXES {
            assert_eq!(name.parse::<Axis>().unwrap(), axis);
            assert_eq!(axis.to_string(), name);
        }
        assert!("log_n".parse::<Axis>().is_err());
    }
}
