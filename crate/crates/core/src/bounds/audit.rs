use serde::{Deserialize, Serialize};

use super::{eta_sequence, Regime};
use crate::error::{Error, Result};
use crate::forcing::TrialRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum AuditParams {
    Dense,
    Sparse { c1: f64, c2: f64 },
}

impl AuditParams {
    pub fn regime(&self) -> Regime {
        match self {
            AuditParams::Dense => Regime::Dense,
            AuditParams::Sparse { .. } => Regime::Sparse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Pass,
    Fail,
    Unaudited,
}

impl Check {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Check::Pass
        } else {
            Check::Fail
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundFlags {
    pub round: u32,
    pub p1: Check,
    pub p2: Check,
    /// No audited property failed.
    pub good: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundAudit {
    pub regime: Regime,
    pub rounds: Vec<RoundFlags>,
    pub first_bad: Option<u32>,
}

impl RoundAudit {
    pub fn bad_fraction(&self, first: usize) -> f64 {
        let considered = &self.rounds[..first.min(self.rounds.len())];
        if considered.is_empty() {
            return 0.0;
        }
        considered.iter().filter(|r| !r.good).count() as f64 / considered.len() as f64
    }
}

/// Per-round good-round flags for a recorded run.
///
/// Dense: round `i` needs `y_i ≤ 3b_{i−1}²` and, when the run recorded the newest-layer
/// degree, `max_{v ∉ Y_{≤i−1}} deg_{Y_{i−1}}(v) ≤ 2p·y_{i−1}`.
/// Sparse: round `j` needs `y_j ≤ (3 + η_{j−1})(1 + ε)b_{j−1}` and
/// `2e(Y_{≤j})/b_j ≤ 2 + η_j`.
pub fn audit_rounds(record: &TrialRecord, p: f64, params: &AuditParams) -> Result<RoundAudit> {
    let b = &record.b_trajectory;
    if b.is_empty() {
        return Err(Error::MissingTrajectory("b_trajectory"));
    }
    let rounds = b.len() - 1;
    let y = |i: usize| if i == 0 { b[0] } else { b[i] - b[i - 1] } as f64;
    let mut flags = Vec::with_capacity(rounds);
    match *params {
        AuditParams::Dense => {
            let layer = record.layer_degree_trajectory.as_deref();
            for i in 1..=rounds {
                let prev = b[i - 1] as f64;
                let p2 = Check::from_bool(y(i) <= 3.0 * prev * prev);
                let p1 = match layer {
                    Some(l) => Check::from_bool(l[i - 1] as f64 <= 2.0 * p * y(i - 1)),
                    None => Check::Unaudited,
                };
                flags.push(RoundFlags { round: i as u32, p1, p2, good: p1 != Check::Fail && p2 != Check::Fail });
            }
        }
        AuditParams::Sparse { c1, c2 } => {
            let e = record
                .e_blue_trajectory
                .as_deref()
                .ok_or(Error::MissingTrajectory("e_blue_trajectory"))?;
            let eta = eta_sequence(p, c1, c2, rounds.max(1))?;
            for j in 1..=rounds {
                let p1 = Check::from_bool(y(j) <= (3.0 + eta.values[j - 1]) * (1.0 + eta.eps) * b[j - 1] as f64);
                let avg = 2.0 * e[j] as f64 / b[j] as f64;
                let p2 = Check::from_bool(avg <= 2.0 + eta.values[j]);
                flags.push(RoundFlags { round: j as u32, p1, p2, good: p1 == Check::Pass && p2 == Check::Pass });
            }
        }
    }
    let first_bad = flags.iter().find(|f| !f.good).map(|f| f.round);
    Ok(RoundAudit { regime: params.regime(), rounds: flags, first_bad })
}
