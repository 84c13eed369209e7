//! Closed-form bound predictors and run diagnostics for `G(n, p)`.
//!
//! Every `o(1)` and implicit constant is dropped: these are the bare formulas. Iterated
//! logarithms in the phase thresholds are natural; base 2 is used only for `log₂log₂n`.

mod audit;

pub use audit::{audit_rounds, AuditParams, Check, RoundAudit, RoundFlags};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest `n` for which every iterated logarithm used here is positive.
pub const MIN_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `p ≥ 1/ln²n`: the `log₂log₂n` term dominates the lower bound.
    Dense,
    Sparse,
}

impl Regime {
    pub fn of(n: usize, p: f64) -> Self {
        let ln = (n as f64).ln();
        if p >= 1.0 / (ln * ln) {
            Regime::Dense
        } else {
            Regime::Sparse
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::Dense => "dense",
            Regime::Sparse => "sparse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPrediction {
    pub n: usize,
    pub p: f64,
    /// `log₂log₂n + log₃(1/p)`.
    pub upper: f64,
    /// `max(log₂log₂n, log₄(1/p))`.
    pub lower: f64,
    pub regime: Regime,
    /// `pn ≤ ln n`: outside the range where the bounds are claimed.
    pub outside_hypothesis: bool,
}

fn check_n(n: usize) -> Result<()> {
    if n < MIN_N {
        return Err(Error::InvalidParameter(format!("n must be at least {MIN_N}, got {n}")));
    }
    Ok(())
}

fn check_open_probability(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

pub fn log2log2(n: usize) -> f64 {
    (n as f64).log2().log2()
}

/// Predicted upper and lower propagation times. `p = 1` is accepted (both logs of
/// `1/p` vanish).
pub fn predict_bounds(n: usize, p: f64) -> Result<BoundPrediction> {
    check_n(n)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let loglog = log2log2(n);
    let inv = (1.0 / p).ln();
    let upper = loglog + inv / 3f64.ln();
    let lower = loglog.max(inv / 4f64.ln());
    debug_assert!(lower <= upper);
    Ok(BoundPrediction {
        n,
        p,
        upper,
        lower,
        regime: Regime::of(n, p),
        outside_hypothesis: p * n as f64 <= (n as f64).ln(),
    })
}

/// `2·exp(−ε²μ/3)`, a two-sided binomial tail bound. Not clamped to 1.
pub fn chernoff_tail(eps: f64, mean: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.5) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 3/2), got {eps}")));
    }
    if !(mean >= 0.0) {
        return Err(Error::InvalidParameter(format!("mean must be nonnegative, got {mean}")));
    }
    Ok((2.0 * (-eps * eps * mean / 3.0).exp()).clamp(0.0, 2.0))
}

/// Blue-count targets and round budgets of the four-phase upper-bound argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseThresholds {
    pub n: usize,
    pub p: f64,
    pub omega: f64,
    /// `d = p(n − 1)`.
    pub d: f64,
    /// `A = 3(1 − ω^{−1/4})`, the per-round growth factor of phase 2.
    pub growth: f64,
    pub t1: f64,
    /// Infinite (serialised as `null`) when `A ≤ 1`; 0 when phase 2 does not occur.
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    /// `t := b₃·p` in the phase-4 growth estimate `t^{2^{i−1}} p^{−1} 8^{2−2^i}`.
    pub phase4_t: f64,
    /// `b₁ < b₂`.
    pub has_phase2: bool,
    /// `b₁ < b₃`.
    pub has_phase3: bool,
}

impl PhaseThresholds {
    /// `(name, value)` pairs suitable for crossing-round recording.
    pub fn named(&self) -> Vec<(String, f64)> {
        [("b1", self.b1), ("b2", self.b2), ("b3", self.b3), ("b4", self.b4)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }
}

pub fn phase_thresholds(n: usize, p: f64, omega: f64) -> Result<PhaseThresholds> {
    check_n(n)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    if !(omega > 1.0) || !omega.is_finite() {
        return Err(Error::InvalidParameter(format!("omega must exceed 1, got {omega}")));
    }
    let nf = n as f64;
    let d = p * (nf - 1.0);
    let l2 = nf.ln().ln();
    let l3 = l2.ln();
    let t1 = l2 / l3;
    let b1 = t1 * (1.0 - l3 / l2);
    let b2 = nf / (d * omega);
    let growth = 3.0 * (1.0 - omega.powf(-0.25));
    let t2 = if b2 <= b1 {
        0.0
    } else if growth <= 1.0 {
        f64::INFINITY
    } else {
        (b2 / b1).ln() / growth.ln()
    };
    let b3 = nf * l2 / (d * l3 * l3);
    Ok(PhaseThresholds {
        n,
        p,
        omega,
        d,
        growth,
        t1,
        t2,
        t3: t1,
        t4: log2log2(n),
        b1,
        b2,
        b3,
        b4: (nf / (p * omega)).sqrt(),
        phase4_t: b3 * p,
        has_phase2: b1 < b2,
        has_phase3: b1 < b3,
    })
}

/// The error sequence `η₀ = 0`, `η_{j+1} = (3/4 + ε/2)η_j + 3ε/2 + 6r` with
/// `ε = p^{c₁/3}` and `r = p^{(1−c₂)/2}`, checked against `η_j ≤ 3ε + 12r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaSequence {
    pub p: f64,
    pub c1: f64,
    pub c2: f64,
    pub eps: f64,
    /// `p^{(1−c₂)/2}`.
    pub r: f64,
    /// `3ε + 12r`.
    pub envelope: f64,
    pub values: Vec<f64>,
    /// `(3ε/2 + 6r)/(1/4 − ε/2)` when `ε < 1/2`.
    pub fixed_point: Option<f64>,
    /// Indices `j` with `η_j > envelope`.
    pub envelope_violations: Vec<usize>,
}

impl EtaSequence {
    pub fn envelope_holds(&self) -> bool {
        self.envelope_violations.is_empty()
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn next(&self, eta: f64) -> f64 {
        (0.75 + self.eps / 2.0) * eta + 1.5 * self.eps + 6.0 * self.r
    }

    /// Iterates from `η₀` until successive terms differ by at most `tol`; returns the
    /// index and value reached, or `None` after `max_steps`.
    pub fn converge(&self, tol: f64, max_steps: usize) -> Option<(usize, f64)> {
        let mut eta = 0.0;
        for j in 1..=max_steps {
            let next = self.next(eta);
            if (next - eta).abs() <= tol {
                return Some((j, next));
            }
            eta = next;
        }
        None
    }
}

/// `η₀ ..= η_count`.
pub fn eta_sequence(p: f64, c1: f64, c2: f64, count: usize) -> Result<EtaSequence> {
    check_open_probability(p)?;
    if !(0.0 < c1 && c1 < c2 && c2 < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < c1 < c2 < 1, got c1={c1}, c2={c2}")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let eps = p.powf(c1 / 3.0);
    let r = p.powf((1.0 - c2) / 2.0);
    let envelope = 3.0 * eps + 12.0 * r;
    let mut seq = EtaSequence {
        p,
        c1,
        c2,
        eps,
        r,
        envelope,
        values: Vec::with_capacity(count + 1),
        fixed_point: (eps < 0.5).then(|| (1.5 * eps + 6.0 * r) / (0.25 - eps / 2.0)),
        envelope_violations: Vec::new(),
    };
    let mut eta = 0.0;
    for j in 0..=count {
        if j > 0 {
            eta = seq.next(eta);
        }
        seq.values.push(eta);
        if eta > envelope {
            seq.envelope_violations.push(j);
        }
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_examples() {
        let b = predict_bounds(1 << 16, 0.5).unwrap();
        assert!((b.upper - (4.0 + 2f64.ln() / 3f64.ln())).abs() < 1e-12);
        assert!((b.upper - 4.6309).abs() < 1e-4);
        assert_eq!(b.lower, 4.0);
        assert_eq!(b.regime, Regime::Dense);
        let b = predict_bounds(1 << 16, 1.0).unwrap();
        assert_eq!((b.upper, b.lower), (4.0, 4.0));
        let b = predict_bounds(1 << 20, 4f64.powi(-10)).unwrap();
        assert!(b.lower >= 10.0 - 1e-12);
        assert!(b.outside_hypothesis);
        assert_eq!(b.regime, Regime::Sparse);
        assert!(predict_bounds(15, 0.5).is_err());
        assert!(predict_bounds(100, 0.0).is_err());
    }

    #[test]
    fn chernoff_examples() {
        assert_eq!(chernoff_tail(1.0, 0.0).unwrap(), 2.0);
        assert!((chernoff_tail(1.0, 3.0).unwrap() - 2.0 * (-1f64).exp()).abs() < 1e-12);
        assert!(chernoff_tail(1.0, 3.0 * (2e6f64).ln()).unwrap() <= 1e-6 * (1.0 + 1e-9));
        assert!(chernoff_tail(0.0, 1.0).is_err());
        assert!(chernoff_tail(1.5, 1.0).is_err());
        assert!(chernoff_tail(1.0, -1.0).is_err());
    }

    #[test]
    fn phase_examples() {
        let t = phase_thresholds(1_000_000, 0.5, 10.0).unwrap();
        assert!((t.t1 - 2.7203).abs() / 2.7203 < 1e-3, "{}", t.t1);
        assert!((t.b4 - 447.2).abs() < 0.05);
        assert_eq!(t.b2, 1_000_000.0 / (0.5 * 999_999.0 * 10.0));
        assert_eq!(t.t2, 0.0);
        assert!(!t.has_phase2);
        assert_eq!(t.t3, t.t1);
        assert!((t.t4 - log2log2(1_000_000)).abs() < 1e-12);
        assert_eq!(t.named().len(), 4);
        assert!(phase_thresholds(1000, 0.5, 1.0).is_err());
        assert!(phase_thresholds(8, 0.5, 10.0).is_err());
    }

    #[test]
    fn slow_growth_makes_phase_two_unbounded() {
        let t = phase_thresholds(1_000_000, 1e-4, 2.0).unwrap();
        assert!(t.has_phase2);
        assert!(t.t2.is_infinite());
        let json = serde_json::to_value(t).unwrap();
        assert!(json["t2"].is_null());
        let t = phase_thresholds(1_000_000, 1e-4, 100.0).unwrap();
        assert!(t.t2 > 0.0 && t.t2.is_finite());
    }

    #[test]
    fn eta_example() {
        let s = eta_sequence(0.01, 0.3, 0.5, 100).unwrap();
        assert_eq!(s.values[0], 0.0);
        assert!((s.eps - 0.01f64.powf(0.1)).abs() < 1e-12);
        assert!((s.eps - 0.63096).abs() < 1e-5);
        assert!((s.envelope - 5.687).abs() < 1e-3);
        assert!(s.fixed_point.is_none());
        assert!(s.is_monotone());
    }

    #[test]
    fn eta_fixed_point() {
        let s = eta_sequence(1e-12, 0.3, 0.5, 200).unwrap();
        let fp = s.fixed_point.unwrap();
        assert!(s.values.iter().all(|&v| v <= fp + 1e-15));
        let (_, limit) = s.converge(1e-14, 10_000).unwrap();
        assert!((limit - fp).abs() < 1e-12);
        assert!(eta_sequence(0.5, 0.5, 0.3, 10).is_err());
        assert!(eta_sequence(0.5, 0.1, 0.3, 0).is_err());
    }
}
