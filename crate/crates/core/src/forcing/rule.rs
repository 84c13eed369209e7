use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rounds on which an alternative rule replaces the standard one. Round index `i` is
/// the step taken from the state reached after `i` completed rounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveRounds {
    All,
    Never,
    Only(BTreeSet<u32>),
}

impl ActiveRounds {
    pub fn contains(&self, round: u32) -> bool {
        match self {
            ActiveRounds::All => true,
            ActiveRounds::Never => false,
            ActiveRounds::Only(set) => set.contains(&round),
        }
    }
}

/// Per-edge forcing probability used by a blue vertex `u` with `c = |N[u] ∩ Z|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForcingRule {
    /// `c / deg(u)`.
    #[default]
    Standard,
    /// `min(c / d_lower, 1)` on active rounds, standard otherwise.
    Alternative { d_lower: f64, active_rounds: ActiveRounds },
}

impl ForcingRule {
    pub fn alternative(d_lower: f64) -> Self {
        ForcingRule::Alternative { d_lower, active_rounds: ActiveRounds::All }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ForcingRule::Standard => Ok(()),
            ForcingRule::Alternative { d_lower, .. } => {
                if d_lower.is_finite() && *d_lower > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("d_lower must be positive, got {d_lower}")))
                }
            }
        }
    }

    /// The alternative divisor when it applies on `round`.
    #[inline]
    pub fn active_divisor(&self, round: u32) -> Option<f64> {
        match self {
            ForcingRule::Alternative { d_lower, active_rounds } if active_rounds.contains(round) => {
                Some(*d_lower)
            }
            _ => None,
        }
    }

    #[inline]
    pub fn probability(&self, closed_blue: usize, degree: usize, round: u32) -> f64 {
        match self.active_divisor(round) {
            Some(d_lower) => (closed_blue as f64 / d_lower).min(1.0),
            None => closed_blue as f64 / degree as f64,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ForcingRule::Standard => "standard".into(),
            ForcingRule::Alternative { d_lower, .. } => format!("alternative(d_lower={d_lower})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities() {
        let std = ForcingRule::Standard;
        assert_eq!(std.probability(1, 2, 0), 0.5);
        let alt = ForcingRule::alternative(4.0);
        assert_eq!(alt.probability(1, 2, 0), 0.25);
        assert_eq!(alt.probability(6, 8, 3), 1.0);
        let never = ForcingRule::Alternative { d_lower: 4.0, active_rounds: ActiveRounds::Never };
        assert_eq!(never.probability(1, 2, 0), 0.5);
        let only = ForcingRule::Alternative {
            d_lower: 4.0,
            active_rounds: ActiveRounds::Only([1].into()),
        };
        assert_eq!(only.probability(1, 2, 0), 0.5);
        assert_eq!(only.probability(1, 2, 1), 0.25);
    }

    #[test]
    fn rejects_nonpositive_divisor() {
        assert!(ForcingRule::alternative(0.0).validate().is_err());
        assert!(ForcingRule::alternative(f64::NAN).validate().is_err());
        assert!(ForcingRule::Standard.validate().is_ok());
    }

    #[test]
    fn serde_shape() {
        let s = serde_json::to_string(&ForcingRule::alternative(2.5)).unwrap();
        assert_eq!(s, r#"{"kind":"alternative","d_lower":2.5,"active_rounds":"all"}"#);
        let back: ForcingRule = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ForcingRule::alternative(2.5));
    }
}
