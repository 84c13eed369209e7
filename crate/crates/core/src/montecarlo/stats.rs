use serde::{Deserialize, Serialize};

use crate::forcing::TrialRecord;

/// Propagation-time statistics over forced records; cap hits are only counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub records: usize,
    /// Records that reached the all-blue state.
    pub count: usize,
    pub cap_hits: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation over `√count`; undefined below two records.
    pub std_error: Option<f64>,
    pub median: Option<f64>,
    pub q10: Option<f64>,
    pub q90: Option<f64>,
    pub min: Option<u32>,
    pub max: Option<u32>,
    /// No record was forced.
    pub empty: bool,
}

/// Collects propagation times; merging accumulators then finishing equals
/// summarising the concatenated records.
#[derive(Debug, Clone, Default)]
pub struct SummaryAccumulator {
    pts: Vec<u32>,
    cap_hits: usize,
}

impl SummaryAccumulator {
    pub fn push(&mut self, record: &TrialRecord) {
        match record.pt {
            Some(pt) if record.is_forced() => self.pts.push(pt),
            _ => self.cap_hits += 1,
        }
    }

    pub fn merge(&mut self, other: SummaryAccumulator) {
        self.pts.extend(other.pts);
        self.cap_hits += other.cap_hits;
    }

    pub fn finish(mut self) -> SummaryStats {
        self.pts.sort_unstable();
        let pts = &self.pts;
        let count = pts.len();
        let records = count + self.cap_hits;
        if count == 0 {
            return SummaryStats {
                records,
                count,
                cap_hits: self.cap_hits,
                mean: None,
                std_error: None,
                median: None,
                q10: None,
                q90: None,
                min: None,
                max: None,
                empty: true,
            };
        }
        // Integer sums keep the result independent of accumulation order.
        let sum: u128 = pts.iter().map(|&x| x as u128).sum();
        let sum_sq: u128 = pts.iter().map(|&x| (x as u128) * (x as u128)).sum();
        let nf = count as f64;
        let mean = sum as f64 / nf;
        let std_error = (count >= 2).then(|| {
            let c = count as u128;
            let ss = (c * sum_sq - sum * sum) as f64 / (nf * (nf - 1.0));
            (ss / nf).sqrt()
        });
        SummaryStats {
            records,
            count,
            cap_hits: self.cap_hits,
            mean: Some(mean),
            std_error,
            median: Some(quantile(pts, 0.5)),
            q10: Some(quantile(pts, 0.1)),
            q90: Some(quantile(pts, 0.9)),
            min: pts.first().copied(),
            max: pts.last().copied(),
            empty: false,
        }
    }
}

/// Linear interpolation between closest ranks of sorted data.
fn quantile(sorted: &[u32], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] as f64 + (h - lo as f64) * (sorted[hi] as f64 - sorted[lo] as f64)
}

pub fn summarize<'a>(records: impl IntoIterator<Item = &'a TrialRecord>) -> SummaryStats {
    let mut acc = SummaryAccumulator::default();
    for r in records {
        acc.push(r);
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::{ForcingRule, TrialStatus};
    use crate::vertex_set::VertexSet;

    pub(crate) fn record(pt: Option<u32>) -> TrialRecord {
        TrialRecord {
            seed: 0,
            trial: 0,
            n: 3,
            p: None,
            family: "path".into(),
            start: VertexSet::from_vertices(3, [0]),
            rule: ForcingRule::Standard,
            status: if pt.is_some() { TrialStatus::Forced } else { TrialStatus::RoundCapReached },
            pt,
            b_trajectory: vec![1],
            e_blue_trajectory: None,
            crossings: Default::default(),
            layer_degree_trajectory: None,
            coupling_violation: false,
        }
    }

    #[test]
    fn simple_statistics() {
        let recs: Vec<_> = [1, 2, 3].map(|x| record(Some(x))).into();
        let s = summarize(&recs);
        assert_eq!((s.mean, s.median, s.min, s.max), (Some(2.0), Some(2.0), Some(1), Some(3)));
        assert_eq!(s.std_error, Some((1.0f64 / 3.0).sqrt()));
        let s = summarize(&[record(Some(5))]);
        assert_eq!(s.mean, Some(5.0));
        assert_eq!(s.std_error, None);
    }

    #[test]
    fn cap_hits_counted_not_averaged() {
        let recs = vec![record(Some(4)), record(None), record(Some(6))];
        let s = summarize(&recs);
        assert_eq!((s.records, s.count, s.cap_hits), (3, 2, 1));
        assert_eq!(s.mean, Some(5.0));
        let s = summarize(&[record(None)]);
        assert!(s.empty);
        assert_eq!(s.median, None);
    }

    #[test]
    fn interpolated_quantiles() {
        let recs: Vec<_> = (1..=10).map(|x| record(Some(x))).collect();
        let s = summarize(&recs);
        assert_eq!(s.median, Some(5.5));
        assert!((s.q10.unwrap() - 1.9).abs() < 1e-12);
        assert!((s.q90.unwrap() - 9.1).abs() < 1e-12);
    }
}
