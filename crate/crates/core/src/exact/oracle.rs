use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{mask_vertices, rational_string, Rational};
use crate::error::{Error, Result};
use crate::vertex_set::VertexSet;

pub const EDGE_PROBABILITY_CAP: usize = 6;
pub const DOMINATION_CAP: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    EdgeProbability,
    EdgeCountDomination,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(r))
}

/// Exact conditional probability of one cross pair given one conditioning event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalEntry {
    /// Edges present inside the start set.
    pub edges_within: Vec<(usize, usize)>,
    /// Source and the vertices it forced.
    pub forced: Vec<(usize, Vec<usize>)>,
    pub u: usize,
    pub v: usize,
    #[serde(serialize_with = "ser_rational")]
    pub event_probability: Rational,
    /// Per-edge force probability `min(deg_{Y0}[u] / d_lower, 1)`.
    #[serde(serialize_with = "ser_rational")]
    pub force_probability: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub conditional: Rational,
    /// `p(1 − a) / (1 − p a)`.
    #[serde(serialize_with = "ser_rational")]
    pub quotient_form: Rational,
    /// `p(1 − a)(1 − p a)`.
    #[serde(serialize_with = "ser_rational")]
    pub product_form: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub edges_within: Vec<(usize, usize)>,
    /// Per-source forced sets, or a single union set for the domination check.
    pub forced: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<usize>,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
}

/// Outcome of an exhaustive oracle. `extreme` is the largest conditional edge
/// probability, or the smallest tail gap for the domination check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub kind: OracleKind,
    pub n: usize,
    #[serde(serialize_with = "ser_rational")]
    pub p: Rational,
    pub y0: Vec<usize>,
    #[serde(serialize_with = "ser_rational")]
    pub d_lower: Rational,
    pub events: usize,
    pub checks: usize,
    #[serde(serialize_with = "ser_rational")]
    pub bound: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub extreme: Rational,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient_form_matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_form_matches: Option<bool>,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cross {
    Absent,
    Unforced,
    Forced,
}

struct Setup {
    y0: Vec<usize>,
    within: Vec<(usize, usize)>,
    cross: Vec<(usize, usize)>,
    p: Rational,
}

fn setup(n: usize, cap: usize, p: &Rational, y0: &VertexSet, d_lower: &Rational) -> Result<Setup> {
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    if !p.is_positive() || *p >= Rational::one() {
        return Err(Error::InvalidProbability(p.to_f64().unwrap_or(f64::NAN)));
    }
    if !d_lower.is_positive() {
        return Err(Error::InvalidParameter(format!("d_lower must be positive, got {d_lower}")));
    }
    if let Some(m) = y0.max().filter(|&m| m >= n) {
        return Err(Error::VertexOutOfRange { vertex: m, n });
    }
    if y0.is_empty() || y0.len() == n {
        return Err(Error::DegenerateBlueSet);
    }
    let inside = y0.to_vec();
    let outside: Vec<usize> = (0..n).filter(|v| !y0.contains(*v)).collect();
    let mut within = Vec::new();
    for (i, &a) in inside.iter().enumerate() {
        for &b in &inside[i + 1..] {
            within.push((a, b));
        }
    }
    let cross = inside.iter().flat_map(|&u| outside.iter().map(move |&v| (u, v))).collect();
    Ok(Setup { y0: inside, within, cross, p: p.clone() })
}

impl Setup {
    /// Visits every joint outcome of positive probability: edges inside `Y0`, then
    /// each cross pair as absent, present but unforced, or present and forced.
    fn enumerate(&self, d_lower: &Rational, mut visit: impl FnMut(u64, &[Rational], &[Cross], &Rational)) {
        let one = Rational::one();
        let q = &one - &self.p;
        let mut states = vec![Cross::Absent; self.cross.len()];
        for e0 in 0u64..(1 << self.within.len()) {
            let present = e0.count_ones() as i32;
            let w0 = num_traits::pow(self.p.clone(), present as usize)
                * num_traits::pow(q.clone(), self.within.len() - present as usize);
            let force: Vec<Rational> = self
                .y0
                .iter()
                .map(|&u| {
                    let closed = 1 + self
                        .within
                        .iter()
                        .enumerate()
                        .filter(|(i, (a, b))| e0 >> i & 1 == 1 && (*a == u || *b == u))
                        .count();
                    let a = Rational::from_integer(BigInt::from(closed)) / d_lower;
                    if a > one { one.clone() } else { a }
                })
                .collect();
            let weights: Vec<[Rational; 3]> = self
                .cross
                .iter()
                .map(|(u, _)| {
                    let a = &force[self.y0.iter().position(|x| x == u).unwrap()];
                    [q.clone(), &self.p * (&one - a), &self.p * a]
                })
                .collect();
            self.descend(0, &w0, e0, &force, &weights, &mut states, &mut visit);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        depth: usize,
        weight: &Rational,
        e0: u64,
        force: &[Rational],
        weights: &[[Rational; 3]],
        states: &mut Vec<Cross>,
        visit: &mut impl FnMut(u64, &[Rational], &[Cross], &Rational),
    ) {
        if depth == states.len() {
            visit(e0, force, states, weight);
            return;
        }
        for (k, state) in [Cross::Absent, Cross::Unforced, Cross::Forced].into_iter().enumerate() {
            if weights[depth][k].is_zero() {
                continue;
            }
            states[depth] = state;
            let w = weight * &weights[depth][k];
            self.descend(depth + 1, &w, e0, force, weights, states, visit);
        }
    }

    fn within_edges(&self, e0: u64) -> Vec<(usize, usize)> {
        self.within.iter().enumerate().filter(|(i, _)| e0 >> i & 1 == 1).map(|(_, e)| *e).collect()
    }
}

/// Every conditional edge probability `P((u,v) ∈ G | E0, Y_1(u_j) = S_j ∀j)` for
/// `u ∈ Y0`, `v ∉ Y0 ∪ S_u`, over all positive-probability events, after one round of
/// the alternative rule with divisor `d_lower`.
pub fn edge_conditionals(
    n: usize,
    p: &Rational,
    y0: &VertexSet,
    d_lower: &Rational,
) -> Result<Vec<ConditionalEntry>> {
    let s = setup(n, EDGE_PROBABILITY_CAP, p, y0, d_lower)?;
    struct Acc {
        total: Rational,
        present: Vec<Rational>,
        force: Vec<Rational>,
    }
    let mut events: BTreeMap<(u64, Vec<u64>), Acc> = BTreeMap::new();
    s.enumerate(d_lower, |e0, force, states, w| {
        let mut forced = vec![0u64; s.y0.len()];
        for (i, (u, v)) in s.cross.iter().enumerate() {
            if states[i] == Cross::Forced {
                forced[s.y0.iter().position(|x| x == u).unwrap()] |= 1 << v;
            }
        }
        let acc = events.entry((e0, forced)).or_insert_with(|| Acc {
            total: Rational::zero(),
            present: vec![Rational::zero(); s.cross.len()],
            force: force.to_vec(),
        });
        acc.total += w;
        for (i, st) in states.iter().enumerate() {
            if *st != Cross::Absent {
                acc.present[i] += w;
            }
        }
    });
    let one = Rational::one();
    let mut out = Vec::new();
    for ((e0, forced), acc) in events {
        for (i, &(u, v)) in s.cross.iter().enumerate() {
            let j = s.y0.iter().position(|&x| x == u).unwrap();
            if forced[j] >> v & 1 == 1 {
                continue;
            }
            let a = acc.force[j].clone();
            let pa = p * &a;
            out.push(ConditionalEntry {
                edges_within: s.within_edges(e0),
                forced: s.y0.iter().zip(&forced).map(|(&u, &m)| (u, mask_vertices(m))).collect(),
                u,
                v,
                event_probability: acc.total.clone(),
                conditional: &acc.present[i] / &acc.total,
                quotient_form: p * (&one - &a) / (&one - &pa),
                product_form: p * (&one - &a) * (&one - &pa),
                force_probability: a,
            });
        }
    }
    Ok(out)
}

/// Exhaustively checks that conditioning on the first-round forcing outcome never
/// raises the probability of an unforced cross edge above `p`.
pub fn verify_lemma_edge_probability(
    n: usize,
    p: &Rational,
    y0: &VertexSet,
    d_lower: &Rational,
) -> Result<OracleReport> {
    let entries = edge_conditionals(n, p, y0, d_lower)?;
    let events = entries
        .iter()
        .map(|e| (&e.edges_within, &e.forced))
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    let worst = entries.iter().max_by(|a, b| a.conditional.cmp(&b.conditional));
    let extreme = worst.map_or_else(Rational::zero, |e| e.conditional.clone());
    Ok(OracleReport {
        kind: OracleKind::EdgeProbability,
        n,
        p: p.clone(),
        y0: y0.to_vec(),
        d_lower: d_lower.clone(),
        events,
        checks: entries.len(),
        bound: p.clone(),
        holds: extreme <= *p,
        quotient_form_matches: Some(entries.iter().all(|e| e.conditional == e.quotient_form)),
        product_form_matches: Some(entries.iter().all(|e| e.conditional == e.product_form)),
        witness: worst.map(|e| Witness {
            edges_within: e.edges_within.clone(),
            forced: e.forced.iter().map(|(_, s)| s.clone()).collect(),
            pair: Some((e.u, e.v)),
            threshold: None,
            value: e.conditional.clone(),
        }),
        extreme,
    })
}

fn binomial_pmf(m: usize, p: &Rational) -> Vec<Rational> {
    let q = Rational::one() - p;
    let mut coeff = BigInt::one();
    (0..=m)
        .map(|k| {
            if k > 0 {
                coeff = coeff.clone() * BigInt::from(m - k + 1) / BigInt::from(k);
            }
            Rational::from_integer(coeff.clone()) * num_traits::pow(p.clone(), k) * num_traits::pow(q.clone(), m - k)
        })
        .collect()
}

/// Upper tails `P(X ≥ k)` for `k = 0..len`.
fn tails(pmf: &[Rational], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    let mut acc = Rational::zero();
    for k in (0..len).rev() {
        if let Some(x) = pmf.get(k) {
            acc += x;
        }
        out[k] = acc.clone();
    }
    out
}

/// Exhaustively checks that, given the edges inside `Y0` and the forced set `S`,
/// `e(Y0, S)` is stochastically dominated by `|S| + Bin(|Y0||S|, p)`.
pub fn verify_edge_count_domination(
    n: usize,
    p: &Rational,
    y0: &VertexSet,
    d_lower: &Rational,
) -> Result<OracleReport> {
    let s = setup(n, DOMINATION_CAP, p, y0, d_lower)?;
    let mut events: BTreeMap<(u64, u64), Vec<Rational>> = BTreeMap::new();
    s.enumerate(d_lower, |e0, _, states, w| {
        let forced = s
            .cross
            .iter()
            .zip(states)
            .filter(|(_, st)| **st == Cross::Forced)
            .fold(0u64, |m, ((_, v), _)| m | (1 << v));
        let x = s
            .cross
            .iter()
            .zip(states)
            .filter(|((_, v), st)| **st != Cross::Absent && forced >> v & 1 == 1)
            .count();
        let pmf = events.entry((e0, forced)).or_insert_with(|| vec![Rational::zero(); s.cross.len() + 1]);
        pmf[x] += w;
    });
    let mut worst: Option<Witness> = None;
    let mut extreme: Option<Rational> = None;
    let mut checks = 0;
    for ((e0, forced), pmf) in &events {
        let total: Rational = pmf.iter().sum();
        let cond: Vec<Rational> = pmf.iter().map(|x| x / &total).collect();
        let size = forced.count_ones() as usize;
        let mut bound_pmf = vec![Rational::zero(); size];
        bound_pmf.extend(binomial_pmf(s.y0.len() * size, p));
        let len = cond.len().max(bound_pmf.len());
        let (tx, tb) = (tails(&cond, len), tails(&bound_pmf, len));
        for k in 0..len {
            checks += 1;
            let gap = &tb[k] - &tx[k];
            if extreme.as_ref().is_none_or(|e| gap < *e) {
                worst = Some(Witness {
                    edges_within: s.within_edges(*e0),
                    forced: vec![mask_vertices(*forced)],
                    pair: None,
                    threshold: Some(k),
                    value: gap.clone(),
                });
                extreme = Some(gap);
            }
        }
    }
    let extreme = extreme.unwrap_or_else(Rational::zero);
    Ok(OracleReport {
        kind: OracleKind::EdgeCountDomination,
        n,
        p: p.clone(),
        y0: y0.to_vec(),
        d_lower: d_lower.clone(),
        events: events.len(),
        checks,
        bound: Rational::zero(),
        holds: !extreme.is_negative(),
        quotient_form_matches: None,
        product_form_matches: None,
        witness: worst,
        extreme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn set(n: usize, v: &[usize]) -> VertexSet {
        VertexSet::from_vertices(n, v.iter().copied())
    }

    #[test]
    fn single_source_on_three_vertices() {
        let r = verify_lemma_edge_probability(3, &ratio(3, 10), &set(3, &[0]), &ratio(2, 1)).unwrap();
        assert!(r.holds);
        assert!(r.extreme <= ratio(3, 10));
        // a = 1/2, so p(1 − a)/(1 − pa) = (3/20)/(17/20).
        assert_eq!(r.extreme, ratio(3, 17));
        assert_eq!(r.quotient_form_matches, Some(true));
        assert_eq!(r.product_form_matches, Some(false));
    }

    #[test]
    fn certain_force_leaves_no_unforced_edge() {
        // deg_{Y0}[0] = 2 = d_lower when the inner edge is present.
        let entries = edge_conditionals(4, &ratio(1, 4), &set(4, &[0, 1]), &ratio(2, 1)).unwrap();
        let saturated: Vec<_> = entries.iter().filter(|e| !e.edges_within.is_empty()).collect();
        assert!(!saturated.is_empty());
        assert!(saturated.iter().all(|e| e.conditional.is_zero()));
    }

    #[test]
    fn two_sources_on_four_vertices() {
        let r = verify_lemma_edge_probability(4, &ratio(1, 4), &set(4, &[0, 1]), &ratio(3, 1)).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.extreme <= ratio(1, 4));
        assert!(r.events > 1);
    }

    #[test]
    fn domination_small() {
        let r = verify_edge_count_domination(3, &ratio(1, 3), &set(3, &[0]), &ratio(2, 1)).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(!r.extreme.is_negative());
        let r = verify_edge_count_domination(5, &ratio(3, 10), &set(5, &[0, 2]), &ratio(3, 1)).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn binomial_sums_to_one() {
        let pmf = binomial_pmf(5, &ratio(1, 3));
        assert_eq!(pmf.iter().sum::<Rational>(), Rational::one());
        assert_eq!(pmf[0], ratio(32, 243));
    }

    #[test]
    fn rejects_bad_inputs() {
        let y = set(3, &[0]);
        assert!(verify_lemma_edge_probability(7, &ratio(1, 4), &set(7, &[0]), &ratio(2, 1)).is_err());
        assert!(verify_edge_count_domination(6, &ratio(1, 4), &set(6, &[0]), &ratio(2, 1)).is_err());
        assert!(verify_lemma_edge_probability(3, &ratio(0, 1), &y, &ratio(2, 1)).is_err());
        assert!(verify_lemma_edge_probability(3, &ratio(1, 1), &y, &ratio(2, 1)).is_err());
        assert!(verify_lemma_edge_probability(3, &ratio(1, 2), &y, &ratio(0, 1)).is_err());
        assert!(verify_lemma_edge_probability(3, &ratio(1, 2), &VertexSet::empty(3), &ratio(2, 1)).is_err());
        assert!(verify_lemma_edge_probability(3, &ratio(1, 2), &VertexSet::full(3), &ratio(2, 1)).is_err());
    }

    #[test]
    fn report_json_uses_rational_strings() {
        let r = verify_lemma_edge_probability(3, &ratio(3, 10), &set(3, &[0]), &ratio(2, 1)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["kind"], "edge_probability");
        assert_eq!(v["p"], "3/10");
        assert_eq!(v["extreme"], "3/17");
        assert!(v["witness"]["pair"].is_array());
    }
}
