//! Exact `(eps, delta)` auditing of finite mechanisms.
//!
//! Every audit reduces to the hockey-stick divergence
//! `H_eps(P || Q) = sum_y max(0, P(y) - e^eps Q(y))`, which is the smallest
//! `delta` such that `P(S) <= e^eps Q(S) + delta` holds for every event `S`.
//! The maximizing event is `{y : P(y) > e^eps Q(y)}`, so no subset search is
//! needed.

use serde::{Deserialize, Serialize};

use crate::dist::{check_eps, check_weights, Dist};
use crate::error::{invalid, Error, Result};
use crate::mechanism::Mechanism;
use crate::shuffle::CountVector;

fn same_alphabet(p: &Dist, q: &Dist) -> Result<()> {
    if p.len() == q.len() {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch {
            left: p.len(),
            right: q.len(),
        })
    }
}

/// `H_eps(p || q)`, clamped to `[0, 1]`. `eps = +inf` is accepted and yields
/// the mass of `p` outside the support of `q`.
pub fn hockey_stick(p: &Dist, q: &Dist, eps: f64) -> Result<f64> {
    same_alphabet(p, q)?;
    check_eps("eps", eps)?;
    Ok(hockey_stick_slices(p.mass(), q.mass(), eps))
}

pub(crate) fn hockey_stick_slices(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let scale = eps.exp();
    let delta: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| {
            let bound = if b == 0.0 { 0.0 } else { scale * b };
            (a - bound).max(0.0)
        })
        .fold(0.0, |acc, x| acc + x);
    delta.clamp(0.0, 1.0)
}

/// Total variation distance, `(1/2) sum |p - q|`.
pub fn tv_distance(p: &Dist, q: &Dist) -> Result<f64> {
    same_alphabet(p, q)?;
    let d: f64 = p
        .mass()
        .iter()
        .zip(q.mass())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, |acc, x| acc + x);
    Ok((0.5 * d).clamp(0.0, 1.0))
}

/// `ln max_y p(y) / q(y)` over the support of `p`; `+inf` when `p` charges a
/// symbol that `q` does not.
pub fn max_log_ratio(p: &Dist, q: &Dist) -> Result<f64> {
    same_alphabet(p, q)?;
    Ok(max_log_ratio_slices(p.mass(), q.mass()))
}

pub(crate) fn max_log_ratio_slices(p: &[f64], q: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for (&a, &b) in p.iter().zip(q) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return f64::INFINITY;
        }
        best = best.max((a / b).ln());
    }
    best
}

fn ordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
}

/// Smallest `delta` for which `r` is `(eps, delta)`-replacement-LDP.
pub fn audit_replacement_ldp(r: &Mechanism, eps: f64) -> Result<f64> {
    if r.num_inputs() < 2 {
        return Err(Error::TooFewInputs(r.num_inputs()));
    }
    check_eps("eps", eps)?;
    Ok(ordered_pairs(r.num_inputs())
        .map(|(a, b)| hockey_stick_slices(r.row(a).mass(), r.row(b).mass(), eps))
        .fold(0.0, f64::max))
}

/// Smallest `delta` for which `r` is `(eps, delta)`-deletion-LDP with reference `r0`.
pub fn audit_deletion_ldp(r: &Mechanism, r0: &Dist, eps: f64) -> Result<f64> {
    if r0.len() != r.num_outputs() {
        return Err(Error::AlphabetMismatch {
            left: r.num_outputs(),
            right: r0.len(),
        });
    }
    check_eps("eps", eps)?;
    Ok(r.rows()
        .iter()
        .map(|row| {
            let upper = hockey_stick_slices(row.mass(), r0.mass(), eps);
            let lower = hockey_stick_slices(r0.mass(), row.mass(), eps);
            upper.max(lower)
        })
        .fold(0.0, f64::max))
}

/// Smallest `eps` for which `r` is pure `eps`-replacement-LDP (`+inf` if none).
pub fn audit_pure(r: &Mechanism) -> Result<f64> {
    if r.num_inputs() < 2 {
        return Err(Error::TooFewInputs(r.num_inputs()));
    }
    Ok(ordered_pairs(r.num_inputs())
        .map(|(a, b)| max_log_ratio_slices(r.row(a).mass(), r.row(b).mass()))
        .fold(0.0, f64::max))
}

/// A neighboring pair of datasets, either as input ids of a mechanism or as
/// count vectors that are looked up by their label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeighborPair {
    Inputs(usize, usize),
    Datasets(CountVector, CountVector),
}

impl NeighborPair {
    /// Validates that the two count vectors differ by a single substitution.
    pub fn datasets(left: CountVector, right: CountVector) -> Result<Self> {
        if left.len() != right.len() || left.total() != right.total() {
            return Err(invalid(
                "neighbors",
                format!("{left} and {right} have different shapes or totals"),
            ));
        }
        if left.l1_distance(&right) != 2 {
            return Err(invalid(
                "neighbors",
                format!("{left} and {right} do not differ in exactly one entry"),
            ));
        }
        Ok(Self::Datasets(left, right))
    }

    fn resolve(&self, m: &Mechanism) -> Result<(usize, usize)> {
        match self {
            Self::Inputs(a, b) => {
                m.check_input(*a)?;
                m.check_input(*b)?;
                Ok((*a, *b))
            }
            Self::Datasets(a, b) => Ok((
                m.input_index(&a.to_string())?,
                m.input_index(&b.to_string())?,
            )),
        }
    }
}

/// Central-DP audit: max hockey-stick over both orientations of every listed pair.
pub fn audit_central(m: &Mechanism, neighbors: &[NeighborPair], eps: f64) -> Result<f64> {
    check_eps("eps", eps)?;
    let mut delta = 0.0f64;
    for pair in neighbors {
        let (a, b) = pair.resolve(m)?;
        let (p, q) = (m.row(a).mass(), m.row(b).mass());
        delta = delta
            .max(hockey_stick_slices(p, q, eps))
            .max(hockey_stick_slices(q, p, eps));
    }
    Ok(delta)
}

/// Smallest pure `eps` over the listed neighbor pairs.
pub fn audit_pure_central(m: &Mechanism, neighbors: &[NeighborPair]) -> Result<f64> {
    let mut eps = 0.0f64;
    for pair in neighbors {
        let (a, b) = pair.resolve(m)?;
        let (p, q) = (m.row(a).mass(), m.row(b).mass());
        eps = eps
            .max(max_log_ratio_slices(p, q))
            .max(max_log_ratio_slices(q, p));
    }
    Ok(eps)
}

/// Applies a deterministic relabelling `map[y]` of outputs into `new_outputs`.
pub fn postprocess(m: &Mechanism, new_outputs: Vec<String>, map: &[usize]) -> Result<Mechanism> {
    let k = new_outputs.len();
    let rows = m
        .rows()
        .iter()
        .map(|r| r.pushforward(map, k))
        .collect::<Result<Vec<_>>>()?;
    Mechanism::from_dists(m.inputs().to_vec(), new_outputs, rows)
}

/// Row-wise convex combination of mechanisms sharing both alphabets.
pub fn mix(components: &[(f64, &Mechanism)]) -> Result<Mechanism> {
    let first = match components.first() {
        Some((_, m)) => *m,
        None => return Err(Error::WeightSum(0.0)),
    };
    check_weights(components.iter().map(|(w, _)| *w))?;
    for (_, m) in components {
        first.same_shape(m)?;
    }
    let rows = (0..first.num_inputs())
        .map(|x| {
            let parts: Vec<(f64, &Dist)> = components.iter().map(|(w, m)| (*w, m.row(x))).collect();
            Dist::mixture(&parts)
        })
        .collect::<Result<Vec<_>>>()?;
    Mechanism::from_dists(first.inputs().to_vec(), first.outputs().to_vec(), rows)
}

/// `Pr_{y ~ p}[ln(p(y)/q(y)) > threshold]`; symbols outside the support of `q`
/// carry infinite loss.
pub fn privacy_loss_tail(p: &Dist, q: &Dist, threshold: f64) -> Result<f64> {
    same_alphabet(p, q)?;
    Ok(p.mass()
        .iter()
        .zip(q.mass())
        .filter(|(&a, &b)| a > 0.0 && (b == 0.0 || (a / b).ln() > threshold))
        .fold(0.0, |acc, (a, _)| acc + a))
}

/// Candidate deletion references: uniform, the average row, and each row.
pub fn reference_candidates(r: &Mechanism) -> Vec<(String, Dist)> {
    let k = r.num_outputs();
    let mut out = vec![("uniform".to_string(), Dist::uniform(k).expect("non-empty"))];
    let w = 1.0 / r.num_inputs() as f64;
    let parts: Vec<(f64, &Dist)> = r.rows().iter().map(|d| (w, d)).collect();
    if let Ok(avg) = Dist::mixture(&parts) {
        out.push(("average".to_string(), avg));
    }
    for (label, row) in r.inputs().iter().zip(r.rows()) {
        out.push((format!("row:{label}"), row.clone()));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub eps: f64,
    pub delta: f64,
}

/// Sampled `eps -> delta(eps)` curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurve {
    points: Vec<TradeoffPoint>,
}

impl TradeoffCurve {
    /// Evaluates `audit` on a strictly increasing grid. Rounding noise that
    /// would make `delta` increase (up to 1e-12) is absorbed by a running min.
    pub fn from_fn(grid: &[f64], mut audit: impl FnMut(f64) -> Result<f64>) -> Result<Self> {
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("eps grid", "must be strictly increasing"));
        }
        let mut points = Vec::with_capacity(grid.len());
        let mut prev = 1.0f64;
        for &eps in grid {
            let delta = audit(eps)?;
            if !(0.0..=1.0).contains(&delta) {
                return Err(invalid(
                    "delta",
                    format!("{delta} at eps={eps} outside [0, 1]"),
                ));
            }
            if delta > prev + 1e-12 {
                return Err(invalid(
                    "delta",
                    format!("increases from {prev} to {delta} at eps={eps}"),
                ));
            }
            prev = prev.min(delta);
            points.push(TradeoffPoint { eps, delta: prev });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[TradeoffPoint] {
        &self.points
    }

    /// Smallest grid `eps` whose `delta` is at most `target`.
    pub fn min_eps_for(&self, target: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.delta <= target)
            .map(|p| p.eps)
    }
}

/// `count` evenly spaced values from 0 to `max` inclusive.
pub fn eps_grid(max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..count)
            .map(|i| max * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Smallest `eps` in `[0, hi]` with `delta(eps) <= target`, by bisection to
/// absolute tolerance `tol`. Returns `None` when even `hi` is not enough.
pub fn min_eps_for_delta(
    mut delta: impl FnMut(f64) -> Result<f64>,
    target: f64,
    hi: f64,
    tol: f64,
) -> Result<Option<f64>> {
    if delta(0.0)? <= target {
        return Ok(Some(0.0));
    }
    if delta(hi)? > target {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if delta(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}
