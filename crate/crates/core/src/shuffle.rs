//! One-message shuffle model.
//!
//! After a uniformly random permutation, the only information left in the
//! reports of `n` users is the multiset of messages, i.e. a [`CountVector`]
//! over the output alphabet. Distributions over count vectors are built by
//! convolving one user at a time, which keeps every audit polynomial in `n`
//! for a fixed alphabet.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::{
    audit_pure, hockey_stick_slices, max_log_ratio_slices, min_eps_for_delta, NeighborPair,
    TradeoffCurve,
};
use crate::dist::{check_eps, check_unit, Dist, PrivacyBudget};
use crate::error::{invalid, Error, Result};
use crate::limits::EnumLimits;
use crate::mechanism::Mechanism;

/// Per-symbol counts of a multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountVector {
    counts: Vec<u32>,
}

impl CountVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn zeros(k: usize) -> Self {
        Self { counts: vec![0; k] }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn get(&self, symbol: usize) -> u32 {
        self.counts[symbol]
    }

    pub fn l1_distance(&self, other: &CountVector) -> u32 {
        self.counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a.abs_diff(*b))
            .sum()
    }

    pub fn incremented(&self, symbol: usize) -> Self {
        let mut c = self.clone();
        c.counts[symbol] += 1;
        c
    }

    /// Every count vector over `k` symbols with total `n`, in descending
    /// lexicographic order.
    pub fn all(k: usize, n: u32) -> Vec<CountVector> {
        fn rec(prefix: &mut Vec<u32>, k: usize, left: u32, out: &mut Vec<CountVector>) {
            if prefix.len() + 1 == k {
                prefix.push(left);
                out.push(CountVector::new(prefix.clone()));
                prefix.pop();
                return;
            }
            for c in (0..=left).rev() {
                prefix.push(c);
                rec(prefix, k, left - c, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if k > 0 {
            rec(&mut Vec::with_capacity(k), k, n, &mut out);
        }
        out
    }

    /// Datasets obtained by changing one user's input from `a` to `b`.
    pub fn substitution_neighbors(&self) -> Vec<CountVector> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            if self.counts[a] == 0 {
                continue;
            }
            for b in 0..self.len() {
                if a != b {
                    let mut c = self.clone();
                    c.counts[a] -= 1;
                    c.counts[b] += 1;
                    out.push(c);
                }
            }
        }
        out
    }
}

impl fmt::Display for CountVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for CountVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| invalid("count vector", format!("`{s}` is not of the form (a,b,..)")))?;
        let counts = inner
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<u32>()
                    .map_err(|_| invalid("count vector", format!("`{c}` is not a count")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(counts))
    }
}

/// A randomizer applied by every user of a dataset given as input counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ShuffleInstance {
    randomizer: Mechanism,
    dataset: CountVector,
}

impl ShuffleInstance {
    pub fn new(randomizer: Mechanism, dataset: CountVector) -> Result<Self> {
        if dataset.len() != randomizer.num_inputs() {
            return Err(Error::AlphabetMismatch {
                left: randomizer.num_inputs(),
                right: dataset.len(),
            });
        }
        if dataset.total() == 0 {
            return Err(invalid("dataset", "must contain at least one user"));
        }
        Ok(Self {
            randomizer,
            dataset,
        })
    }

    pub fn randomizer(&self) -> &Mechanism {
        &self.randomizer
    }

    pub fn dataset(&self) -> &CountVector {
        &self.dataset
    }
}

/// Exact distribution of the shuffled output, keyed by output counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountDistribution {
    probs: BTreeMap<CountVector, f64>,
}

impl CountDistribution {
    pub fn prob(&self, c: &CountVector) -> f64 {
        self.probs.get(c).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&CountVector, f64)> {
        self.probs.iter().map(|(c, p)| (c, *p))
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Dense row over `outputs` (count vectors missing from the support get 0).
    pub fn to_dist(&self, outputs: &[CountVector]) -> Result<Dist> {
        Dist::from_computed(outputs.iter().map(|c| self.prob(c)).collect())
    }
}

type Sparse = HashMap<CountVector, f64>;

fn convolve(acc: &Sparse, row: &Dist) -> Sparse {
    let mut out = HashMap::with_capacity(acc.len() * 2);
    for (c, p) in acc {
        for (y, q) in row.mass().iter().enumerate() {
            if *q > 0.0 {
                *out.entry(c.incremented(y)).or_insert(0.0) += p * q;
            }
        }
    }
    out
}

fn shuffle_sparse(randomizer: &Mechanism, dataset: &CountVector) -> Sparse {
    let mut acc: Sparse = HashMap::from([(CountVector::zeros(randomizer.num_outputs()), 1.0)]);
    for (x, &count) in dataset.counts().iter().enumerate() {
        for _ in 0..count {
            acc = convolve(&acc, randomizer.row(x));
        }
    }
    acc
}

fn check_limits(randomizer: &Mechanism, n: usize, limits: &EnumLimits) -> Result<()> {
    if n > limits.max_users {
        return Err(Error::EnumerationLimit(format!(
            "n = {n} users exceeds the cap of {} (raise via DPCALC_MAX_ENUM)",
            limits.max_users
        )));
    }
    if randomizer.num_outputs() > limits.max_outputs {
        return Err(Error::EnumerationLimit(format!(
            "{} output symbols exceeds the cap of {} (raise via DPCALC_MAX_ENUM)",
            randomizer.num_outputs(),
            limits.max_outputs
        )));
    }
    Ok(())
}

pub fn shuffled_distribution(inst: &ShuffleInstance) -> Result<CountDistribution> {
    shuffled_distribution_with_limits(inst, &EnumLimits::current())
}

pub fn shuffled_distribution_with_limits(
    inst: &ShuffleInstance,
    limits: &EnumLimits,
) -> Result<CountDistribution> {
    check_limits(&inst.randomizer, inst.dataset.total() as usize, limits)?;
    Ok(CountDistribution {
        probs: shuffle_sparse(&inst.randomizer, &inst.dataset)
            .into_iter()
            .collect(),
    })
}

/// The whole shuffled protocol on `n` users as an explicit mechanism whose
/// inputs are datasets (labelled by their count vector) and whose outputs are
/// message count vectors, together with its substitution neighbor pairs.
pub fn shuffled_mechanism(
    randomizer: &Mechanism,
    n: u32,
    limits: &EnumLimits,
) -> Result<(Mechanism, Vec<NeighborPair>)> {
    check_limits(randomizer, n as usize, limits)?;
    let datasets = CountVector::all(randomizer.num_inputs(), n);
    let outputs = CountVector::all(randomizer.num_outputs(), n);
    let rows = datasets
        .iter()
        .map(|d| {
            let sparse = shuffle_sparse(randomizer, d);
            Dist::from_computed(
                outputs
                    .iter()
                    .map(|c| sparse.get(c).copied().unwrap_or(0.0))
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut neighbors = Vec::new();
    for d in &datasets {
        for e in d.substitution_neighbors() {
            if d < &e {
                neighbors.push(NeighborPair::datasets(d.clone(), e)?);
            }
        }
    }
    let m = Mechanism::from_dists(
        datasets.iter().map(ToString::to_string).collect(),
        outputs.iter().map(ToString::to_string).collect(),
        rows,
    )?;
    Ok((m, neighbors))
}

/// Precomputed shuffled distributions for every neighboring dataset pair of
/// a randomizer on `n` users.
///
/// Neighbors `D = B + {x}` and `D' = B + {x'}` share the `n - 1` users in `B`,
/// so each pair is two convolutions of the shared `S(B)`.
#[derive(Debug, Clone)]
pub struct ShuffleAudit {
    n: u32,
    pairs: Vec<(Vec<f64>, Vec<f64>)>,
}

impl ShuffleAudit {
    pub fn new(randomizer: &Mechanism, n: u32) -> Result<Self> {
        Self::with_limits(randomizer, n, &EnumLimits::current())
    }

    pub fn with_limits(randomizer: &Mechanism, n: u32, limits: &EnumLimits) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        if randomizer.num_inputs() < 2 {
            return Err(Error::TooFewInputs(randomizer.num_inputs()));
        }
        check_limits(randomizer, n as usize, limits)?;
        let k = randomizer.num_inputs();
        let bases = CountVector::all(k, n - 1);
        let pairs = bases
            .par_iter()
            .flat_map_iter(|base| {
                let shared = shuffle_sparse(randomizer, base);
                let per_input: Vec<Sparse> = randomizer
                    .rows()
                    .iter()
                    .map(|row| convolve(&shared, row))
                    .collect();
                let mut out = Vec::new();
                for a in 0..k {
                    for b in a + 1..k {
                        out.push(align(&per_input[a], &per_input[b]));
                    }
                }
                out
            })
            .collect();
        Ok(Self { n, pairs })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of unordered neighboring dataset pairs.
    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Exact minimal `delta` for shuffle DP at `eps`.
    pub fn delta_at(&self, eps: f64) -> Result<f64> {
        check_eps("eps", eps)?;
        Ok(self
            .pairs
            .par_iter()
            .map(|(p, q)| hockey_stick_slices(p, q, eps).max(hockey_stick_slices(q, p, eps)))
            .reduce(|| 0.0, f64::max))
    }

    /// Smallest `eps` with `delta = 0`.
    pub fn pure_eps(&self) -> f64 {
        self.pairs
            .iter()
            .map(|(p, q)| max_log_ratio_slices(p, q).max(max_log_ratio_slices(q, p)))
            .fold(0.0, f64::max)
    }

    pub fn curve(&self, grid: &[f64]) -> Result<TradeoffCurve> {
        TradeoffCurve::from_fn(grid, |e| self.delta_at(e))
    }

    /// Smallest `eps` (to 1e-9) at which the audited `delta` is at most `delta`.
    pub fn eps_for_delta(&self, delta: f64) -> Result<Option<f64>> {
        check_unit("delta", delta)?;
        let mut hi = self.pure_eps();
        if hi.is_infinite() {
            hi = 64.0;
        }
        min_eps_for_delta(|e| self.delta_at(e), delta, hi, 1e-9)
    }
}

fn align(p: &Sparse, q: &Sparse) -> (Vec<f64>, Vec<f64>) {
    let mut keys: Vec<&CountVector> = p.keys().chain(q.keys()).collect();
    // descending, so with one user the order is the output symbol order
    keys.sort_unstable_by(|a, b| b.cmp(a));
    keys.dedup();
    let get = |m: &Sparse, k: &CountVector| m.get(k).copied().unwrap_or(0.0);
    keys.iter().map(|k| (get(p, k), get(q, k))).unzip()
}

/// Exact minimal `delta` for which shuffling `n` reports of `randomizer` is
/// `(eps, delta)`-DP under substitution of one user's input.
pub fn audit_shuffle(randomizer: &Mechanism, n: u32, eps: f64) -> Result<f64> {
    ShuffleAudit::new(randomizer, n)?.delta_at(eps)
}

/// A one-message shuffle protocol that is `(eps_s, delta_s)`-DP on `n` users
/// has an `(eps_s + ln n, delta_s)`-LDP randomizer.
pub fn shuffle_to_ldp_budget(eps_s: f64, delta_s: f64, n: u64) -> Result<PrivacyBudget> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    PrivacyBudget::new(eps_s + (n as f64).ln(), delta_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplificationParams {
    pub eps_l: f64,
    pub delta: f64,
    pub n: u64,
    /// Fraction of users following the protocol.
    pub gamma: f64,
}

impl AmplificationParams {
    pub fn new(eps_l: f64, delta: f64, n: u64, gamma: f64) -> Result<Self> {
        check_eps("eps_l", eps_l)?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid("delta", format!("{delta} is outside (0, 1)")));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(invalid("gamma", format!("{gamma} is outside (0, 1]")));
        }
        let p = Self {
            eps_l,
            delta,
            n,
            gamma,
        };
        if p.effective_n() == 0 {
            return Err(invalid(
                "n",
                format!("floor(gamma * n) is 0 for n={n}, gamma={gamma}"),
            ));
        }
        Ok(p)
    }

    /// `floor(gamma * n)` honest users.
    pub fn effective_n(&self) -> u64 {
        (self.gamma * self.n as f64).floor() as u64
    }

    /// Largest admissible `eps_l`: `ln(n_eff / (8 ln(2/delta)) - 1)`, or `None`
    /// when no `eps_l >= 0` is admissible.
    pub fn feasibility_cutoff(&self) -> Option<f64> {
        let arg = self.effective_n() as f64 / (8.0 * (2.0 / self.delta).ln()) - 1.0;
        (arg >= 1.0).then(|| arg.ln())
    }
}

/// The amplification expression
/// `ln(1 + 4 (e^eps_l - 1) (sqrt(2 ln(4/delta) / ((e^eps_l + 1) n)) + 1/n))`
/// without any feasibility check.
pub fn amplification_formula(eps_l: f64, delta: f64, n: f64) -> f64 {
    let inner = (2.0 * (4.0 / delta).ln() / ((eps_l.exp() + 1.0) * n)).sqrt() + 1.0 / n;
    (4.0 * eps_l.exp_m1() * inner).ln_1p()
}

/// Central `eps` of shuffling `floor(gamma n)` honest `eps_l`-LDP reports.
pub fn amplification_eps(params: &AmplificationParams) -> Result<f64> {
    let p = AmplificationParams::new(params.eps_l, params.delta, params.n, params.gamma)?;
    match p.feasibility_cutoff() {
        Some(cut) if p.eps_l <= cut => {}
        cut => {
            return Err(Error::Infeasible(format!(
                "eps_l = {} exceeds the cutoff ln(n_eff / (8 ln(2/delta)) - 1) = {} for n_eff = {}, delta = {}",
                p.eps_l,
                cut.map_or_else(|| "undefined (argument <= 1)".to_string(), |c| c.to_string()),
                p.effective_n(),
                p.delta
            )));
        }
    }
    Ok(amplification_formula(
        p.eps_l,
        p.delta,
        p.effective_n() as f64,
    ))
}

/// Exact audit at the amplification bound, for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplificationCheck {
    pub n: u32,
    pub eps_l: f64,
    pub eps_bound: f64,
    pub delta: f64,
    pub exact_delta: f64,
    pub margin: f64,
    pub holds: bool,
}

pub fn check_amplification_vs_exact(
    randomizer: &Mechanism,
    n: u32,
    delta: f64,
) -> Result<AmplificationCheck> {
    check_amplification_vs_exact_with_limits(randomizer, n, delta, &EnumLimits::current())
}

pub fn check_amplification_vs_exact_with_limits(
    randomizer: &Mechanism,
    n: u32,
    delta: f64,
    limits: &EnumLimits,
) -> Result<AmplificationCheck> {
    let eps_l = audit_pure(randomizer)?;
    if eps_l.is_infinite() {
        return Err(Error::Infeasible("randomizer is not pure LDP".into()));
    }
    let eps_bound = amplification_eps(&AmplificationParams::new(eps_l, delta, n as u64, 1.0)?)?;
    let exact_delta = ShuffleAudit::with_limits(randomizer, n, limits)?.delta_at(eps_bound)?;
    let margin = delta - exact_delta;
    Ok(AmplificationCheck {
        n,
        eps_l,
        eps_bound,
        delta,
        exact_delta,
        margin,
        holds: margin >= -1e-9,
    })
}
