//! Local-DP calculus: deletion vs replacement LDP, trimming to pure deletion
//! LDP, compiling asymmetric protocols into symmetric ones, grouposition,
//! composition of randomizers, and purification bounds.

use serde::{Deserialize, Serialize};

use crate::audit::{audit_deletion_ldp, max_log_ratio_slices, privacy_loss_tail, tv_distance};
use crate::dist::{check_eps, check_unit, Dist, PrivacyBudget};
use crate::error::{invalid, Error, Result};
use crate::mechanism::Mechanism;

/// Slack for audit post-conditions.
pub const AUDIT_TOL: f64 = 1e-9;

fn log_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    let lo = a.min(b);
    hi + (lo - hi).exp().ln_1p()
}

// ---------------------------------------------------------------------------
// Deletion and replacement LDP

/// Uses row `x0` as the deletion reference. Fails if `r` does not in fact
/// pass the deletion audit at `(eps, delta)` against it.
pub fn replacement_to_deletion(
    r: &Mechanism,
    x0: usize,
    eps: f64,
    delta: f64,
) -> Result<(Dist, PrivacyBudget)> {
    r.check_input(x0)?;
    let budget = PrivacyBudget::new(eps, delta)?;
    let r0 = r.row(x0).clone();
    let audited = audit_deletion_ldp(r, &r0, eps)?;
    if audited > delta + AUDIT_TOL {
        return Err(Error::Precondition(format!(
            "deletion audit against row `{}` at eps={eps} is {audited} > {delta}",
            r.inputs()[x0]
        )));
    }
    Ok((r0, budget))
}

/// `(eps, delta)`-deletion implies `(2 eps, (e^eps + 1) delta)`-replacement.
/// The additive term is capped at 1.
pub fn deletion_to_replacement_budget(eps: f64, delta: f64) -> Result<PrivacyBudget> {
    check_eps("eps", eps)?;
    check_unit("delta", delta)?;
    PrivacyBudget::new(2.0 * eps, ((eps.exp() + 1.0) * delta).min(1.0))
}

/// The deletion-LDP randomizer `{0,1} -> {1,2,3}` that meets the
/// `(2 eps, (e^eps + 1) delta)` replacement bound with equality at output 2,
/// refuting a `(2 eps, 2 delta)` bound. Its deletion reference is uniform.
pub fn build_counterexample(eps: f64, delta: f64) -> Result<Mechanism> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(invalid("eps", format!("{eps} is outside [0, 1/2]")));
    }
    if !(0.0..=0.2).contains(&delta) {
        return Err(invalid("delta", format!("{delta} is outside [0, 1/5]")));
    }
    let (up, down) = (eps.exp(), (-eps).exp());
    let r0 = [up / 3.0, down * (1.0 / 3.0 - delta)];
    let r1 = [down / 3.0, up / 3.0 + delta];
    let row = |a: [f64; 2]| vec![a[0], a[1], 1.0 - (a[0] + a[1])];
    Mechanism::new(
        vec!["0".into(), "1".into()],
        vec!["1".into(), "2".into(), "3".into()],
        vec![row(r0), row(r1)],
    )
}

/// Exact deletion audit of [`build_counterexample`] against the uniform
/// reference at its own `eps`: `max(delta, (e^eps - 1)(e^eps - 2)/3 + e^eps delta)`.
///
/// This equals `delta` (so the randomizer is `(eps, delta)`-deletion LDP)
/// exactly when `delta <= (2 - e^eps) / 3`; see [`counterexample_delta_cap`].
pub fn counterexample_deletion_delta(eps: f64, delta: f64) -> Result<f64> {
    build_counterexample(eps, delta)?;
    let up = eps.exp();
    Ok(delta.max((up - 1.0) * (up - 2.0) / 3.0 + up * delta))
}

/// Largest `delta` for which the counterexample at `eps` is
/// `(eps, delta)`-deletion LDP against the uniform reference.
pub fn counterexample_delta_cap(eps: f64) -> f64 {
    (2.0 - eps.exp()) / 3.0
}

fn clip_into_band(row: &Dist, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = row
        .mass()
        .iter()
        .zip(lo.iter().zip(hi))
        .map(|(&p, (&l, &h))| p.clamp(l, h))
        .collect();
    let total: f64 = v.iter().sum();
    if total < 1.0 {
        let need = 1.0 - total;
        let room: Vec<f64> = v.iter().zip(hi).map(|(p, h)| h - p).collect();
        let avail: f64 = room.iter().sum();
        if avail > 0.0 {
            for (p, r) in v.iter_mut().zip(&room) {
                *p += need * r / avail;
            }
        }
    } else if total > 1.0 {
        let excess = total - 1.0;
        let room: Vec<f64> = v.iter().zip(lo).map(|(p, l)| p - l).collect();
        let avail: f64 = room.iter().sum();
        if avail > 0.0 {
            for (p, r) in v.iter_mut().zip(&room) {
                *p -= excess * r / avail;
            }
        }
    }
    for ((p, &l), &h) in v.iter_mut().zip(lo).zip(hi) {
        *p = p.clamp(l, h);
    }
    v
}

/// Smallest weight `lambda` such that `(1 - lambda) row + lambda r0` is
/// pure `eps`-close to `r0` in both directions.
fn mix_toward_reference(row: &Dist, r0: &Dist, eps: f64) -> Result<Dist> {
    let inside = |lambda: f64| -> Result<Option<Dist>> {
        let d = Dist::mixture(&[(1.0 - lambda, row), (lambda, r0)])?;
        let up = max_log_ratio_slices(d.mass(), r0.mass());
        let down = max_log_ratio_slices(r0.mass(), d.mass());
        Ok((up <= eps + 1e-12 && down <= eps + 1e-12).then_some(d))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if inside(mid)?.is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(inside(hi)?.unwrap_or_else(|| r0.clone()))
}

/// Returns a pure `eps`-deletion-LDP randomizer (same reference `r0`) whose
/// rows are each within total variation `delta` of the rows of `r`.
///
/// Each row is clipped into the band `[e^-eps r0, e^eps r0]` and the net mass
/// change is spread over the remaining headroom. Rows that already lie in the
/// band are returned untouched.
pub fn trim_to_pure_deletion(r: &Mechanism, r0: &Dist, eps: f64, delta: f64) -> Result<Mechanism> {
    check_unit("delta", delta)?;
    let audited = audit_deletion_ldp(r, r0, eps)?;
    if audited > delta + AUDIT_TOL {
        return Err(Error::Precondition(format!(
            "deletion audit at eps={eps} is {audited}, above delta={delta}"
        )));
    }
    let (up, down) = (eps.exp(), (-eps).exp());
    let lo: Vec<f64> = r0.mass().iter().map(|v| down * v).collect();
    let hi: Vec<f64> = r0.mass().iter().map(|v| up * v).collect();
    let rows = r
        .rows()
        .iter()
        .map(|row| {
            let in_band = row
                .mass()
                .iter()
                .zip(lo.iter().zip(&hi))
                .all(|(p, (l, h))| l <= p && p <= h);
            if in_band {
                return Ok(row.clone());
            }
            let trimmed = Dist::from_computed(clip_into_band(row, &lo, &hi))?;
            if tv_distance(row, &trimmed)? <= delta + 1e-12 {
                return Ok(trimmed);
            }
            let fallback = mix_toward_reference(row, r0, eps)?;
            if tv_distance(row, &fallback)? <= delta + 1e-12 {
                Ok(fallback)
            } else {
                Err(Error::Infeasible(format!(
                    "could not trim a row within total variation {delta}"
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Mechanism::from_dists(r.inputs().to_vec(), r.outputs().to_vec(), rows)
}

// ---------------------------------------------------------------------------
// Asymmetric to symmetric

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoinModel {
    Private,
    Public,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CompiledRandomizer {
    /// One randomizer over `[n] x Y`: draw `j` uniformly, report `(j, R_j(x))`.
    Private(Mechanism),
    /// Member `j` is used when the shared seed selects `j`.
    Public(Vec<Mechanism>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricCompilation {
    pub combined: CompiledRandomizer,
    /// Users needed so that every index is drawn with probability at least 5/6.
    pub n_prime: u64,
}

/// Success probability lost to the coupon collector in the compilation.
pub const COMPILATION_FAIL_PROB: f64 = 1.0 / 6.0;

pub fn symmetrize(randomizers: &[Mechanism], coin: CoinModel) -> Result<SymmetricCompilation> {
    let first = randomizers
        .first()
        .ok_or_else(|| invalid("randomizers", "empty list"))?;
    if let Some(bad) = randomizers.iter().find(|r| r.inputs() != first.inputs()) {
        return Err(invalid(
            "randomizers",
            format!(
                "input alphabets differ: {:?} vs {:?}",
                first.inputs(),
                bad.inputs()
            ),
        ));
    }
    let n = randomizers.len();
    let n_prime = coupon_rounds(n as u64, COMPILATION_FAIL_PROB)?;
    let combined = match coin {
        CoinModel::Public => CompiledRandomizer::Public(randomizers.to_vec()),
        CoinModel::Private => {
            let w = 1.0 / n as f64;
            let outputs = randomizers
                .iter()
                .enumerate()
                .flat_map(|(j, r)| r.outputs().iter().map(move |y| format!("{j}:{y}")))
                .collect();
            let rows = (0..first.num_inputs())
                .map(|x| {
                    let mass = randomizers
                        .iter()
                        .flat_map(|r| r.row(x).mass().iter().map(|p| w * p))
                        .collect();
                    Dist::from_computed(mass)
                })
                .collect::<Result<Vec<_>>>()?;
            CompiledRandomizer::Private(Mechanism::from_dists(
                first.inputs().to_vec(),
                outputs,
                rows,
            )?)
        }
    };
    Ok(SymmetricCompilation { combined, n_prime })
}

/// `ceil(n ln(n / fail_prob))` draws; by the union bound
/// `n (1 - 1/n)^n' <= n e^{-n'/n} <= fail_prob`, so every index in `[n]` is
/// drawn at least once except with probability `fail_prob`.
pub fn coupon_rounds(n: u64, fail_prob: f64) -> Result<u64> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    if !(fail_prob > 0.0 && fail_prob < 1.0) {
        return Err(invalid(
            "fail_prob",
            format!("{fail_prob} is outside (0, 1)"),
        ));
    }
    let rounds = (n as f64 * (n as f64 / fail_prob).ln()).ceil();
    Ok((rounds as u64).max(1))
}

// ---------------------------------------------------------------------------
// Grouposition

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupositionParams {
    /// Number of differing entries.
    pub k: u32,
    /// Per-randomizer pure budget.
    pub eps: f64,
    /// Tail probability of the privacy loss.
    pub delta_prime: f64,
    /// Per-randomizer additive term (approximate variant only).
    pub delta: f64,
}

impl GroupositionParams {
    pub fn new(k: u32, eps: f64, delta_prime: f64, delta: f64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k", "must be at least 1"));
        }
        check_eps("eps", eps)?;
        if !(delta_prime > 0.0 && delta_prime <= 1.0) {
            return Err(invalid(
                "delta_prime",
                format!("{delta_prime} is outside (0, 1]"),
            ));
        }
        check_unit("delta", delta)?;
        Ok(Self {
            k,
            eps,
            delta_prime,
            delta,
        })
    }
}

/// `eps' = k eps^2 / 2 + eps sqrt(2 k ln(1/delta'))`.
pub fn grouposition_eps(params: &GroupositionParams) -> Result<f64> {
    let p = GroupositionParams::new(params.k, params.eps, params.delta_prime, params.delta)?;
    let k = p.k as f64;
    Ok(k * p.eps * p.eps / 2.0 + p.eps * (2.0 * k * (1.0 / p.delta_prime).ln()).sqrt())
}

/// Approximate-LDP grouposition: `(eps', delta + k delta')`.
pub fn grouposition_approx(params: &GroupositionParams) -> Result<(f64, f64)> {
    let eps = grouposition_eps(params)?;
    Ok((eps, params.delta + params.k as f64 * params.delta_prime))
}

/// Output distribution of independent randomizers each run on its own input.
pub fn product_row(coords: &[(&Mechanism, usize)]) -> Result<Dist> {
    let mut acc = Dist::point(1, 0)?;
    for (m, x) in coords {
        m.check_input(*x)?;
        acc = acc.product(m.row(*x));
    }
    Ok(acc)
}

/// Exact `Pr_{y ~ A(X)}[L(y) > eps']` for the product mechanism `A` where
/// coordinate `i` uses `randomizer` on `left[i]` versus `right[i]`.
pub fn grouposition_exact_tail(
    randomizer: &Mechanism,
    left: &[usize],
    right: &[usize],
    eps_prime: f64,
) -> Result<f64> {
    if left.len() != right.len() {
        return Err(Error::AlphabetMismatch {
            left: left.len(),
            right: right.len(),
        });
    }
    let p = product_row(&left.iter().map(|&x| (randomizer, x)).collect::<Vec<_>>())?;
    let q = product_row(&right.iter().map(|&x| (randomizer, x)).collect::<Vec<_>>())?;
    privacy_loss_tail(&p, &q, eps_prime)
}

// ---------------------------------------------------------------------------
// Composition of randomizers

/// Pure budget of `R2 o R1` for an `eps1`-LDP `R1` and `eps2`-LDP `R2`:
/// `ln((e^{eps1+eps2} + 1) / (e^eps1 + e^eps2))`.
pub fn compose_eps(eps1: f64, eps2: f64) -> Result<f64> {
    check_eps("eps1", eps1)?;
    check_eps("eps2", eps2)?;
    Ok((log_add_exp(eps1 + eps2, 0.0) - log_add_exp(eps1, eps2)).max(0.0))
}

fn binary_rr_composed_eps(p0: f64, p1: f64, keep: f64, flip: f64) -> f64 {
    // R1(0) = (p0, 1-p0), R1(1) = (p1, 1-p1), then RR with keep/flip.
    let out = |p: f64| [p * keep + (1.0 - p) * flip, p * flip + (1.0 - p) * keep];
    let (a, b) = (out(p0), out(p1));
    max_log_ratio_slices(&a, &b).max(max_log_ratio_slices(&b, &a))
}

fn composition_feasible(p0: f64, p1: f64, bound: f64) -> bool {
    let ok = |a: f64, b: f64| a <= bound * b * (1.0 + 1e-12) + 1e-300;
    ok(p0, p1) && ok(p1, p0) && ok(1.0 - p0, 1.0 - p1) && ok(1.0 - p1, 1.0 - p0)
}

/// Grid search for the worst-case composition: `R1` ranges over binary
/// `eps1`-LDP randomizers `(p0, p1)`, `R2` is binary randomized response with
/// parameter `eps2`. `p0` runs over a grid of `grid + 1` points (then a
/// refinement of the same size around the best one); for each `p0` the
/// feasible `p1` form an interval, and since every output log-ratio is
/// monotone in `p1` only its two endpoints need checking. Returns the largest
/// audited pure budget found.
pub fn compose_tightness_search(eps1: f64, eps2: f64, grid: usize) -> Result<f64> {
    check_eps("eps1", eps1)?;
    check_eps("eps2", eps2)?;
    if grid < 2 {
        return Err(invalid("grid", "must be at least 2"));
    }
    let (up, down) = (eps1.exp(), (-eps1).exp());
    let keep = 1.0 / (1.0 + (-eps2).exp());
    let flip = 1.0 / (1.0 + eps2.exp());
    let best_at = |p0: f64| {
        let lo = (p0 * down).max(1.0 - (1.0 - p0) * up).clamp(0.0, 1.0);
        let hi = (p0 * up).min(1.0 - (1.0 - p0) * down).clamp(0.0, 1.0);
        [lo, hi]
            .into_iter()
            .filter(|&p1| composition_feasible(p0, p1, up))
            .map(|p1| binary_rr_composed_eps(p0, p1, keep, flip))
            .fold(0.0f64, f64::max)
    };
    let scan = |from: f64, to: f64| {
        (0..=grid)
            .map(|i| from + (to - from) * i as f64 / grid as f64)
            .map(|p0| (best_at(p0), p0))
            .fold((0.0f64, from), |a, b| if b.0 > a.0 { b } else { a })
    };
    let (coarse, p0) = scan(0.0, 1.0);
    let h = 1.0 / grid as f64;
    let (fine, _) = scan((p0 - h).max(0.0), (p0 + h).min(1.0));
    Ok(coarse.max(fine))
}

// ---------------------------------------------------------------------------
// Purification

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurificationParams {
    pub eps: f64,
    pub delta: f64,
    pub n: u64,
    /// Number of rounds `T`.
    pub t: u64,
}

/// Admissible real range `[5 ln(1/eps), (1 - e^-eps) / (4 delta n e^eps)]`
/// for the round count (upper end infinite when `delta = 0`).
pub fn purification_t_range(eps: f64, delta: f64, n: u64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps <= 0.25) {
        return Err(invalid("eps", format!("{eps} is outside (0, 1/4]")));
    }
    check_unit("delta", delta)?;
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    let lo = 5.0 * (1.0 / eps).ln();
    let hi = if delta == 0.0 {
        f64::INFINITY
    } else {
        (-(-eps).exp_m1()) / (4.0 * delta * n as f64 * eps.exp())
    };
    if lo.ceil() > hi {
        return Err(Error::Infeasible(format!(
            "no integer round count T in [{lo}, {hi}]"
        )));
    }
    Ok((lo, hi))
}

impl PurificationParams {
    pub fn new(eps: f64, delta: f64, n: u64, t: u64) -> Result<Self> {
        let (lo, hi) = purification_t_range(eps, delta, n)?;
        let tf = t as f64;
        if tf < lo || tf > hi {
            return Err(invalid(
                "t",
                format!("{t} is outside the feasible range [{lo}, {hi}]"),
            ));
        }
        Ok(Self { eps, delta, n, t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurificationBounds {
    /// Each purified randomizer is pure `10 eps`-LDP.
    pub ldp_eps: f64,
    /// Total variation between original and purified message distributions.
    pub tv_bound: f64,
    /// Bits each user sends, `log2 T`.
    pub comm_bits: f64,
    /// `T * sum r_i` public random bits, when per-randomizer bit counts are given.
    pub public_random_bits: Option<u64>,
}

pub fn purification_bounds(
    params: &PurificationParams,
    random_bits: Option<&[u64]>,
) -> Result<PurificationBounds> {
    let PurificationParams { eps, delta, n, t } =
        PurificationParams::new(params.eps, params.delta, params.n, params.t)?;
    let tf = t as f64;
    let tail = (0.5 + eps).powf(tf);
    let leak = 6.0 * tf * delta * eps.exp() / (-(-eps).exp_m1());
    Ok(PurificationBounds {
        ldp_eps: 10.0 * eps,
        tv_bound: n as f64 * (tail + leak),
        comm_bits: tf.log2(),
        public_random_bits: random_bits.map(|bits| t * bits.iter().sum::<u64>()),
    })
}

// ---------------------------------------------------------------------------

/// `(1 + e^{x+y}) / (e^x + e^y) <= exp(xy / 2)` within a relative slack of 1e-12.
pub fn appendix_inequality_check(x: f64, y: f64) -> Result<bool> {
    check_eps("x", x)?;
    check_eps("y", y)?;
    let lhs = log_add_exp(x + y, 0.0) - log_add_exp(x, y);
    let rhs = x * y / 2.0;
    Ok(lhs <= rhs + 1e-12 * rhs.abs().max(1.0))
}
