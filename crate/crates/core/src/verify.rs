//! Brute-force property suites over every bound in the crate.
//!
//! Each check runs a family of instances and keeps the worst one. A record
//! passes when `margin >= -tolerance`, where `margin` is positive when the
//! claim holds with room to spare. Randomized families draw from
//! [`rng_for`](crate::random::rng_for) with a per-check tag, so a report
//! depends only on the seed. Enumeration caps are fixed here rather than
//! read from the environment for the same reason.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::audit::{
    audit_central, audit_deletion_ldp, audit_pure, audit_replacement_ldp, hockey_stick, tv_distance,
};
use crate::converters::{
    approx_to_pure_finite, leaky_rr_mixture, pure_to_approx, rr_decompose_pure, verify_leaky_rr,
};
use crate::dist::{Dist, PrivacyBudget};
use crate::error::{invalid, Result};
use crate::ldp::{
    build_counterexample, compose_eps, compose_tightness_search, counterexample_deletion_delta,
    counterexample_delta_cap, coupon_rounds, deletion_to_replacement_budget, grouposition_eps,
    grouposition_exact_tail, replacement_to_deletion, symmetrize, trim_to_pure_deletion, CoinModel,
    CompiledRandomizer, GroupositionParams, COMPILATION_FAIL_PROB,
};
use crate::limits::EnumLimits;
use crate::mechanism::Mechanism;
use crate::random::{random_dist, random_mechanism, random_sparse_mechanism, rng_for};
use crate::shuffle::{
    amplification_formula, check_amplification_vs_exact_with_limits, shuffle_to_ldp_budget,
    ShuffleAudit,
};
use crate::subsample::{
    build_subsampled_with_limits, subsample_budget, verify_subsample_tightness, DatasetSpace,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Dp,
    Ldp,
    Shuffle,
    Subsample,
    Counterexample,
    Appendix,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::All,
        Suite::Dp,
        Suite::Ldp,
        Suite::Shuffle,
        Suite::Subsample,
        Suite::Counterexample,
        Suite::Appendix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Dp => "dp",
            Suite::Ldp => "ldp",
            Suite::Shuffle => "shuffle",
            Suite::Subsample => "subsample",
            Suite::Counterexample => "counterexample",
            Suite::Appendix => "appendix",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                invalid(
                    "suite",
                    format!("`{s}` is not one of all, dp, ldp, shuffle, subsample, counterexample, appendix"),
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The property being checked, in words.
    pub claim: String,
    pub inputs: Value,
    /// Bound (or exact value) the claim predicts for the worst instance.
    pub expected: f64,
    pub achieved: f64,
    pub margin: f64,
    pub tolerance: f64,
    /// Instances checked.
    pub count: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    /// Not written to the report file, which must be byte-stable.
    pub wall_time: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Header line, one line per check, summary line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        let header = json!({
            "type": "header",
            "suite": self.suite,
            "seed": self.seed,
            "generator": "ChaCha8",
            "version": env!("CARGO_PKG_VERSION"),
        });
        writeln!(w, "{header}")?;
        for c in &self.checks {
            let mut line = serde_json::to_value(c)?;
            line.as_object_mut()
                .expect("struct serializes to an object")
                .insert("type".into(), "check".into());
            writeln!(w, "{line}")?;
        }
        let failed = self.failures().count();
        let summary = json!({
            "type": "summary",
            "checks": self.checks.len(),
            "passed": self.checks.len() - failed,
            "failed": failed,
            "pass": failed == 0,
        });
        writeln!(w, "{summary}")?;
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)?;
        Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
    }

    /// Fixed-width table for `--pretty`.
    pub fn to_table(&self) -> String {
        let mut s = format!("suite {} seed {}\n", self.suite, self.seed);
        s.push_str(&format!(
            "{:<44} {:>7} {:>14} {:>14} {:>12}  {}\n",
            "check", "count", "expected", "achieved", "margin", "pass"
        ));
        for c in &self.checks {
            s.push_str(&format!(
                "{:<44} {:>7} {:>14.8e} {:>14.8e} {:>12.4e}  {}\n",
                c.id,
                c.count,
                c.expected,
                c.achieved,
                c.margin,
                if c.pass { "ok" } else { "FAIL" }
            ));
        }
        s
    }
}

/// Runs `suite` with `seed`.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Report> {
    let start = Instant::now();
    let checks = match suite {
        Suite::All => {
            let mut all = Vec::new();
            for part in [
                dp_checks,
                ldp_checks,
                counterexample_checks,
                shuffle_checks,
                subsample_checks,
                appendix_checks,
            ] {
                all.extend(part(seed)?);
            }
            all
        }
        Suite::Dp => dp_checks(seed)?,
        Suite::Ldp => ldp_checks(seed)?,
        Suite::Shuffle => shuffle_checks(seed)?,
        Suite::Subsample => subsample_checks(seed)?,
        Suite::Counterexample => counterexample_checks(seed)?,
        Suite::Appendix => appendix_checks(seed)?,
    };
    Ok(Report {
        suite,
        seed,
        checks,
        wall_time: start.elapsed(),
    })
}

/// A single subsampling tightness instance as a one-check report.
pub fn run_subsample_instance(eps: f64, n: usize, m: usize) -> Result<Report> {
    let start = Instant::now();
    let t = verify_subsample_tightness(eps, n, m)?;
    let mut w = Worst::default();
    w.equal(t.bound, t.audited_eps);
    let check = w.record(
        "subsample.tightness",
        "worst-case base audits exactly to ln(1 + (m/n)(e^eps - 1))",
        json!({"n": n, "m": m, "eps": eps}),
        1e-9,
    );
    Ok(Report {
        suite: Suite::Subsample,
        seed: 0,
        checks: vec![check],
        wall_time: start.elapsed(),
    })
}

/// Worst instance seen so far.
struct Worst {
    expected: f64,
    achieved: f64,
    margin: f64,
    count: u64,
}

impl Default for Worst {
    fn default() -> Self {
        Self {
            expected: 0.0,
            achieved: 0.0,
            margin: f64::INFINITY,
            count: 0,
        }
    }
}

impl Worst {
    fn observe(&mut self, expected: f64, achieved: f64, margin: f64) {
        self.count += 1;
        // a broken instance stays the worst
        if self.margin.is_nan() {
            return;
        }
        if margin.is_nan() || margin < self.margin {
            self.expected = expected;
            self.achieved = achieved;
            self.margin = margin;
        }
    }

    /// Claim: `achieved <= bound`.
    fn upper(&mut self, bound: f64, achieved: f64) {
        self.observe(bound, achieved, bound - achieved);
    }

    /// Claim: `achieved >= floor`.
    fn lower(&mut self, floor: f64, achieved: f64) {
        self.observe(floor, achieved, achieved - floor);
    }

    /// Claim: `achieved == expected`.
    fn equal(&mut self, expected: f64, achieved: f64) {
        self.observe(expected, achieved, 0.0 - (achieved - expected).abs());
    }

    /// An instance where the construction itself failed.
    fn broken(&mut self, expected: f64) {
        self.observe(expected, f64::NAN, f64::NAN);
    }

    fn record(self, id: &str, claim: &str, inputs: Value, tolerance: f64) -> CheckRecord {
        let margin = if self.count == 0 {
            f64::NAN
        } else {
            self.margin
        };
        CheckRecord {
            id: id.into(),
            claim: claim.into(),
            inputs,
            expected: self.expected,
            achieved: self.achieved,
            margin,
            tolerance,
            count: self.count,
            pass: margin >= -tolerance,
        }
    }
}

const AUDIT_TOL: f64 = 1e-9;

fn subset_hockey_stick(p: &Dist, q: &Dist, eps: f64) -> f64 {
    let scale = eps.exp();
    (0u32..1 << p.len())
        .map(|set| {
            (0..p.len())
                .filter(|y| set >> y & 1 == 1)
                .map(|y| p.get(y) - scale * q.get(y))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

fn max_row_tv(a: &Mechanism, b: &Mechanism) -> Result<f64> {
    a.rows()
        .iter()
        .zip(b.rows())
        .try_fold(0.0f64, |acc, (x, y)| Ok(acc.max(tv_distance(x, y)?)))
}

fn dp_checks(seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();

    let mut rng = rng_for(seed, "dp.hockey_stick.subsets");
    let mut w = Worst::default();
    for _ in 0..100 {
        let k = rng.gen_range(1..=12);
        let p = random_dist(&mut rng, k, 0.0, 0.2);
        let q = random_dist(&mut rng, k, 0.0, 0.2);
        for eps in [0.0, 0.3, 1.0, 3.0] {
            w.equal(subset_hockey_stick(&p, &q, eps), hockey_stick(&p, &q, eps)?);
        }
    }
    out.push(w.record(
        "dp.hockey_stick.subsets",
        "closed-form hockey-stick equals the max over all output subsets",
        json!({"pairs": 100, "max_outputs": 12, "eps": [0.0, 0.3, 1.0, 3.0]}),
        1e-12,
    ));

    let mut rng = rng_for(seed, "dp.pure_to_approx");
    let mut w = Worst::default();
    for _ in 0..200 {
        let inputs = rng.gen_range(2..=4);
        let outputs = rng.gen_range(2..=5);
        let m = random_mechanism(&mut rng, inputs, outputs);
        let eps0 = audit_pure(&m)?;
        for delta in [0.01, 0.1, eps0.min(0.5)] {
            if delta > eps0 {
                continue;
            }
            let target = pure_to_approx(eps0, delta)?;
            w.upper(target.delta, audit_replacement_ldp(&m, target.eps)?);
        }
    }
    out.push(w.record(
        "dp.pure_to_approx",
        "a pure eps0 mechanism has audited delta <= d at eps0 - d",
        json!({"mechanisms": 200, "delta": [0.01, 0.1, "min(0.5, eps0)"]}),
        AUDIT_TOL,
    ));

    let mut rng = rng_for(seed, "dp.approx_to_pure");
    let (mut tv, mut pure, mut binary) = (Worst::default(), Worst::default(), Worst::default());
    for _ in 0..200 {
        let inputs = rng.gen_range(2..=4);
        let outputs = rng.gen_range(2..=5);
        let a = random_sparse_mechanism(&mut rng, inputs, outputs);
        let eps = rng.gen_range(0.0..1.5);
        let delta = audit_replacement_ldp(&a, eps)?;
        for eta in [0.05, 0.2] {
            let (a_prime, eps_prime) = approx_to_pure_finite(&a, eps, delta, eta)?;
            tv.upper(eta, max_row_tv(&a, &a_prime)?);
            let audited = audit_pure(&a_prime)?;
            pure.upper(eps_prime, audited);
            if a.num_outputs() == 2 {
                binary.upper(eps + 2.0 * delta / eta, audited);
            }
        }
    }
    let inputs = json!({"mechanisms": 200, "eta": [0.05, 0.2]});
    out.push(tv.record(
        "dp.approx_to_pure.tv",
        "mixing with uniform at weight eta moves each row by at most eta",
        inputs.clone(),
        AUDIT_TOL,
    ));
    out.push(pure.record(
        "dp.approx_to_pure.eps",
        "the mixture is pure eps + ln(1 + delta k e^-eps / eta)",
        inputs.clone(),
        AUDIT_TOL,
    ));
    out.push(binary.record(
        "dp.approx_to_pure.binary",
        "with two outputs the mixture is pure eps + 2 delta / eta",
        inputs,
        AUDIT_TOL,
    ));

    let mut rng = rng_for(seed, "dp.rr_decompose");
    let mut w = Worst::default();
    for _ in 0..200 {
        let outputs = rng.gen_range(2..=6);
        let m = random_mechanism(&mut rng, 2, outputs);
        let eps = audit_pure(&m)?;
        match rr_decompose_pure(&m, 0, 1, None) {
            Ok(q) => {
                let a = 1.0 / (1.0 + (-eps).exp());
                let b = 1.0 - a;
                for y in 0..m.num_outputs() {
                    let (q0, q1) = (q.row(0).get(y), q.row(1).get(y));
                    w.equal(m.row(0).get(y), a * q0 + b * q1);
                    w.equal(m.row(1).get(y), b * q0 + a * q1);
                }
            }
            Err(_) => w.broken(0.0),
        }
    }
    out.push(w.record(
        "dp.rr_decompose.roundtrip",
        "a binary pure-LDP pair is randomized response applied to valid rows Q(0), Q(1)",
        json!({"mechanisms": 200}),
        AUDIT_TOL,
    ));

    let mut rng = rng_for(seed, "dp.leaky_rr");
    let mut w = Worst::default();
    for _ in 0..100 {
        let outputs = rng.gen_range(2..=5);
        let q = random_sparse_mechanism(&mut rng, 4, outputs);
        let budget = PrivacyBudget::new(rng.gen_range(0.0..2.0), rng.gen_range(0.0..0.3))?;
        let r = leaky_rr_mixture(&q, budget)?;
        w.upper(0.0, verify_leaky_rr(&r, 0, 1, &q, budget)?.max_residual);
    }
    out.push(w.record(
        "dp.leaky_rr.verify",
        "leaky randomized-response mixtures are recognized by the verifier",
        json!({"instances": 100}),
        AUDIT_TOL,
    ));
    Ok(out)
}

/// Exact probability that `rounds` uniform draws from `[n]` miss some index.
fn coupon_miss_probability(n: u64, rounds: u64) -> f64 {
    // inclusion-exclusion; terms shrink fast once rounds >= n ln n
    let mut total = 0.0;
    let mut binom = 1.0;
    for j in 1..=n {
        binom *= (n - j + 1) as f64 / j as f64;
        let term = binom * (1.0 - j as f64 / n as f64).powf(rounds as f64);
        total += if j % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    total
}

fn ldp_checks(seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();

    let mut rng = rng_for(seed, "ldp.replacement_to_deletion");
    let mut w = Worst::default();
    for _ in 0..200 {
        let inputs = rng.gen_range(2..=4);
        let outputs = rng.gen_range(2..=5);
        let r = random_sparse_mechanism(&mut rng, inputs, outputs);
        let eps = rng.gen_range(0.0..2.0);
        let delta = audit_replacement_ldp(&r, eps)?;
        for x0 in 0..r.num_inputs() {
            match replacement_to_deletion(&r, x0, eps, delta) {
                Ok((r0, _)) => w.upper(delta, audit_deletion_ldp(&r, &r0, eps)?),
                Err(_) => w.broken(delta),
            }
        }
    }
    out.push(w.record(
        "ldp.replacement_to_deletion",
        "replacement (eps, delta) is deletion (eps, delta) with any row as reference",
        json!({"mechanisms": 200}),
        AUDIT_TOL,
    ));

    let mut rng = rng_for(seed, "ldp.deletion_to_replacement");
    let mut w = Worst::default();
    for _ in 0..500 {
        let k = rng.gen_range(2..=5);
        let inputs = rng.gen_range(2..=4);
        let r = random_sparse_mechanism(&mut rng, inputs, k);
        let r0 = random_dist(&mut rng, k, 0.0, 0.2);
        let eps = rng.gen_range(0.0..1.5);
        let delta = audit_deletion_ldp(&r, &r0, eps)?;
        let b = deletion_to_replacement_budget(eps, delta)?;
        w.upper(b.delta, audit_replacement_ldp(&r, b.eps)?);
    }
    out.push(w.record(
        "ldp.deletion_to_replacement",
        "deletion (eps, delta) implies replacement (2 eps, (e^eps + 1) delta)",
        json!({"instances": 500}),
        AUDIT_TOL,
    ));

    let mut rng = rng_for(seed, "ldp.trim");
    let (mut pure, mut moved) = (Worst::default(), Worst::default());
    for _ in 0..500 {
        let k = rng.gen_range(2..=5);
        let inputs = rng.gen_range(2..=4);
        let r = random_sparse_mechanism(&mut rng, inputs, k);
        let r0 = random_dist(&mut rng, k, 0.0, 0.1);
        let eps = rng.gen_range(0.0..1.5);
        let delta = audit_deletion_ldp(&r, &r0, eps)?;
        match trim_to_pure_deletion(&r, &r0, eps, delta) {
            Ok(t) => {
                pure.upper(0.0, audit_deletion_ldp(&t, &r0, eps)?);
                moved.upper(delta, max_row_tv(&r, &t)?);
            }
            Err(_) => {
                pure.broken(0.0);
                moved.broken(delta);
            }
        }
    }
    let inputs = json!({"instances": 500});
    out.push(pure.record(
        "ldp.trim.pure",
        "the trimmed randomizer is pure eps-deletion LDP",
        inputs.clone(),
        AUDIT_TOL,
    ));
    out.push(moved.record(
        "ldp.trim.tv",
        "trimming moves each row by at most delta in total variation",
        inputs,
        AUDIT_TOL,
    ));

    let mut rng = rng_for(seed, "ldp.symmetrize");
    let mut w = Worst::default();
    for _ in 0..100 {
        let inputs = rng.gen_range(2..=3);
        let count = rng.gen_range(1..=4);
        let rs: Vec<Mechanism> = (0..count)
            .map(|_| {
                let outputs = rng.gen_range(2..=3);
                random_mechanism(&mut rng, inputs, outputs)
            })
            .collect();
        let worst = rs
            .iter()
            .map(audit_pure)
            .try_fold(0.0f64, |a, e| Ok::<_, crate::error::Error>(a.max(e?)))?;
        match symmetrize(&rs, CoinModel::Private)?.combined {
            CompiledRandomizer::Private(m) => w.equal(worst, audit_pure(&m)?),
            CompiledRandomizer::Public(_) => w.broken(worst),
        }
    }
    out.push(w.record(
        "ldp.symmetrize.pure",
        "the private-coin compilation has the largest pure budget of its parts",
        json!({"lists": 100, "max_randomizers": 4}),
        AUDIT_TOL,
    ));

    let mut w = Worst::default();
    for n in [1u64, 2, 10, 100, 1000] {
        let rounds = coupon_rounds(n, COMPILATION_FAIL_PROB)?;
        w.upper(COMPILATION_FAIL_PROB, coupon_miss_probability(n, rounds));
    }
    out.push(w.record(
        "ldp.coupon.exact",
        "ceil(n ln(6n)) draws miss some index with probability at most 1/6",
        json!({"n": [1, 2, 10, 100, 1000]}),
        0.0,
    ));

    let mut w = Worst::default();
    for eps in [0.2, 0.5] {
        let rr = Mechanism::randomized_response(eps)?;
        for delta_prime in [0.1, 0.01] {
            for k in 1..=6u32 {
                let params = GroupositionParams::new(k, eps, delta_prime, 0.0)?;
                let eps_prime = grouposition_eps(&params)?;
                let (zeros, ones) = (vec![0; k as usize], vec![1; k as usize]);
                w.upper(
                    delta_prime,
                    grouposition_exact_tail(&rr, &zeros, &ones, eps_prime)?,
                );
                w.upper(
                    delta_prime,
                    grouposition_exact_tail(&rr, &ones, &zeros, eps_prime)?,
                );
            }
        }
    }
    out.push(w.record(
        "ldp.grouposition.tail",
        "privacy loss of k differing randomizers exceeds k eps^2/2 + eps sqrt(2k ln(1/d')) with probability <= d'",
        json!({"k": [1, 6], "eps": [0.2, 0.5], "delta_prime": [0.1, 0.01]}),
        AUDIT_TOL,
    ));

    let levels = [0.25, 0.5, 1.0, 2.0];
    let (mut below, mut attains) = (Worst::default(), Worst::default());
    for &e1 in &levels {
        for &e2 in &levels {
            let bound = compose_eps(e1, e2)?;
            let found = compose_tightness_search(e1, e2, 400)?;
            below.upper(bound, found);
            attains.lower(bound - 1e-3, found);
        }
    }
    let inputs = json!({"eps": levels, "grid": 400});
    out.push(below.record(
        "ldp.compose.sound",
        "no searched composition exceeds ln((e^{a+b} + 1)/(e^a + e^b))",
        inputs.clone(),
        AUDIT_TOL,
    ));
    out.push(attains.record(
        "ldp.compose.tight",
        "the search gets within 1e-3 of the composition bound",
        inputs,
        0.0,
    ));

    let (mut vs_min, mut vs_product) = (Worst::default(), Worst::default());
    for i in 1..=50 {
        for j in 1..=50 {
            let (a, b) = (i as f64 / 10.0, j as f64 / 10.0);
            let c = compose_eps(a, b)?;
            vs_min.upper(a.min(b), c);
            vs_product.upper(a * b / 2.0, c);
        }
    }
    let inputs = json!({"grid": "50 x 50 over (0, 5]"});
    out.push(vs_min.record(
        "ldp.compose.below_min",
        "composition is no worse than either randomizer",
        inputs.clone(),
        1e-12,
    ));
    out.push(vs_product.record(
        "ldp.compose.below_half_product",
        "composition is at most eps1 eps2 / 2",
        inputs,
        1e-12,
    ));
    Ok(out)
}

fn counterexample_checks(_seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let (eps, delta) = (0.25f64, 1.0f64 / 6.0);
    let r = build_counterexample(eps, delta)?;
    let uniform = Dist::uniform(3)?;
    let at = json!({"eps": eps, "delta": delta});

    let mut w = Worst::default();
    w.upper(delta, audit_deletion_ldp(&r, &uniform, eps)?);
    out.push(w.record(
        "counterexample.deletion",
        "the randomizer is (eps, delta)-deletion LDP against the uniform reference",
        at.clone(),
        AUDIT_TOL,
    ));

    let (p1, p0) = (r.row(1).get(1), r.row(0).get(1));
    let mut w = Worst::default();
    w.equal(0.0, p1 - (2.0 * eps).exp() * p0 - delta * (1.0 + eps.exp()));
    out.push(w.record(
        "counterexample.outcome_2",
        "Pr[R(1) = 2] - e^{2 eps} Pr[R(0) = 2] equals (1 + e^eps) delta",
        at.clone(),
        1e-12,
    ));

    let mut w = Worst::default();
    w.lower((2.0 * eps).exp() * p0 + 2.0 * delta, p1);
    out.push(w.record(
        "counterexample.refutation",
        "Pr[R(1) = 2] exceeds e^{2 eps} Pr[R(0) = 2] + 2 delta, so (2 eps, 2 delta)-replacement fails",
        at.clone(),
        0.0,
    ));

    let mut w = Worst::default();
    let b = deletion_to_replacement_budget(eps, delta)?;
    w.equal(b.delta, audit_replacement_ldp(&r, b.eps)?);
    out.push(w.record(
        "counterexample.budget_met",
        "the replacement audit at 2 eps is exactly (e^eps + 1) delta",
        at.clone(),
        AUDIT_TOL,
    ));

    let (mut pure, mut moved) = (Worst::default(), Worst::default());
    match trim_to_pure_deletion(&r, &uniform, eps, delta) {
        Ok(t) => {
            pure.upper(0.0, audit_deletion_ldp(&t, &uniform, eps)?);
            moved.upper(delta, max_row_tv(&r, &t)?);
        }
        Err(_) => {
            pure.broken(0.0);
            moved.broken(delta);
        }
    }
    out.push(pure.record(
        "counterexample.trim.pure",
        "trimming against the uniform reference gives pure eps-deletion LDP",
        at.clone(),
        AUDIT_TOL,
    ));
    out.push(moved.record(
        "counterexample.trim.tv",
        "trimming moves each row by at most delta",
        at,
        AUDIT_TOL,
    ));

    let grid = || (1..=20).flat_map(|i| (1..=20).map(move |j| (i as f64 / 40.0, j as f64 / 100.0)));
    let (mut equality, mut refuted) = (Worst::default(), Worst::default());
    let (mut exact, mut within_cap) = (Worst::default(), Worst::default());
    for (eps, delta) in grid() {
        let r = build_counterexample(eps, delta)?;
        let replacement = audit_replacement_ldp(&r, 2.0 * eps)?;
        equality.equal((eps.exp() + 1.0) * delta, replacement);
        refuted.lower(2.0 * delta, replacement);
        let deletion = audit_deletion_ldp(&r, &uniform, eps)?;
        exact.equal(counterexample_deletion_delta(eps, delta)?, deletion);
        if delta <= counterexample_delta_cap(eps) {
            within_cap.upper(delta, deletion);
        }
    }
    let inputs = json!({"eps": "i/40, i = 1..20", "delta": "j/100, j = 1..20"});
    out.push(equality.record(
        "counterexample.grid.budget_met",
        "replacement audit at 2 eps equals (e^eps + 1) delta at every grid point",
        inputs.clone(),
        AUDIT_TOL,
    ));
    out.push(refuted.record(
        "counterexample.grid.refutation",
        "replacement audit at 2 eps exceeds 2 delta at every grid point",
        inputs.clone(),
        0.0,
    ));
    out.push(exact.record(
        "counterexample.grid.deletion_exact",
        "deletion audit equals max(delta, (e^eps - 1)(e^eps - 2)/3 + e^eps delta)",
        inputs.clone(),
        AUDIT_TOL,
    ));
    out.push(within_cap.record(
        "counterexample.grid.deletion",
        "deletion audit is at most delta wherever delta <= (2 - e^eps)/3",
        inputs,
        AUDIT_TOL,
    ));
    Ok(out)
}

fn shuffle_checks(seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let limits = EnumLimits {
        max_users: 200,
        ..EnumLimits::default()
    };

    let mut rng = rng_for(seed, "shuffle.to_ldp");
    let (mut to_ldp, mut persist, mut monotone) =
        (Worst::default(), Worst::default(), Worst::default());
    for i in 0..50 {
        let (inputs, outputs) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let r = if i % 2 == 0 {
            random_mechanism(&mut rng, inputs, outputs)
        } else {
            random_sparse_mechanism(&mut rng, inputs, outputs)
        };
        let n = 2 + (i % 7) as u32;
        let audit = ShuffleAudit::with_limits(&r, n, &limits)?;
        let eps_s = rng.gen_range(0.0..2.0);
        let delta_s = audit.delta_at(eps_s)?;
        let b = shuffle_to_ldp_budget(eps_s, delta_s, n as u64)?;
        to_ldp.upper(b.delta, audit_replacement_ldp(&r, b.eps)?);

        let eps_l = audit_pure(&r)?;
        if eps_l.is_finite() {
            persist.upper(0.0, audit.delta_at(eps_l)?);
        }
        let next = ShuffleAudit::with_limits(&r, n + 1, &limits)?;
        monotone.upper(audit.delta_at(eps_s)?, next.delta_at(eps_s)?);
    }
    let inputs = json!({"randomizers": 50, "n": [2, 8]});
    out.push(to_ldp.record(
        "shuffle.to_ldp",
        "an (eps, delta) shuffle protocol on n users has an (eps + ln n, delta)-LDP randomizer",
        inputs.clone(),
        AUDIT_TOL,
    ));
    out.push(persist.record(
        "shuffle.persistence",
        "shuffling an eps-LDP randomizer is eps-DP",
        inputs.clone(),
        AUDIT_TOL,
    ));
    out.push(monotone.record(
        "shuffle.monotone_in_n",
        "adding a user never increases the audited delta",
        inputs,
        1e-12,
    ));

    let mut w = Worst::default();
    for eps_l in [0.25, 0.5] {
        let rr = Mechanism::randomized_response(eps_l)?;
        for n in [100u32, 200] {
            let c = check_amplification_vs_exact_with_limits(&rr, n, 0.05, &limits)?;
            w.upper(c.delta, c.exact_delta);
        }
    }
    out.push(w.record(
        "shuffle.amplification",
        "randomized response shuffled at the amplification eps has delta <= 0.05",
        json!({"eps_l": [0.25, 0.5], "n": [100, 200], "delta": 0.05}),
        AUDIT_TOL,
    ));

    // below the admissible user count the formula is still evaluated and audited
    let mut w = Worst::default();
    for eps_l in [0.25, 0.5] {
        let rr = Mechanism::randomized_response(eps_l)?;
        for n in [40u32, 60] {
            let eps = amplification_formula(eps_l, 0.05, n as f64);
            w.upper(
                0.05,
                ShuffleAudit::with_limits(&rr, n, &limits)?.delta_at(eps)?,
            );
        }
    }
    out.push(w.record(
        "shuffle.amplification.small_n",
        "the amplification expression is also conservative at n = 40, 60 (outside its admissible range)",
        json!({"eps_l": [0.25, 0.5], "n": [40, 60], "delta": 0.05}),
        AUDIT_TOL,
    ));
    Ok(out)
}

fn subsample_checks(seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let limits = EnumLimits::default();

    let mut w = Worst::default();
    for (n, m) in [(2, 1), (3, 1), (4, 1), (4, 2)] {
        for eps in [0.5, 1.0] {
            let t = verify_subsample_tightness(eps, n, m)?;
            w.equal(t.bound, t.audited_eps);
        }
    }
    out.push(w.record(
        "subsample.tightness",
        "the worst-case base audits exactly to ln(1 + (m/n)(e^eps - 1))",
        json!({"nm": [[2, 1], [3, 1], [4, 1], [4, 2]], "eps": [0.5, 1.0]}),
        AUDIT_TOL,
    ));

    let mut rng = rng_for(seed, "subsample.sound");
    let mut w = Worst::default();
    for _ in 0..200 {
        let alphabet = rng.gen_range(2..=3);
        let m = rng.gen_range(1..=2);
        let n = rng.gen_range(m..=4);
        let small = DatasetSpace::new(alphabet, m);
        let outputs = rng.gen_range(2..=3);
        let base = random_sparse_mechanism(&mut rng, small.len(), outputs);
        let eps = rng.gen_range(0.0..1.5);
        let delta = audit_central(&base, &small.neighbors(), eps)?;
        let sub = build_subsampled_with_limits(&base, n, m, &limits)?;
        let b = subsample_budget(eps, delta, m as f64 / n as f64)?;
        let large = DatasetSpace::new(alphabet, n);
        w.upper(b.delta, audit_central(&sub, &large.neighbors(), b.eps)?);
    }
    out.push(w.record(
        "subsample.sound",
        "an (eps, delta) base on m of n records is (ln(1 + p(e^eps - 1)), p delta), p = m/n",
        json!({"bases": 200, "alphabet": [2, 3], "m": [1, 2], "n": [1, 4]}),
        AUDIT_TOL,
    ));

    let mut w = Worst::default();
    for eps in [0.1, 1.0, 3.0] {
        let mut prev = 0.0;
        for i in 1..=100 {
            let cur = subsample_budget(eps, 0.0, i as f64 / 100.0)?.eps;
            w.lower(prev, cur);
            prev = cur;
        }
    }
    out.push(w.record(
        "subsample.monotone",
        "the subsampled eps increases with the sampling probability",
        json!({"eps": [0.1, 1.0, 3.0], "p": "i/100"}),
        0.0,
    ));
    Ok(out)
}

fn appendix_checks(_seed: u64) -> Result<Vec<CheckRecord>> {
    let mut w = Worst::default();
    for i in 0..200 {
        for j in 0..200 {
            let (x, y) = (5.0 * i as f64 / 199.0, 5.0 * j as f64 / 199.0);
            // compose_eps is ln((1 + e^{x+y}) / (e^x + e^y)) in log space
            w.upper(x * y / 2.0, compose_eps(x, y)?);
        }
    }
    Ok(vec![w.record(
        "appendix.inequality",
        "(1 + e^{x+y}) / (e^x + e^y) <= e^{xy/2}, compared in log space",
        json!({"grid": "200 x 200 over [0, 5]^2"}),
        1e-12,
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn worst_tracks_smallest_margin() {
        let mut w = Worst::default();
        w.upper(1.0, 0.5);
        w.upper(1.0, 0.9);
        w.upper(1.0, 0.2);
        let r = w.record("x", "x", Value::Null, 0.0);
        assert_eq!((r.achieved, r.count, r.pass), (0.9, 3, true));
        assert!((r.margin - 0.1).abs() < 1e-15);

        let mut w = Worst::default();
        w.upper(1.0, 0.5);
        w.broken(1.0);
        w.upper(1.0, 2.0);
        let r = w.record("x", "x", Value::Null, 0.0);
        assert!(r.margin.is_nan() && !r.pass);
    }

    #[test]
    fn coupon_miss_probability_small_cases() {
        // two indices, three draws: miss iff all draws equal
        assert!((coupon_miss_probability(2, 3) - 0.25).abs() < 1e-15);
        assert_eq!(coupon_miss_probability(1, 1), 0.0);
    }

    #[test]
    fn counterexample_suite_reports_gap() {
        let report = run_suite(Suite::Counterexample, 0).unwrap();
        assert!(report.passed(), "{}", report.to_table());
        let refutation = report
            .checks
            .iter()
            .find(|c| c.id == "counterexample.refutation")
            .unwrap();
        assert!((refutation.margin - 0.047_337_569_447_956_86).abs() < 1e-12);
    }

    #[test]
    fn appendix_suite_counts_grid() {
        let report = run_suite(Suite::Appendix, 0).unwrap();
        assert_eq!(report.checks[0].count, 40_000);
        assert!(report.passed());
    }

    #[test]
    fn jsonl_is_deterministic() {
        let a = run_suite(Suite::Counterexample, 3)
            .unwrap()
            .to_jsonl_string()
            .unwrap();
        let b = run_suite(Suite::Counterexample, 3)
            .unwrap()
            .to_jsonl_string()
            .unwrap();
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        assert!(lines[0].contains("\"header\""));
        assert!(lines.last().unwrap().contains("\"summary\""));
    }
}
