//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::Command;
use std::time::Instant;

use dpcalc::audit::{audit_central, audit_deletion_ldp, hockey_stick, tv_distance};
use dpcalc::converters::{approx_to_pure_finite, rr_decompose_pure};
use dpcalc::ldp::{
    build_counterexample, compose_eps, compose_tightness_search, coupon_rounds,
    deletion_to_replacement_budget, grouposition_eps, grouposition_exact_tail,
    trim_to_pure_deletion, GroupositionParams,
};
use dpcalc::shuffle::{
    amplification_formula, audit_shuffle, check_amplification_vs_exact_with_limits,
    AmplificationParams,
};
use dpcalc::subsample::{
    build_subsampled_with_limits, subsample_budget, verify_subsample_tightness, DatasetSpace,
};
use dpcalc::{audit_pure, audit_replacement_ldp, Dist, EnumLimits, Mechanism, ShuffleAudit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_0000 + tag)
}

fn random_dist(rng: &mut ChaCha8Rng, k: usize, zero_prob: f64) -> Dist {
    loop {
        let v: Vec<f64> = (0..k)
            .map(|_| {
                if rng.gen_bool(zero_prob) {
                    0.0
                } else {
                    -rng.gen_range(1e-6f64..1.0).ln() + 0.01
                }
            })
            .collect();
        let s: f64 = v.iter().sum();
        if s > 0.0 {
            return Dist::new(v.iter().map(|x| x / s).collect()).unwrap();
        }
    }
}

fn random_mech(rng: &mut ChaCha8Rng, inputs: usize, outputs: usize, zero_prob: f64) -> Mechanism {
    let rows = (0..inputs)
        .map(|_| random_dist(rng, outputs, zero_prob).mass().to_vec())
        .collect();
    Mechanism::from_rows(rows).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn subset_max(p: &[f64], q: &[f64], eps: f64) -> f64 {
    (0u32..1 << p.len())
        .map(|s| {
            (0..p.len())
                .filter(|y| s >> y & 1 == 1)
                .map(|y| p[y] - eps.exp() * q[y])
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

fn c1_hockey_stick() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let k = r.gen_range(1..=12);
        let p = random_dist(&mut r, k, 0.2);
        let q = random_dist(&mut r, k, 0.2);
        for eps in [0.0, 0.3, 1.0, 3.0] {
            let fast = hockey_stick(&p, &q, eps).map_err(err)?;
            worst = worst.max((fast - subset_max(p.mass(), q.mass(), eps)).abs());
        }
    }
    ensure(
        worst <= 1e-12,
        format!("100 pairs x 4 eps, max |closed form - subset max| = {worst:.2e}"),
    )
}

fn c2_pure_to_approx() -> Outcome {
    let mut r = rng(2);
    let (mut checked, mut skipped, mut fails) = (0, 0, 0);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..200 {
        let (i, o) = (r.gen_range(2..=4), r.gen_range(2..=5));
        let m = random_mech(&mut r, i, o, 0.0);
        let eps0 = audit_pure(&m).map_err(err)?;
        for delta in [0.01, 0.1, eps0.min(0.5)] {
            if delta > eps0 {
                skipped += 1;
                continue;
            }
            let d = audit_replacement_ldp(&m, eps0 - delta).map_err(err)?;
            worst = worst.max(d - delta);
            checked += 1;
            if d > delta + 1e-12 {
                fails += 1;
            }
        }
    }
    ensure(
        fails == 0,
        format!("{checked} checks ({skipped} with delta > eps0 skipped), {fails} failures, max(audit - delta) = {worst:.3e}"),
    )
}

fn c3_approx_to_pure() -> Outcome {
    let mut r = rng(3);
    let (mut fails, mut count) = (0, 0);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..200 {
        let (i, k) = (r.gen_range(2..=4), r.gen_range(2..=5));
        let m = random_mech(&mut r, i, k, 0.2);
        let eps = r.gen_range(0.1..2.0);
        let delta = audit_replacement_ldp(&m, eps).map_err(err)?;
        for eta in [0.05, 0.2] {
            count += 1;
            let (a, _) = approx_to_pure_finite(&m, eps, delta, eta).map_err(err)?;
            let tv = (0..i)
                .map(|x| tv_distance(a.row(x), m.row(x)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?
                .into_iter()
                .fold(0.0, f64::max);
            let pure = audit_pure(&a).map_err(err)?;
            let bound = eps + (1.0 + delta * k as f64 * (-eps).exp() / eta).ln();
            let mut ok = tv <= eta + 1e-9 && pure <= bound + 1e-9;
            worst = worst.max(pure - bound);
            if k == 2 {
                ok &= pure <= eps + 2.0 * delta / eta + 1e-9;
            }
            if !ok {
                fails += 1;
            }
        }
    }
    ensure(
        fails == 0,
        format!("{count} cases, {fails} failures, max(pure - bound) = {worst:.3e}"),
    )
}

fn c4_rr_decomposition() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let k = r.gen_range(2..=6);
        let m = random_mech(&mut r, 2, k, 0.0);
        let q = rr_decompose_pure(&m, 0, 1, None).map_err(err)?;
        for row in q.rows() {
            let s: f64 = row.mass().iter().sum();
            if row.mass().iter().any(|&v| v < 0.0) || (s - 1.0).abs() > 1e-9 {
                return Err(format!("invalid decomposition row {:?}", row.mass()));
            }
        }
        let e = audit_pure(&m).map_err(err)?.exp();
        let (a, b) = (e / (e + 1.0), 1.0 / (e + 1.0));
        for y in 0..k {
            worst = worst.max((a * q.row(0).get(y) + b * q.row(1).get(y) - m.row(0).get(y)).abs());
            worst = worst.max((b * q.row(0).get(y) + a * q.row(1).get(y) - m.row(1).get(y)).abs());
        }
    }
    ensure(
        worst <= 1e-9,
        format!("200 mechanisms, max reconstruction error {worst:.2e}"),
    )
}

fn c5_counterexample() -> Outcome {
    let (eps, delta) = (0.25f64, 1.0 / 6.0);
    let m = build_counterexample(eps, delta).map_err(err)?;
    let uniform = Dist::uniform(m.num_outputs()).map_err(err)?;
    let del = audit_deletion_ldp(&m, &uniform, eps).map_err(err)?;
    let equality =
        m.row(1).get(1) - (2.0 * eps).exp() * m.row(0).get(1) - delta * (1.0 + eps.exp());
    let margin = m.row(1).get(1) - (2.0 * eps).exp() * m.row(0).get(1) - 2.0 * delta;
    let mut ok = del <= delta + 1e-9 && equality.abs() <= 1e-12 && margin >= 0.047;
    let mut detail =
        format!("deletion {del:.6} <= 1/6, equality residual {equality:.1e}, margin {margin:.6}");

    let (mut budget_gap, mut min_refute) = (0.0f64, f64::INFINITY);
    for i in 1..=20 {
        for j in 1..=20 {
            let (e, d) = (i as f64 / 40.0, j as f64 / 100.0);
            let m = build_counterexample(e, d).map_err(err)?;
            let b = deletion_to_replacement_budget(e, d).map_err(err)?;
            let at2 = m.row(1).get(1) - b.eps.exp() * m.row(0).get(1);
            budget_gap = budget_gap.max((at2 - b.delta).abs());
            min_refute = min_refute.min(audit_replacement_ldp(&m, 2.0 * e).map_err(err)? - 2.0 * d);
        }
    }
    ok &= budget_gap <= 1e-12 && min_refute > 0.0;
    detail += &format!("; 20x20 grid: budget equality residual {budget_gap:.1e}, min excess over 2 delta {min_refute:.3e}");
    ensure(ok, detail)
}

fn c6_deletion_to_replacement() -> Outcome {
    let mut r = rng(6);
    let (mut fails, mut worst) = (0, f64::NEG_INFINITY);
    for _ in 0..500 {
        let (i, k) = (r.gen_range(2..=4), r.gen_range(2..=5));
        let m = random_mech(&mut r, i, k, 0.2);
        let r0 = random_dist(&mut r, k, 0.1);
        let eps = r.gen_range(0.05..1.5);
        let delta = audit_deletion_ldp(&m, &r0, eps).map_err(err)?;
        let bound = ((eps.exp() + 1.0) * delta).min(1.0);
        let got = audit_replacement_ldp(&m, 2.0 * eps).map_err(err)?;
        worst = worst.max(got - bound);
        if got > bound + 1e-12 {
            fails += 1;
        }
    }
    ensure(
        fails == 0,
        format!("500 instances, {fails} failures, max(audit - bound) = {worst:.3e}"),
    )
}

fn c7_trim() -> Outcome {
    let mut r = rng(7);
    let (mut worst_del, mut worst_tv) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..500 {
        let (i, k) = (r.gen_range(2..=4), r.gen_range(2..=5));
        let m = random_mech(&mut r, i, k, 0.2);
        let r0 = random_dist(&mut r, k, 0.0);
        let eps = r.gen_range(0.05..1.5);
        let delta = audit_deletion_ldp(&m, &r0, eps).map_err(err)?;
        let t = trim_to_pure_deletion(&m, &r0, eps, delta).map_err(err)?;
        worst_del = worst_del.max(audit_deletion_ldp(&t, &r0, eps).map_err(err)?);
        for x in 0..i {
            worst_tv = worst_tv.max(tv_distance(t.row(x), m.row(x)).map_err(err)? - delta);
        }
    }
    ensure(
        worst_del <= 1e-9 && worst_tv <= 1e-12,
        format!("500 instances, max trimmed deletion delta {worst_del:.1e}, max(TV - delta) = {worst_tv:.3e}"),
    )
}

fn c8_composition() -> Outcome {
    let grid = [0.25, 0.5, 1.0, 2.0];
    let (mut worst_gap, mut worst_over) = (0.0f64, f64::NEG_INFINITY);
    for &a in &grid {
        for &b in &grid {
            let bound = compose_eps(a, b).map_err(err)?;
            let found = compose_tightness_search(a, b, 400).map_err(err)?;
            worst_gap = worst_gap.max(bound - found);
            worst_over = worst_over.max(found - bound);
        }
    }
    let mut appendix = 0.0f64;
    for i in 0..200 {
        for j in 0..200 {
            let (x, y) = (5.0 * i as f64 / 199.0, 5.0 * j as f64 / 199.0);
            let lhs = ((x + y).exp() + 1.0) / (x.exp() + y.exp());
            appendix = appendix.max(lhs.ln() - x * y / 2.0);
        }
    }
    ensure(
        worst_gap <= 1e-3 && worst_over <= 1e-12 && appendix <= 1e-12,
        format!(
            "16 pairs, max(bound - search) = {worst_gap:.2e}, max(search - bound) = {worst_over:.1e}; appendix 200x200 max violation {appendix:.1e}"
        ),
    )
}

fn c9_grouposition() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for eps in [0.2f64, 0.5] {
        let keep = eps.exp() / (1.0 + eps.exp());
        let rr = Mechanism::randomized_response(eps).map_err(err)?;
        for dp in [0.1f64, 0.01] {
            for k in 1..=6usize {
                let closed =
                    k as f64 * eps * eps / 2.0 + eps * (2.0 * k as f64 * (1.0 / dp).ln()).sqrt();
                let lib = grouposition_eps(
                    &GroupositionParams::new(k as u32, eps, dp, 0.0).map_err(err)?,
                )
                .map_err(err)?;
                if (lib - closed).abs() > 1e-12 {
                    return Err(format!("k={k}: eps' {lib} differs from {closed}"));
                }
                let mut tail = 0.0;
                for j in 0..=k {
                    let binom = (1..=j).fold(1.0, |acc, i| acc * (k - j + i) as f64 / i as f64);
                    if (2.0 * j as f64 - k as f64) * eps > closed {
                        tail += binom * keep.powi(j as i32) * (1.0 - keep).powi((k - j) as i32);
                    }
                }
                let exact =
                    grouposition_exact_tail(&rr, &vec![0; k], &vec![1; k], closed).map_err(err)?;
                worst = worst.max(tail - dp).max(exact - dp);
            }
        }
    }
    ensure(
        worst <= 0.0,
        format!("24 settings, max(tail - delta') = {worst:.3e}"),
    )
}

fn c10_shuffle_to_ldp() -> Outcome {
    let mut r = rng(10);
    let (mut count, mut fails, mut worst) = (0, 0, f64::NEG_INFINITY);
    for _ in 0..50 {
        let (i, k) = (r.gen_range(2..=3), r.gen_range(2..=3));
        let m = random_mech(&mut r, i, k, 0.15);
        for n in 2..=8u32 {
            let audit = ShuffleAudit::new(&m, n).map_err(err)?;
            for _ in 0..3 {
                let eps_s = r.gen_range(0.0..2.0);
                // the smallest delta_S the premise allows
                let delta_s = audit.delta_at(eps_s).map_err(err)?;
                let got = audit_replacement_ldp(&m, eps_s + (n as f64).ln()).map_err(err)?;
                worst = worst.max(got - delta_s);
                count += 1;
                if got > delta_s + 1e-9 {
                    fails += 1;
                }
            }
        }
    }
    ensure(
        fails == 0,
        format!(
            "{count} (R, n, eps_S) cases, {fails} failures, max(audit - delta_S) = {worst:.3e}"
        ),
    )
}

fn c11_amplification() -> Outcome {
    let delta = 0.05;
    let mut lines = Vec::new();
    let mut ok = true;
    for eps_l in [0.25f64, 0.5] {
        let rr = Mechanism::randomized_response(eps_l).map_err(err)?;
        for n in [40u32, 60] {
            let cutoff = AmplificationParams::new(eps_l, delta, n as u64, 1.0)
                .map_err(err)?
                .feasibility_cutoff();
            let eps = amplification_formula(eps_l, delta, n as f64);
            let audit = ShuffleAudit::new(&rr, n).map_err(err)?;
            let exact = audit.delta_at(eps).map_err(err)?;
            let persist = audit_shuffle(&rr, n, eps_l).map_err(err)?;
            ok &= exact <= delta && persist <= 1e-12;
            lines.push(format!(
                "eps_L={eps_l} n={n}: formula eps {eps:.4}, exact delta {exact:.2e}, delta at eps_L {persist:.1e}, cutoff {}",
                cutoff.map_or("none".into(), |c| format!("{c:.3}"))
            ));
        }
    }
    let limits = EnumLimits {
        max_users: 200,
        ..EnumLimits::default()
    };
    for eps_l in [0.25f64, 0.5] {
        let rr = Mechanism::randomized_response(eps_l).map_err(err)?;
        for n in [100u32, 200] {
            let c =
                check_amplification_vs_exact_with_limits(&rr, n, delta, &limits).map_err(err)?;
            ok &= c.holds;
            lines.push(format!(
                "guarded eps_L={eps_l} n={n}: bound {:.4}, exact delta {:.2e}",
                c.eps_bound, c.exact_delta
            ));
        }
    }
    let mut detail =
        "listed n are below the feasibility cutoff, formula evaluated unguarded; ".to_owned();
    detail += &lines.join("; ");
    ensure(ok, detail)
}

fn c12_subsampling() -> Outcome {
    let mut worst_gap = 0.0f64;
    for (n, m) in [(2, 1), (3, 1), (4, 1), (4, 2)] {
        for eps in [0.5f64, 1.0] {
            let t = verify_subsample_tightness(eps, n, m).map_err(err)?;
            let closed = (1.0 + m as f64 / n as f64 * eps.exp_m1()).ln();
            worst_gap = worst_gap.max((t.audited_eps - closed).abs());
        }
    }
    let mut r = rng(12);
    let limits = EnumLimits::default();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..200 {
        let alphabet = r.gen_range(2..=3);
        let m = r.gen_range(1..=2);
        let n = r.gen_range(m..=4);
        let small = DatasetSpace::new(alphabet, m);
        let k = r.gen_range(2..=3);
        let base = random_mech(&mut r, small.len(), k, 0.2);
        let eps = r.gen_range(0.0..1.5);
        let delta = audit_central(&base, &small.neighbors(), eps).map_err(err)?;
        let b = subsample_budget(eps, delta, m as f64 / n as f64).map_err(err)?;
        let sub = build_subsampled_with_limits(&base, n, m, &limits).map_err(err)?;
        let got =
            audit_central(&sub, &DatasetSpace::new(alphabet, n).neighbors(), b.eps).map_err(err)?;
        worst = worst.max(got - b.delta);
    }
    ensure(
        worst_gap <= 1e-9 && worst <= 1e-12,
        format!("8 worst-case settings, max |audit - closed form| = {worst_gap:.1e}; 200 random bases, max(audit - p delta) = {worst:.3e}"),
    )
}

fn c13_coupon() -> Outcome {
    let trials = 100_000u32;
    let mut r = rng(13);
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [10u64, 100] {
        let rounds = coupon_rounds(n, 1.0 / 6.0).map_err(err)?;
        let expect = (n as f64 * (6.0 * n as f64).ln()).ceil() as u64;
        if rounds != expect {
            return Err(format!(
                "n={n}: rounds {rounds} != ceil(n ln 6n) = {expect}"
            ));
        }
        let mut misses = 0u32;
        let mut seen = vec![false; n as usize];
        for _ in 0..trials {
            seen.iter_mut().for_each(|s| *s = false);
            let mut distinct = 0;
            for _ in 0..rounds {
                let j = r.gen_range(0..n as usize);
                if !seen[j] {
                    seen[j] = true;
                    distinct += 1;
                }
            }
            if distinct < n {
                misses += 1;
            }
        }
        let p_hat = misses as f64 / trials as f64;
        let slack = 3.0 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        ok &= p_hat <= 1.0 / 6.0 + slack;
        lines.push(format!(
            "n={n}: n'={rounds}, miss rate {p_hat:.5} (3 sigma {slack:.5})"
        ));
    }
    ensure(ok, format!("{} trials each; {}", trials, lines.join("; ")))
}

fn c14_cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let mut reports = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("run{run}.jsonl"));
        let status = Command::new(env!("CARGO_BIN_EXE_dpcalc"))
            .args(["verify", "--suite", "all", "--seed", "7", "--output"])
            .arg(&path)
            .env_remove("DPCALC_MAX_ENUM")
            .stderr(std::process::Stdio::null())
            .status()
            .map_err(err)?;
        if status.code() != Some(0) {
            return Err(format!("run {run} exited with {status}"));
        }
        reports.push(std::fs::read(&path).map_err(err)?);
    }
    ensure(
        reports[0] == reports[1] && !reports[0].is_empty(),
        format!(
            "two runs, exit 0, {} bytes each, identical: {}",
            reports[0].len(),
            reports[0] == reports[1]
        ),
    )
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("hockey-stick oracle equivalence", c1_hockey_stick),
        ("pure to approximate", c2_pure_to_approx),
        ("approximate to pure", c3_approx_to_pure),
        ("randomized response decomposition", c4_rr_decomposition),
        ("deletion counterexample", c5_counterexample),
        ("deletion to replacement", c6_deletion_to_replacement),
        ("trim to pure deletion", c7_trim),
        ("composition tightness and inequality", c8_composition),
        ("grouposition tail", c9_grouposition),
        ("shuffle to local", c10_shuffle_to_ldp),
        ("shuffle amplification", c11_amplification),
        ("subsampling exactness", c12_subsampling),
        ("coupon collector", c13_coupon),
        ("cli determinism", c14_cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {:>2} {name} ({secs:.1}s): {detail}", i + 1);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
