//! Library results against slow, independent computations.

use std::collections::HashMap;

use dpcalc::audit::{audit_central, hockey_stick};
use dpcalc::converters::{approx_to_pure_eps, pure_to_approx};
use dpcalc::ldp::{
    build_counterexample, compose_eps, coupon_rounds, deletion_to_replacement_budget,
    grouposition_eps, grouposition_exact_tail, purification_bounds, purification_t_range,
    GroupositionParams, PurificationParams,
};
use dpcalc::shuffle::{
    amplification_formula, shuffled_distribution, shuffled_mechanism, ShuffleInstance,
};
use dpcalc::subsample::{
    build_subsampled, subsample_budget, verify_subsample_tightness, DatasetSpace,
};
use dpcalc::{audit_replacement_ldp, CountVector, Dist, EnumLimits, Mechanism, ShuffleAudit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn brute_hockey_stick(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let mut best = 0.0f64;
    for set in 0u32..(1 << p.len()) {
        let (mut ps, mut qs) = (0.0, 0.0);
        for y in 0..p.len() {
            if set >> y & 1 == 1 {
                ps += p[y];
                qs += q[y];
            }
        }
        best = best.max(ps - eps.exp() * qs);
    }
    best
}

fn dist(rng: &mut ChaCha8Rng, k: usize, zeros: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k)
        .map(|_| {
            if zeros && rng.gen_bool(0.25) {
                0.0
            } else {
                rng.gen::<f64>() + 1e-3
            }
        })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[0] = 1.0;
    }
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

#[test]
fn hockey_stick_matches_subset_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let k = rng.gen_range(1..=10);
        let (p, q) = (dist(&mut rng, k, true), dist(&mut rng, k, true));
        let (dp, dq) = (Dist::new(p.clone()).unwrap(), Dist::new(q.clone()).unwrap());
        for eps in [0.0, 0.1, 0.3, 1.0, 3.0] {
            let fast = hockey_stick(&dp, &dq, eps).unwrap();
            assert!((fast - brute_hockey_stick(dp.mass(), dq.mass(), eps)).abs() < 1e-12);
        }
    }
}

/// Distribution of the shuffled message sequence: every ordered output tuple
/// under every permutation, keyed by the permuted tuple.
fn sequence_distribution(r: &Mechanism, users: &[usize]) -> HashMap<Vec<usize>, f64> {
    let n = users.len();
    let k = r.num_outputs();
    let mut perms = vec![vec![]];
    for _ in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..n)
                    .filter(|i| !p.contains(i))
                    .map(|i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let nperm = perms.len() as f64;
    let mut out = HashMap::new();
    for code in 0..k.pow(n as u32) {
        let mut ys = vec![0; n];
        let mut c = code;
        for y in ys.iter_mut() {
            *y = c % k;
            c /= k;
        }
        let p: f64 = users
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| r.row(x).get(y))
            .product();
        if p == 0.0 {
            continue;
        }
        for perm in &perms {
            let seq: Vec<usize> = perm.iter().map(|&i| ys[i]).collect();
            *out.entry(seq).or_insert(0.0) += p / nperm;
        }
    }
    out
}

fn sparse_hockey_stick(
    p: &HashMap<Vec<usize>, f64>,
    q: &HashMap<Vec<usize>, f64>,
    eps: f64,
) -> f64 {
    p.iter()
        .map(|(s, a)| (a - eps.exp() * q.get(s).copied().unwrap_or(0.0)).max(0.0))
        .sum()
}

fn ordered_tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    (0..k.pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let x = c % k;
                    c /= k;
                    x
                })
                .collect()
        })
        .collect()
}

#[test]
fn shuffle_audit_matches_permutation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..12 {
        let inputs = 2 + trial % 2;
        let outputs = 2 + (trial / 2) % 2;
        let rows: Vec<Vec<f64>> = (0..inputs)
            .map(|_| dist(&mut rng, outputs, trial % 3 == 0))
            .collect();
        let r = Mechanism::from_rows(rows).unwrap();
        for n in 1..=4usize {
            let audit = ShuffleAudit::new(&r, n as u32).unwrap();
            for eps in [0.0, 0.2, 0.7] {
                let mut oracle = 0.0f64;
                for base in ordered_tuples(inputs, n - 1) {
                    for a in 0..inputs {
                        for b in 0..inputs {
                            if a == b {
                                continue;
                            }
                            let mut d = base.clone();
                            d.push(a);
                            let mut e = base.clone();
                            e.push(b);
                            let (pd, pe) =
                                (sequence_distribution(&r, &d), sequence_distribution(&r, &e));
                            oracle = oracle.max(sparse_hockey_stick(&pd, &pe, eps));
                        }
                    }
                }
                let got = audit.delta_at(eps).unwrap();
                assert!(
                    (got - oracle).abs() < 1e-12,
                    "n={n} eps={eps}: {got} vs {oracle}"
                );
            }
        }
    }
}

#[test]
fn count_distribution_matches_sequence_counts() {
    let r = Mechanism::from_rows(vec![
        vec![0.5, 0.3, 0.2],
        vec![0.1, 0.1, 0.8],
        vec![0.3, 0.3, 0.4],
    ])
    .unwrap();
    let users = vec![0, 2, 2, 1];
    let seq = sequence_distribution(&r, &users);
    let mut by_counts: HashMap<CountVector, f64> = HashMap::new();
    for (s, p) in &seq {
        let mut c = vec![0u32; 3];
        for &y in s {
            c[y] += 1;
        }
        *by_counts.entry(CountVector::new(c)).or_insert(0.0) += p;
    }
    let inst = ShuffleInstance::new(r, CountVector::new(vec![1, 1, 2])).unwrap();
    let got = shuffled_distribution(&inst).unwrap();
    assert!((got.total() - 1.0).abs() < 1e-12);
    for (c, p) in by_counts {
        assert!((got.prob(&c) - p).abs() < 1e-12);
    }
}

#[test]
fn explicit_shuffled_mechanism_agrees_with_shared_base_audit() {
    let r = Mechanism::from_rows(vec![vec![0.6, 0.4], vec![0.2, 0.8], vec![0.5, 0.5]]).unwrap();
    for n in 1..=5 {
        let (m, pairs) = shuffled_mechanism(&r, n, &EnumLimits::default()).unwrap();
        let audit = ShuffleAudit::new(&r, n).unwrap();
        for eps in [0.0, 0.3, 1.0] {
            let a = audit_central(&m, &pairs, eps).unwrap();
            assert!((a - audit.delta_at(eps).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn subsampled_rows_are_averages_of_record_rows() {
    let rr = Mechanism::randomized_response(0.9).unwrap();
    let sub = build_subsampled(&rr, 3, 1).unwrap();
    let space = DatasetSpace::new(2, 3);
    for i in 0..space.len() {
        let d = space.dataset(i);
        for y in 0..2 {
            let avg = d.iter().map(|&x| rr.row(x).get(y)).sum::<f64>() / 3.0;
            assert!((sub.row(i).get(y) - avg).abs() < 1e-15);
        }
    }
}

#[test]
fn grouposition_tail_matches_enumeration() {
    let eps = 0.5f64;
    let keep = eps.exp() / (1.0 + eps.exp());
    let rr = Mechanism::randomized_response(eps).unwrap();
    for k in 1..=6usize {
        let e =
            grouposition_eps(&GroupositionParams::new(k as u32, eps, 0.1, 0.0).unwrap()).unwrap();
        // loss with j coordinates reporting their true bit is (2j - k) eps
        for threshold in [e, 0.5 * k as f64 * eps, 0.0] {
            let mut tail = 0.0;
            for j in 0..=k {
                let loss = (2.0 * j as f64 - k as f64) * eps;
                let binom = (1..=j).fold(1.0, |acc, i| acc * (k - j + i) as f64 / i as f64);
                if loss > threshold + 1e-12 {
                    tail += binom * keep.powi(j as i32) * (1.0 - keep).powi((k - j) as i32);
                }
            }
            let got =
                grouposition_exact_tail(&rr, &vec![0; k], &vec![1; k], threshold + 1e-12).unwrap();
            assert!(
                (got - tail).abs() < 1e-12,
                "k={k} t={threshold}: {got} vs {tail}"
            );
        }
    }
}

#[test]
fn frozen_reference_values() {
    let close = |a: f64, b: f64, tol: f64| assert!((a - b).abs() < tol, "{a} vs {b}");
    let rr = Mechanism::randomized_response(1.0).unwrap();
    close(
        audit_replacement_ldp(&rr, 0.5).unwrap(),
        0.287_649_136_644_967_9,
        1e-12,
    );
    close(
        approx_to_pure_eps(1.0, 0.01, 0.1, 2).unwrap(),
        1.070_995_028_184_911_2,
        1e-12,
    );
    close(
        deletion_to_replacement_budget(1.0, 0.01).unwrap().delta,
        0.037_182_818_284_590_455,
        1e-15,
    );
    close(
        deletion_to_replacement_budget(0.25, 1.0 / 6.0)
            .unwrap()
            .delta,
        0.380_670_902_781_290_23,
        1e-15,
    );
    close(
        build_counterexample(0.25, 1.0 / 6.0).unwrap().row(1).get(1),
        0.594_675_138_895_913_8,
        1e-15,
    );
    close(
        grouposition_eps(&GroupositionParams::new(4, 0.5, 0.01, 0.0).unwrap()).unwrap(),
        3.534_854_258_770_293,
        1e-12,
    );
    close(compose_eps(1.0, 1.0).unwrap(), 0.433_780_830_483_027, 1e-12);
    let (lo, hi) = purification_t_range(0.1, 1e-8, 100).unwrap();
    close(lo, 11.512_925_464_970_229, 1e-9);
    close(hi, 21_526.666, 1e-2);
    let b =
        purification_bounds(&PurificationParams::new(0.1, 1e-8, 100, 12).unwrap(), None).unwrap();
    close(b.tv_bound, 0.218_514_405_806_125_16, 1e-12);
    close(
        amplification_formula(1.0, 1e-6, 1e4),
        0.180_006_367_731_396_55,
        1e-12,
    );
    close(
        subsample_budget(1.0, 0.01, 0.1).unwrap().eps,
        0.158_565_078_740_429_1,
        1e-12,
    );
    assert_eq!(coupon_rounds(10, 1.0 / 6.0).unwrap(), 41);
    assert_eq!(coupon_rounds(100, 1.0 / 6.0).unwrap(), 640);
    close(
        verify_subsample_tightness(1.0, 2, 1).unwrap().audited_eps,
        0.620_114_506_958_277_5,
        1e-9,
    );
    close(
        verify_subsample_tightness(0.5, 4, 1).unwrap().audited_eps,
        0.150_297_825_112_805_6,
        1e-9,
    );
    let t = pure_to_approx(1.0, 0.1).unwrap();
    assert_eq!((t.eps, t.delta), (0.9, 0.1));
}
