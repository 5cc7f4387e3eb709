use dpcalc::audit::{mix, postprocess};
use dpcalc::converters::rr_decompose_pure;
use dpcalc::ldp::{appendix_inequality_check, compose_eps};
use dpcalc::subsample::subsample_budget;
use dpcalc::{
    audit_pure, audit_replacement_ldp, hockey_stick, tv_distance, CountVector, Dist, Mechanism,
};
use proptest::prelude::*;

fn dist(k: usize) -> impl Strategy<Value = Dist> {
    prop::collection::vec(0.0f64..1.0, k).prop_filter_map("all zero", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-9).then(|| Dist::new(v.iter().map(|x| x / s).collect()).unwrap())
    })
}

fn dist_pair() -> impl Strategy<Value = (Dist, Dist)> {
    (1usize..8).prop_flat_map(|k| (dist(k), dist(k)))
}

fn positive_mechanism() -> impl Strategy<Value = Mechanism> {
    (2usize..4, 2usize..5).prop_flat_map(|(n, k)| {
        prop::collection::vec(prop::collection::vec(0.01f64..1.0, k), n).prop_map(|rows| {
            let rows = rows
                .into_iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.iter().map(|x| x / s).collect()
                })
                .collect();
            Mechanism::from_rows(rows).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn hockey_stick_bounds((p, q) in dist_pair(), eps in 0.0f64..4.0) {
        let d = hockey_stick(&p, &q, eps).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!(hockey_stick(&p, &q, eps + 0.1).unwrap() <= d + 1e-15);
        prop_assert_eq!(hockey_stick(&p, &p, eps).unwrap(), 0.0);
        prop_assert!((hockey_stick(&p, &q, 0.0).unwrap() - tv_distance(&p, &q).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn pure_audit_is_tight(m in positive_mechanism()) {
        let eps = audit_pure(&m).unwrap();
        prop_assert!(audit_replacement_ldp(&m, eps + 1e-9).unwrap() < 1e-12);
        if eps > 1e-3 {
            prop_assert!(audit_replacement_ldp(&m, eps - 1e-3).unwrap() > 0.0);
        }
    }

    #[test]
    fn postprocessing_does_not_increase_delta(m in positive_mechanism(), eps in 0.0f64..2.0, seed in any::<u64>()) {
        let map: Vec<usize> = (0..m.num_outputs()).map(|y| ((seed >> (2 * y)) & 1) as usize).collect();
        let merged = postprocess(&m, vec!["a".into(), "b".into()], &map).unwrap();
        prop_assert!(audit_replacement_ldp(&merged, eps).unwrap() <= audit_replacement_ldp(&m, eps).unwrap() + 1e-12);
    }

    #[test]
    fn mixing_is_convex(a in positive_mechanism(), w in 0.0f64..1.0, eps in 0.0f64..2.0) {
        let b = a.uniform_like();
        let m = mix(&[(w, &a), (1.0 - w, &b)]).unwrap();
        let bound = w * audit_replacement_ldp(&a, eps).unwrap() + (1.0 - w) * audit_replacement_ldp(&b, eps).unwrap();
        prop_assert!(audit_replacement_ldp(&m, eps).unwrap() <= bound + 1e-12);
    }

    #[test]
    fn subsampling_shrinks_budget(eps in 0.0f64..5.0, p in 0.0f64..1.0, delta in 0.0f64..1.0) {
        let b = subsample_budget(eps, delta, p).unwrap();
        prop_assert!(b.eps <= eps + 1e-12);
        prop_assert!(b.delta <= delta);
        let more = subsample_budget(eps, delta, (p + 0.1).min(1.0)).unwrap();
        prop_assert!(b.eps <= more.eps + 1e-12);
    }

    #[test]
    fn composition_bounds(a in 0.0f64..6.0, b in 0.0f64..6.0) {
        let c = compose_eps(a, b).unwrap();
        prop_assert!((c - compose_eps(b, a).unwrap()).abs() < 1e-12);
        prop_assert!(c <= a.min(b) + 1e-12);
        prop_assert!(c <= a * b / 2.0 + 1e-12);
        prop_assert!(appendix_inequality_check(a, b).unwrap());
    }

    #[test]
    fn rr_decomposition_round_trips(m in positive_mechanism()) {
        let q = rr_decompose_pure(&m, 0, 1, None).unwrap();
        let e = audit_pure(&m.restrict(&[0, 1]).unwrap()).unwrap().exp();
        let (a, b) = (e / (e + 1.0), 1.0 / (e + 1.0));
        for y in 0..m.num_outputs() {
            prop_assert!((a * q.row(0).get(y) + b * q.row(1).get(y) - m.row(0).get(y)).abs() < 1e-9);
            prop_assert!((b * q.row(0).get(y) + a * q.row(1).get(y) - m.row(1).get(y)).abs() < 1e-9);
        }
    }

    #[test]
    fn json_round_trips(m in positive_mechanism(), counts in prop::collection::vec(0u32..50, 1..6)) {
        let back = Mechanism::from_json_str(&m.to_json_string().unwrap()).unwrap();
        prop_assert_eq!(back, m);
        let c = CountVector::new(counts);
        prop_assert_eq!(c.to_string().parse::<CountVector>().unwrap(), c);
    }
}
