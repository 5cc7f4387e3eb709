//! Conversions between pure and approximate central DP, and the binary
//! randomized-response decompositions of a mechanism.

use serde::{Deserialize, Serialize};

use crate::audit::{max_log_ratio_slices, mix};
use crate::dist::{check_eps, check_unit, Dist, PrivacyBudget};
use crate::error::{invalid, Error, Result};
use crate::mechanism::Mechanism;

/// Residual tolerance for mixture identities.
pub const MIXTURE_TOL: f64 = 1e-9;

/// A pure budget `eps_total` read as the approximate budget
/// `(eps_total - delta, delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureApproxTrade {
    pub source: PrivacyBudget,
    pub target: PrivacyBudget,
}

/// Any `(eps_total, 0)`-DP mechanism is `(eps_total - delta, delta)`-DP.
pub fn pure_to_approx(eps_total: f64, delta: f64) -> Result<PrivacyBudget> {
    Ok(pure_to_approx_trade(eps_total, delta)?.target)
}

pub fn pure_to_approx_trade(eps_total: f64, delta: f64) -> Result<PureApproxTrade> {
    check_eps("eps_total", eps_total)?;
    check_unit("delta", delta)?;
    if delta > eps_total {
        return Err(invalid(
            "delta",
            format!("{delta} exceeds eps_total {eps_total}; the resulting eps would be negative"),
        ));
    }
    Ok(PureApproxTrade {
        source: PrivacyBudget::pure(eps_total)?,
        target: PrivacyBudget::new(eps_total - delta, delta)?,
    })
}

/// `eps + ln(1 + delta * k * e^-eps / eta)`.
pub fn approx_to_pure_eps(eps: f64, delta: f64, eta: f64, k: usize) -> Result<f64> {
    check_eps("eps", eps)?;
    check_unit("delta", delta)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid("eta", format!("{eta} is outside (0, 1]")));
    }
    Ok(eps + (delta * k as f64 * (-eps).exp() / eta).ln_1p())
}

/// Mixes `a` with the uniform mechanism at weight `eta`. If `a` is
/// `(eps, delta)`-DP the result is pure `eps'`-DP with `eps'` as returned, and
/// every row moves by at most `eta` in total variation.
pub fn approx_to_pure_finite(
    a: &Mechanism,
    eps: f64,
    delta: f64,
    eta: f64,
) -> Result<(Mechanism, f64)> {
    let eps_prime = approx_to_pure_eps(eps, delta, eta, a.num_outputs())?;
    let uniform = a.uniform_like();
    let a_prime = mix(&[(1.0 - eta, a), (eta, &uniform)])?;
    Ok((a_prime, eps_prime))
}

/// Mixture weights of the leaky randomized-response decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakyRRWeights {
    pub eps: f64,
    pub delta: f64,
    pub w_main: f64,
    pub w_cross: f64,
    pub w_leak: f64,
}

impl LeakyRRWeights {
    pub fn new(budget: PrivacyBudget) -> Self {
        let PrivacyBudget { eps, delta } = budget;
        let denom = eps.exp() + 1.0;
        Self {
            eps,
            delta,
            w_main: (1.0 - delta) / (1.0 + (-eps).exp()),
            w_cross: (1.0 - delta) / denom,
            w_leak: delta,
        }
    }
}

fn binary_inputs() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

/// Solves for `Q: {0,1} -> Y` with
/// `r(x) = a Q(0) + b Q(1)` and `r(x') = b Q(0) + a Q(1)`,
/// where `a = e^eps / (e^eps + 1)`, `b = 1 / (e^eps + 1)`.
///
/// `eps` defaults to the tight pure budget of `r` restricted to `{x, x'}`; an
/// override must be at least that large or the solved rows go negative.
pub fn rr_decompose_pure(
    r: &Mechanism,
    x: usize,
    x_prime: usize,
    eps_override: Option<f64>,
) -> Result<Mechanism> {
    r.check_input(x)?;
    r.check_input(x_prime)?;
    let (p, pp) = (r.row(x).mass(), r.row(x_prime).mass());
    let tight = max_log_ratio_slices(p, pp).max(max_log_ratio_slices(pp, p));
    if tight.is_infinite() {
        return Err(Error::Precondition(format!(
            "rows `{}` and `{}` have non-nested supports; no finite pure budget",
            r.inputs()[x],
            r.inputs()[x_prime]
        )));
    }
    let eps = match eps_override {
        Some(e) => {
            check_eps("eps", e)?;
            if e + 1e-12 < tight {
                return Err(invalid(
                    "eps",
                    format!("override {e} is below the pair's pure budget {tight}"),
                ));
            }
            e.max(tight)
        }
        None => tight,
    };
    if eps == 0.0 {
        // identical rows: any common value satisfies both identities
        return Mechanism::from_dists(
            binary_inputs(),
            r.outputs().to_vec(),
            vec![r.row(x).clone(), r.row(x).clone()],
        );
    }
    let scale = eps.exp();
    let denom = scale - 1.0;
    let q0 = p
        .iter()
        .zip(pp)
        .map(|(a, b)| (scale * a - b) / denom)
        .collect();
    let q1 = p
        .iter()
        .zip(pp)
        .map(|(a, b)| (scale * b - a) / denom)
        .collect();
    let rows = vec![
        Dist::from_computed(q0).map_err(|e| Error::Precondition(format!("Q(0): {e}")))?,
        Dist::from_computed(q1).map_err(|e| Error::Precondition(format!("Q(1): {e}")))?,
    ];
    Mechanism::from_dists(binary_inputs(), r.outputs().to_vec(), rows)
}

/// Outcome of checking a leaky randomized-response decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakyRRCheck {
    pub holds: bool,
    pub max_residual: f64,
}

/// Checks that `q` (inputs ordered `0, 1, "I am x", "I am x'"`) decomposes
/// rows `x` and `x_prime` of `r`:
///
/// ```text
/// r(x)  = w_main Q(0) + w_cross Q(1) + delta Q(I am x)
/// r(x') = w_cross Q(0) + w_main Q(1) + delta Q(I am x')
/// ```
pub fn verify_leaky_rr(
    r: &Mechanism,
    x: usize,
    x_prime: usize,
    q: &Mechanism,
    budget: PrivacyBudget,
) -> Result<LeakyRRCheck> {
    r.check_input(x)?;
    r.check_input(x_prime)?;
    if q.num_inputs() != 4 {
        return Err(Error::AlphabetMismatch {
            left: 4,
            right: q.num_inputs(),
        });
    }
    if q.num_outputs() != r.num_outputs() {
        return Err(Error::AlphabetMismatch {
            left: r.num_outputs(),
            right: q.num_outputs(),
        });
    }
    let w = LeakyRRWeights::new(budget);
    let residual = |target: &Dist, main: usize, cross: usize, leak: usize| {
        (0..target.len())
            .map(|y| {
                let fit = w.w_main * q.row(main).get(y)
                    + w.w_cross * q.row(cross).get(y)
                    + w.w_leak * q.row(leak).get(y);
                (target.get(y) - fit).abs()
            })
            .fold(0.0, f64::max)
    };
    let max_residual = residual(r.row(x), 0, 1, 2).max(residual(r.row(x_prime), 1, 0, 3));
    Ok(LeakyRRCheck {
        holds: max_residual <= MIXTURE_TOL,
        max_residual,
    })
}

/// Forward direction of the leaky decomposition: the two rows produced by
/// mixing `q` with the leaky weights. Useful for building test instances.
pub fn leaky_rr_mixture(q: &Mechanism, budget: PrivacyBudget) -> Result<Mechanism> {
    if q.num_inputs() != 4 {
        return Err(Error::AlphabetMismatch {
            left: 4,
            right: q.num_inputs(),
        });
    }
    let w = LeakyRRWeights::new(budget);
    let row = |main: usize, cross: usize, leak: usize| {
        Dist::mixture(&[
            (w.w_main, q.row(main)),
            (w.w_cross, q.row(cross)),
            (w.w_leak, q.row(leak)),
        ])
    };
    Mechanism::from_dists(
        vec!["x".into(), "x'".into()],
        q.outputs().to_vec(),
        vec![row(0, 1, 2)?, row(1, 0, 3)?],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::{audit_pure, tv_distance};

    #[test]
    fn pure_to_approx_examples() {
        assert_eq!(
            pure_to_approx(1.0, 0.0).unwrap(),
            PrivacyBudget::new(1.0, 0.0).unwrap()
        );
        let b = pure_to_approx(1.1, 0.1).unwrap();
        assert!((b.eps - 1.0).abs() < 1e-15 && b.delta == 0.1);
        assert!(pure_to_approx(0.1, 0.2).is_err());
    }

    #[test]
    fn approx_to_pure_eps_examples() {
        assert_eq!(approx_to_pure_eps(0.7, 0.0, 0.3, 5).unwrap(), 0.7);
        let e = approx_to_pure_eps(1.0, 0.01, 0.1, 2).unwrap();
        assert!((e - 1.070_995_028_184_911_2).abs() < 1e-12);
        assert!(e <= 1.0 + 2.0 * 0.01 / 0.1);
        assert!(approx_to_pure_eps(1.0, 0.01, 0.0, 2).is_err());
        assert!(approx_to_pure_eps(1.0, 0.01, 1.5, 2).is_err());
    }

    #[test]
    fn approx_to_pure_moves_rows_by_at_most_eta() {
        let a = Mechanism::from_rows(vec![vec![0.99, 0.01], vec![0.0, 1.0]]).unwrap();
        let (ap, eps_prime) = approx_to_pure_finite(&a, 0.0, 0.99, 0.2).unwrap();
        for x in 0..2 {
            assert!(tv_distance(a.row(x), ap.row(x)).unwrap() <= 0.2 + 1e-12);
        }
        assert!(audit_pure(&ap).unwrap() <= eps_prime + 1e-9);
    }

    #[test]
    fn randomized_response_is_its_own_decomposition() {
        let rr = Mechanism::randomized_response(0.8).unwrap();
        let q = rr_decompose_pure(&rr, 0, 1, None).unwrap();
        assert!((q.row(0).get(0) - 1.0).abs() < 1e-9);
        assert!((q.row(1).get(1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identical_rows_decompose_to_themselves() {
        let m = Mechanism::from_rows(vec![vec![0.4, 0.6], vec![0.4, 0.6]]).unwrap();
        let q = rr_decompose_pure(&m, 0, 1, None).unwrap();
        assert_eq!(q.row(0), m.row(0));
        assert_eq!(q.row(1), m.row(0));
    }

    #[test]
    fn non_nested_supports_rejected() {
        let m = Mechanism::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            rr_decompose_pure(&m, 0, 1, None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn looser_override_still_reconstructs() {
        let m = Mechanism::from_rows(vec![vec![0.5, 0.3, 0.2], vec![0.3, 0.3, 0.4]]).unwrap();
        assert!(rr_decompose_pure(&m, 0, 1, Some(0.1)).is_err());
        let q = rr_decompose_pure(&m, 0, 1, Some(2.0)).unwrap();
        let e = 2f64.exp();
        let back =
            Dist::mixture(&[(e / (e + 1.0), q.row(0)), (1.0 / (e + 1.0), q.row(1))]).unwrap();
        for y in 0..3 {
            assert!((back.get(y) - m.row(0).get(y)).abs() < 1e-9);
        }
    }

    #[test]
    fn leaky_weights_sum_to_one() {
        let w = LeakyRRWeights::new(PrivacyBudget::new(0.9, 0.2).unwrap());
        assert!((w.w_main + w.w_cross + w.w_leak - 1.0).abs() < 1e-12);
    }

    #[test]
    fn leaky_verification_detects_perturbation() {
        let rr = Mechanism::randomized_response(1.0).unwrap();
        let q2 = rr_decompose_pure(&rr, 0, 1, None).unwrap();
        let mut rows: Vec<Vec<f64>> = q2.rows().iter().map(|d| d.mass().to_vec()).collect();
        rows.push(vec![0.3, 0.7]);
        rows.push(vec![0.9, 0.1]);
        let labels = vec!["0".into(), "1".into(), "I am x".into(), "I am x'".into()];
        let q = Mechanism::new(labels.clone(), rr.outputs().to_vec(), rows.clone()).unwrap();
        let budget = PrivacyBudget::pure(1.0).unwrap();
        assert!(verify_leaky_rr(&rr, 0, 1, &q, budget).unwrap().holds);

        rows[0] = vec![
            1.0 - 1e-3 / LeakyRRWeights::new(budget).w_main,
            1e-3 / LeakyRRWeights::new(budget).w_main,
        ];
        let bad = Mechanism::new(labels, rr.outputs().to_vec(), rows).unwrap();
        let check = verify_leaky_rr(&rr, 0, 1, &bad, budget).unwrap();
        assert!(!check.holds);
        assert!((check.max_residual - 1e-3).abs() < 1e-9);

        assert!(verify_leaky_rr(&rr, 0, 1, &q2, budget).is_err());
    }
}
