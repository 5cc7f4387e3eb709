//! Amplification by subsampling: the closed-form budget and an explicit
//! uniform fixed-size subsampler over small enumerated datasets.

use serde::{Deserialize, Serialize};

use crate::audit::{audit_pure_central, NeighborPair};
use crate::dist::{check_eps, check_unit, Dist, PrivacyBudget};
use crate::error::{invalid, Error, Result};
use crate::limits::EnumLimits;
use crate::mechanism::Mechanism;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsampleParams {
    pub n: usize,
    pub m: usize,
    /// Largest inclusion probability of any record.
    pub p: f64,
}

impl SubsampleParams {
    /// Uniform size-`m` subsets of `n` records, so `p = m / n`.
    pub fn uniform(n: usize, m: usize) -> Result<Self> {
        if m == 0 || m > n {
            return Err(invalid("m", format!("need 1 <= m <= n, got m={m}, n={n}")));
        }
        Ok(Self {
            n,
            m,
            p: m as f64 / n as f64,
        })
    }
}

/// `(ln(1 + p (e^eps - 1)), p delta)`.
pub fn subsample_budget(eps: f64, delta: f64, p: f64) -> Result<PrivacyBudget> {
    check_eps("eps", eps)?;
    check_unit("delta", delta)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p", format!("{p} is outside (0, 1]")));
    }
    if p == 1.0 {
        return PrivacyBudget::new(eps, delta);
    }
    PrivacyBudget::new((p * eps.exp_m1()).ln_1p(), p * delta)
}

/// All datasets of `size` records over a record alphabet `0..alphabet`, in
/// lexicographic order (first record most significant).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetSpace {
    pub alphabet: usize,
    pub size: usize,
}

impl DatasetSpace {
    pub fn new(alphabet: usize, size: usize) -> Self {
        Self { alphabet, size }
    }

    pub fn len(&self) -> usize {
        self.alphabet.pow(self.size as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dataset(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.size];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = rest % self.alphabet;
            rest /= self.alphabet;
        }
        out
    }

    pub fn index(&self, records: &[usize]) -> usize {
        records.iter().fold(0, |acc, &r| acc * self.alphabet + r)
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len())
            .map(|i| {
                self.dataset(i)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect()
    }

    /// Unordered pairs of datasets differing in exactly one record.
    pub fn neighbors(&self) -> Vec<NeighborPair> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            let d = self.dataset(i);
            for pos in 0..self.size {
                for v in d[pos] + 1..self.alphabet {
                    let mut e = d.clone();
                    e[pos] = v;
                    out.push(NeighborPair::Inputs(i, self.index(&e)));
                }
            }
        }
        out
    }
}

fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < m - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::with_capacity(m), &mut out);
    out
}

fn record_alphabet(base: &Mechanism, m: usize) -> Result<usize> {
    let k = base.num_inputs();
    (1..=k)
        .find(|r| r.checked_pow(m as u32) == Some(k))
        .ok_or_else(|| {
            invalid(
                "base",
                format!("{k} inputs is not (record alphabet)^{m} for any alphabet size"),
            )
        })
}

/// Mechanism on `n`-record datasets that runs `base` on a uniformly random
/// size-`m` subset of the records (kept in their original order).
///
/// `base` must take its inputs in [`DatasetSpace`] order over `m` records.
pub fn build_subsampled(base: &Mechanism, n: usize, m: usize) -> Result<Mechanism> {
    build_subsampled_with_limits(base, n, m, &EnumLimits::current())
}

pub fn build_subsampled_with_limits(
    base: &Mechanism,
    n: usize,
    m: usize,
    limits: &EnumLimits,
) -> Result<Mechanism> {
    SubsampleParams::uniform(n, m)?;
    let alphabet = record_alphabet(base, m)?;
    if alphabet > limits.max_record_alphabet || n > limits.max_dataset_size {
        return Err(Error::EnumerationLimit(format!(
            "record alphabet {alphabet} and dataset size {n} exceed caps {} and {}",
            limits.max_record_alphabet, limits.max_dataset_size
        )));
    }
    let small = DatasetSpace::new(alphabet, m);
    let large = DatasetSpace::new(alphabet, n);
    let subsets = subsets(n, m);
    let w = 1.0 / subsets.len() as f64;
    let rows = (0..large.len())
        .map(|i| {
            let d = large.dataset(i);
            let parts: Vec<(f64, &Dist)> = subsets
                .iter()
                .map(|u| {
                    let picked: Vec<usize> = u.iter().map(|&j| d[j]).collect();
                    (w, base.row(small.index(&picked)))
                })
                .collect();
            Dist::mixture(&parts)
        })
        .collect::<Result<Vec<_>>>()?;
    Mechanism::from_dists(large.labels(), base.outputs().to_vec(), rows)
}

/// The worst case for subsampling over binary records: randomized response
/// with parameter `eps` on the bit "some record of the input is 1". On the
/// pair (all zeros, one 1) this is randomized response on the differing
/// record.
pub fn worst_case_base(eps: f64, m: usize) -> Result<Mechanism> {
    let rr = Mechanism::randomized_response(eps)?;
    let space = DatasetSpace::new(2, m);
    let rows = (0..space.len())
        .map(|i| {
            let any = space.dataset(i).contains(&1);
            rr.row(usize::from(any)).clone()
        })
        .collect();
    Mechanism::from_dists(space.labels(), rr.outputs().to_vec(), rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsampleTightness {
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    pub bound: f64,
    pub audited_eps: f64,
    /// `bound - audited_eps`.
    pub gap: f64,
    /// `audited_eps <= bound` and `gap <= 1e-9`.
    pub tight: bool,
}

/// Audits the subsampled worst-case mechanism exactly and compares it with
/// `ln(1 + (m/n)(e^eps - 1))`.
pub fn verify_subsample_tightness(eps: f64, n: usize, m: usize) -> Result<SubsampleTightness> {
    let params = SubsampleParams::uniform(n, m)?;
    let base = worst_case_base(eps, m)?;
    let sub = build_subsampled(&base, n, m)?;
    let audited_eps = audit_pure_central(&sub, &DatasetSpace::new(2, n).neighbors())?;
    let bound = subsample_budget(eps, 0.0, params.p)?.eps;
    let gap = bound - audited_eps;
    Ok(SubsampleTightness {
        n,
        m,
        eps,
        bound,
        audited_eps,
        gap,
        tight: gap.abs() <= 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::audit_central;

    #[test]
    fn budget_examples() {
        let b = subsample_budget(0.8, 0.02, 1.0).unwrap();
        assert_eq!((b.eps, b.delta), (0.8, 0.02));
        let b = subsample_budget(1.0, 0.01, 0.1).unwrap();
        assert!((b.eps - 0.158_565_078_740_429_1).abs() < 1e-12);
        assert!((b.delta - 0.001).abs() < 1e-18);
        let tiny = subsample_budget(1e-6, 0.0, 0.3).unwrap();
        assert!((tiny.eps / 1e-6 - 0.3).abs() < 1e-6);
        assert!(subsample_budget(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn dataset_space_indexing() {
        let s = DatasetSpace::new(3, 2);
        assert_eq!(s.len(), 9);
        for i in 0..s.len() {
            assert_eq!(s.index(&s.dataset(i)), i);
        }
        assert_eq!(s.labels()[5], "1,2");
        // each dataset has size * (alphabet - 1) neighbors, each pair counted once
        assert_eq!(s.neighbors().len(), 9 * 2 * 2 / 2);
    }

    #[test]
    fn full_sample_is_identity() {
        let base = Mechanism::from_rows(vec![
            vec![0.1, 0.9],
            vec![0.4, 0.6],
            vec![0.5, 0.5],
            vec![0.8, 0.2],
        ])
        .unwrap();
        let sub = build_subsampled(&base, 2, 2).unwrap();
        assert_eq!(sub.rows(), base.rows());
        assert!(verify_subsample_tightness(0.7, 3, 3).unwrap().gap.abs() < 1e-12);
    }

    #[test]
    fn two_records_one_sampled_averages_rows() {
        let rr = Mechanism::randomized_response(1.0).unwrap();
        let sub = build_subsampled(&rr, 2, 1).unwrap();
        let row = sub.row(DatasetSpace::new(2, 2).index(&[0, 1]));
        assert!((row.get(0) - 0.5).abs() < 1e-15);
        assert_eq!(sub.row(0), rr.row(0));
    }

    #[test]
    fn three_choose_two_pure() {
        let eps: f64 = 0.9;
        let base = worst_case_base(eps, 2).unwrap();
        let sub = build_subsampled(&base, 3, 2).unwrap();
        let bound = (2.0 / 3.0 * eps.exp_m1()).ln_1p();
        assert!(audit_central(&sub, &DatasetSpace::new(2, 3).neighbors(), bound).unwrap() < 1e-12);
    }

    #[test]
    fn tightness_examples() {
        let t = verify_subsample_tightness(1.0, 2, 1).unwrap();
        assert!((t.audited_eps - 0.620_114_506_958_277_5).abs() < 1e-9 && t.tight);
        let t = verify_subsample_tightness(0.5, 4, 1).unwrap();
        assert!((t.audited_eps - 0.150_297_825_112_805_6).abs() < 1e-9 && t.tight);
    }

    #[test]
    fn limits_and_shape_errors() {
        let base = Mechanism::from_rows(vec![vec![1.0]; 5]).unwrap();
        assert!(build_subsampled(&base, 3, 2).is_err());
        let rr = Mechanism::randomized_response(1.0).unwrap();
        assert!(matches!(
            build_subsampled_with_limits(&rr, 7, 1, &EnumLimits::default()),
            Err(Error::EnumerationLimit(_))
        ));
        assert!(build_subsampled(&rr, 2, 3).is_err());
    }
}
