//! Finite probability vectors and privacy budgets.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Rows whose total mass is within this distance of 1 are renormalized;
/// anything further off is rejected.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A probability vector over a finite output alphabet, indexed by symbol id.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Dist {
    mass: Vec<f64>,
}

impl Dist {
    /// Validates and normalizes `mass`. Entries must be finite and nonnegative
    /// and must sum to 1 within [`NORMALIZATION_TOL`].
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if let Some((i, v)) = mass
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {v}, expected a finite nonnegative number"
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}, expected 1"
            )));
        }
        if (total - 1.0).abs() <= 1e-15 {
            // already normalized; keeps save/load exact
            return Ok(Self { mass });
        }
        Ok(Self {
            mass: mass.into_iter().map(|v| v / total).collect(),
        })
    }

    /// Builds a distribution from arithmetic output: entries in `[-1e-12, 0)`
    /// are clamped to zero before validation.
    pub(crate) fn from_computed(mut mass: Vec<f64>) -> Result<Self> {
        for v in &mut mass {
            if *v < 0.0 && *v >= -1e-12 {
                *v = 0.0;
            }
        }
        Self::new(mass)
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        Ok(Self {
            mass: vec![1.0 / k as f64; k],
        })
    }

    /// Point mass on `symbol` over an alphabet of size `k`.
    pub fn point(k: usize, symbol: usize) -> Result<Self> {
        if symbol >= k {
            return Err(Error::InvalidDistribution(format!(
                "symbol {symbol} outside alphabet of size {k}"
            )));
        }
        let mut mass = vec![0.0; k];
        mass[symbol] = 1.0;
        Ok(Self { mass })
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn get(&self, symbol: usize) -> f64 {
        self.mass[symbol]
    }

    /// Convex combination `sum_i w_i * d_i`.
    pub fn mixture(components: &[(f64, &Dist)]) -> Result<Self> {
        let k = match components.first() {
            Some((_, d)) => d.len(),
            None => return Err(Error::WeightSum(0.0)),
        };
        check_weights(components.iter().map(|(w, _)| *w))?;
        let mut mass = vec![0.0; k];
        for (w, d) in components {
            if d.len() != k {
                return Err(Error::AlphabetMismatch {
                    left: k,
                    right: d.len(),
                });
            }
            for (m, v) in mass.iter_mut().zip(&d.mass) {
                *m += w * v;
            }
        }
        Self::from_computed(mass)
    }

    /// Product distribution over the pair alphabet, row-major in `(self, other)`.
    pub fn product(&self, other: &Dist) -> Dist {
        let mass = self
            .mass
            .iter()
            .flat_map(|a| other.mass.iter().map(move |b| a * b))
            .collect();
        Dist { mass }
    }

    /// Pushforward under a symbol map into an alphabet of size `k`.
    pub fn pushforward(&self, map: &[usize], k: usize) -> Result<Self> {
        if map.len() != self.len() {
            return Err(Error::AlphabetMismatch {
                left: self.len(),
                right: map.len(),
            });
        }
        let mut mass = vec![0.0; k];
        for (&target, v) in map.iter().zip(&self.mass) {
            if target >= k {
                return Err(invalid(
                    "map",
                    format!("target symbol {target} outside alphabet of size {k}"),
                ));
            }
            mass[target] += v;
        }
        Self::from_computed(mass)
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let mass = Vec::<f64>::deserialize(de)?;
        Dist::new(mass).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::WeightSum(w));
        }
        total += w;
    }
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::WeightSum(total));
    }
    Ok(())
}

/// An `(eps, delta)` pair with `eps >= 0` and `delta` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub eps: f64,
    pub delta: f64,
}

impl PrivacyBudget {
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        if eps.is_nan() || eps < 0.0 {
            return Err(invalid("eps", format!("{eps} is not a nonnegative number")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(invalid("delta", format!("{delta} is outside [0, 1]")));
        }
        Ok(Self { eps, delta })
    }

    pub fn pure(eps: f64) -> Result<Self> {
        Self::new(eps, 0.0)
    }

    pub fn is_pure(&self) -> bool {
        self.delta == 0.0
    }
}

pub(crate) fn check_eps(name: &'static str, eps: f64) -> Result<()> {
    if eps.is_nan() || eps < 0.0 {
        Err(invalid(name, format!("{eps} is not a nonnegative number")))
    } else {
        Ok(())
    }
}

pub(crate) fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} is outside [0, 1]")))
    }
}
