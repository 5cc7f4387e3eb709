//! Finite mechanisms: a stochastic matrix from an input alphabet to a shared
//! output alphabet, plus the JSON file format used by the CLI.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dist::{check_eps, Dist};
use crate::error::{Error, Result};

/// On-disk representation. `rows[i]` is the output distribution of `inputs[i]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismFile {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MechanismFile", into = "MechanismFile")]
pub struct Mechanism {
    inputs: Vec<String>,
    outputs: Vec<String>,
    rows: Vec<Dist>,
}

fn check_labels(field: &str, labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::InvalidMechanism(format!(
            "{field}: must not be empty"
        )));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidMechanism(format!(
                "{field}: duplicate label `{l}`"
            )));
        }
    }
    Ok(())
}

fn index_labels(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

impl Mechanism {
    pub fn new(inputs: Vec<String>, outputs: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                if r.len() != outputs.len() {
                    return Err(Error::InvalidMechanism(format!(
                        "rows[{i}]: has {} entries, expected {} (one per output)",
                        r.len(),
                        outputs.len()
                    )));
                }
                Dist::new(r).map_err(|e| Error::InvalidMechanism(format!("rows[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_dists(inputs, outputs, rows)
    }

    pub fn from_dists(inputs: Vec<String>, outputs: Vec<String>, rows: Vec<Dist>) -> Result<Self> {
        check_labels("inputs", &inputs)?;
        check_labels("outputs", &outputs)?;
        if rows.len() != inputs.len() {
            return Err(Error::InvalidMechanism(format!(
                "rows: has {} rows, expected {} (one per input)",
                rows.len(),
                inputs.len()
            )));
        }
        if let Some((i, r)) = rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != outputs.len())
        {
            return Err(Error::InvalidMechanism(format!(
                "rows[{i}]: has {} entries, expected {}",
                r.len(),
                outputs.len()
            )));
        }
        Ok(Self {
            inputs,
            outputs,
            rows,
        })
    }

    /// Mechanism with inputs and outputs labelled `0, 1, ...`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        Self::new(index_labels(rows.len()), index_labels(k), rows)
    }

    pub(crate) fn from_dist_rows(rows: Vec<Dist>) -> Result<Self> {
        let k = rows.first().map_or(0, Dist::len);
        Self::from_dists(index_labels(rows.len()), index_labels(k), rows)
    }

    /// Binary randomized response: reports the input bit with probability
    /// `e^eps / (1 + e^eps)`.
    pub fn randomized_response(eps: f64) -> Result<Self> {
        check_eps("eps", eps)?;
        let keep = 1.0 / (1.0 + (-eps).exp());
        let flip = 1.0 / (1.0 + eps.exp());
        Self::from_rows(vec![vec![keep, flip], vec![flip, keep]])
    }

    /// Every input maps to the same distribution.
    pub fn constant(num_inputs: usize, row: Dist) -> Result<Self> {
        Self::from_dist_rows(vec![row; num_inputs])
    }

    /// Same labels as `self`, every row uniform.
    pub fn uniform_like(&self) -> Self {
        let u = Dist::uniform(self.num_outputs()).expect("outputs are non-empty");
        Self {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            rows: vec![u; self.num_inputs()],
        }
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn rows(&self) -> &[Dist] {
        &self.rows
    }

    pub fn row(&self, input: usize) -> &Dist {
        &self.rows[input]
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn input_index(&self, label: &str) -> Result<usize> {
        self.inputs
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownInput(label.to_string()))
    }

    pub fn output_index(&self, label: &str) -> Option<usize> {
        self.outputs.iter().position(|l| l == label)
    }

    pub(crate) fn check_input(&self, input: usize) -> Result<()> {
        if input < self.num_inputs() {
            Ok(())
        } else {
            Err(Error::UnknownInput(format!("#{input}")))
        }
    }

    /// Keeps only the listed inputs, in the given order.
    pub fn restrict(&self, inputs: &[usize]) -> Result<Self> {
        for &i in inputs {
            self.check_input(i)?;
        }
        Self::from_dists(
            inputs.iter().map(|&i| self.inputs[i].clone()).collect(),
            self.outputs.clone(),
            inputs.iter().map(|&i| self.rows[i].clone()).collect(),
        )
    }

    /// Sequential composition: feeds each output of `self` into `next`.
    /// `next` must have one input per output of `self`.
    pub fn then(&self, next: &Mechanism) -> Result<Self> {
        if next.num_inputs() != self.num_outputs() {
            return Err(Error::AlphabetMismatch {
                left: self.num_outputs(),
                right: next.num_inputs(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut mass = vec![0.0; next.num_outputs()];
                for (y, &p) in row.mass().iter().enumerate() {
                    for (m, q) in mass.iter_mut().zip(next.rows[y].mass()) {
                        *m += p * q;
                    }
                }
                Dist::from_computed(mass)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_dists(self.inputs.clone(), next.outputs.clone(), rows)
    }

    pub(crate) fn same_shape(&self, other: &Mechanism) -> Result<()> {
        if self.num_inputs() != other.num_inputs() {
            return Err(Error::AlphabetMismatch {
                left: self.num_inputs(),
                right: other.num_inputs(),
            });
        }
        if self.num_outputs() != other.num_outputs() {
            return Err(Error::AlphabetMismatch {
                left: self.num_outputs(),
                right: other.num_outputs(),
            });
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()? + "\n")?;
        Ok(())
    }
}

impl TryFrom<MechanismFile> for Mechanism {
    type Error = Error;

    fn try_from(f: MechanismFile) -> Result<Self> {
        Mechanism::new(f.inputs, f.outputs, f.rows)
    }
}

impl From<Mechanism> for MechanismFile {
    fn from(m: Mechanism) -> Self {
        MechanismFile {
            inputs: m.inputs,
            outputs: m.outputs,
            rows: m.rows.into_iter().map(|r| r.mass().to_vec()).collect(),
        }
    }
}
