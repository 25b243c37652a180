//! Expected losses in feature space and their scale-free combination.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::density::{check_observed, FeatureSamples};
use crate::error::{Error, Result};
use crate::features::FeatureValue;

/// Loss between a simulated and an observed feature value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Quadratic,
    Absolute,
    /// Disagreement indicator; values within `tolerance` count as equal.
    ZeroOne {
        tolerance: f64,
    },
}

impl LossKind {
    pub fn eval(&self, simulated: f64, observed: f64) -> f64 {
        let diff = simulated - observed;
        match *self {
            LossKind::Quadratic => diff * diff,
            LossKind::Absolute => diff.abs(),
            LossKind::ZeroOne { tolerance } => (diff.abs() > tolerance) as u8 as f64,
        }
    }

    pub fn token(&self) -> &'static str {
        match self {
            LossKind::Quadratic => "quadratic",
            LossKind::Absolute => "absolute",
            LossKind::ZeroOne { .. } => "zero_one",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossKind::ZeroOne { tolerance } if *tolerance != 0.0 => {
                write!(f, "zero_one:{tolerance}")
            }
            other => f.write_str(other.token()),
        }
    }
}

/// `quadratic`, `absolute`, `zero_one` or `zero_one:<tolerance>`.
impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().split_once(':') {
            None => match s.trim() {
                "quadratic" => Ok(LossKind::Quadratic),
                "absolute" => Ok(LossKind::Absolute),
                "zero_one" => Ok(LossKind::ZeroOne { tolerance: 0.0 }),
                other => Err(Error::InvalidInput(format!("unknown loss {other:?}"))),
            },
            Some(("zero_one", tol)) => match tol.trim().parse::<f64>() {
                Ok(t) if t >= 0.0 => Ok(LossKind::ZeroOne { tolerance: t }),
                _ => Err(Error::InvalidInput(format!(
                    "bad zero_one tolerance {tol:?}"
                ))),
            },
            Some(_) => Err(Error::InvalidInput(format!("unknown loss {s:?}"))),
        }
    }
}

/// Monte Carlo average of `loss(f(G_i), f(D))` over the samples.
pub fn expected_loss(
    samples: &FeatureSamples,
    observed: &FeatureValue,
    loss: LossKind,
) -> Result<f64> {
    check_observed(samples, observed)?;
    if let LossKind::ZeroOne { tolerance } = loss {
        if !(tolerance >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "zero-one tolerance {tolerance} is negative"
            )));
        }
    }
    let x = observed.as_f64();
    let total: f64 = samples
        .values()
        .iter()
        .map(|v| loss.eval(v.as_f64(), x))
        .sum();
    Ok(total / samples.len() as f64)
}

/// Arithmetic mean of the per-feature ratios `el1_j / el2_j`.
pub fn combined_loss_ratio(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput(
            "need at least one expected-loss pair".into(),
        ));
    }
    let mut total = 0.0;
    for (j, &(el1, el2)) in pairs.iter().enumerate() {
        if !(el1 >= 0.0) || !(el2 >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "expected losses must be non-negative (pair {j})"
            )));
        }
        if el2 == 0.0 {
            return Err(Error::DegenerateRatio(j));
        }
        total += el1 / el2;
    }
    Ok(total / pairs.len() as f64)
}
