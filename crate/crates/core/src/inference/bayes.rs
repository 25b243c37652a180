//! Bayes factors, posterior model probabilities and the loss-penalized decision.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-negative ratio that may be infinite (zero denominator, positive numerator).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    Infinite,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        match *self {
            Ratio::Finite(x) => x,
            Ratio::Infinite => f64::INFINITY,
        }
    }

    fn from_f64(x: f64) -> Ratio {
        if x.is_infinite() {
            Ratio::Infinite
        } else {
            Ratio::Finite(x)
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(x) => write!(f, "{x}"),
            Ratio::Infinite => f.write_str("inf"),
        }
    }
}

/// Finite ratios serialize as numbers, the infinite marker as the string `"inf"`.
impl Serialize for Ratio {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ratio::Finite(x) => s.serialize_f64(*x),
            Ratio::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Marker(String),
        }
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(Ratio::Finite(x)),
            Repr::Marker(s) if s == "inf" => Ok(Ratio::Infinite),
            Repr::Marker(s) => Err(serde::de::Error::custom(format!(
                "unknown ratio marker {s:?}"
            ))),
        }
    }
}

/// `ev1 / ev2`, with the infinite marker when only `ev2` is zero.
pub fn bayes_factor(ev1: f64, ev2: f64) -> Result<Ratio> {
    if !(ev1 >= 0.0) || !(ev2 >= 0.0) || !ev1.is_finite() || !ev2.is_finite() {
        return Err(Error::InvalidInput(format!(
            "evidences must be finite and non-negative, got {ev1} and {ev2}"
        )));
    }
    match (ev1 == 0.0, ev2 == 0.0) {
        (true, true) => Err(Error::UndefinedBayesFactor),
        (false, true) => Ok(Ratio::Infinite),
        _ => Ok(Ratio::from_f64(ev1 / ev2)),
    }
}

/// Bayes factor from log-evidences, robust to underflow of either evidence.
pub fn bayes_factor_from_log(log_ev1: f64, log_ev2: f64) -> Result<Ratio> {
    if log_ev1.is_nan() || log_ev2.is_nan() || log_ev1 == f64::INFINITY || log_ev2 == f64::INFINITY
    {
        return Err(Error::InvalidInput(
            "log-evidences must not be NaN or +inf".into(),
        ));
    }
    match (log_ev1 == f64::NEG_INFINITY, log_ev2 == f64::NEG_INFINITY) {
        (true, true) => Err(Error::UndefinedBayesFactor),
        (false, true) => Ok(Ratio::Infinite),
        _ => Ok(Ratio::from_f64((log_ev1 - log_ev2).exp())),
    }
}

/// `p_i ∝ evidence_i · prior_i`, normalized.
pub fn posterior_model_probs(evidences: &[f64], priors: &[f64]) -> Result<Vec<f64>> {
    if evidences.len() != priors.len() || evidences.is_empty() {
        return Err(Error::InvalidInput(
            "evidences and priors must be non-empty and of equal length".into(),
        ));
    }
    if priors
        .iter()
        .chain(evidences)
        .any(|&x| !(x >= 0.0) || !x.is_finite())
    {
        return Err(Error::InvalidInput(
            "evidences and priors must be finite and non-negative".into(),
        ));
    }
    if priors.iter().sum::<f64>() <= 0.0 {
        return Err(Error::InvalidInput("model priors sum to zero".into()));
    }
    let products: Vec<f64> = evidences.iter().zip(priors).map(|(e, p)| e * p).collect();
    let total: f64 = products.iter().sum();
    if total <= 0.0 {
        return Err(Error::UndefinedPosterior);
    }
    Ok(products.into_iter().map(|x| x / total).collect())
}

/// Normalizes log-weights without leaving log space until the end.
pub fn softmax_log_weights(log_weights: &[f64]) -> Result<Vec<f64>> {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return Err(Error::UndefinedPosterior);
    }
    let scaled: Vec<f64> = log_weights.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = scaled.iter().sum();
    Ok(scaled.into_iter().map(|x| x / total).collect())
}

/// Outcome of the loss-penalized comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Model1,
    Model2,
    Indeterminate,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Model1 => "model_1",
            Decision::Model2 => "model_2",
            Decision::Indeterminate => "indeterminate",
        })
    }
}

/// Human-readable statement of the rule implemented by [`decide`].
pub const DECISION_RULE: &str =
    "choose model_1 iff combined_ratio < posterior_odds; model_2 iff greater; \
     indeterminate when equal within relative tolerance 1e-9";

const TIE_TOLERANCE: f64 = 1e-9;

/// Model 1 when the combined loss ratio `K1/K2` is below the posterior odds
/// `P(M1|D)/P(M2|D)`, model 2 when above.
pub fn decide(combined_ratio: f64, posterior_odds: Ratio) -> Decision {
    let odds = posterior_odds.value();
    match (combined_ratio.is_infinite(), odds.is_infinite()) {
        (true, true) => return Decision::Indeterminate,
        (false, true) => return Decision::Model1,
        (true, false) => return Decision::Model2,
        (false, false) => {}
    }
    let scale = combined_ratio.abs().max(odds.abs());
    if (combined_ratio - odds).abs() <= TIE_TOLERANCE * scale {
        Decision::Indeterminate
    } else if combined_ratio < odds {
        Decision::Model1
    } else {
        Decision::Model2
    }
}
