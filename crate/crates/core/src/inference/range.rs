//! Range-based elicitation queries over feature ensembles.

use serde::{Deserialize, Serialize};

use super::density::FeatureSamples;
use crate::error::{Error, Result};

/// Fraction of draws inside a range, with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeProbability {
    pub probability: f64,
    pub std_error: f64,
}

/// `P(lo <= feature <= hi)` estimated from `samples`.
pub fn range_probability(samples: &FeatureSamples, lo: f64, hi: f64) -> Result<RangeProbability> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidInput(format!("range [{lo}, {hi}] is empty")));
    }
    let n = samples.len() as f64;
    let inside = samples
        .values()
        .iter()
        .filter(|v| (lo..=hi).contains(&v.as_f64()))
        .count() as f64;
    let p = inside / n;
    Ok(RangeProbability {
        probability: p,
        std_error: (p * (1.0 - p) / n).sqrt(),
    })
}
