//! Posterior weights over a grid of parameter hypotheses.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bayes::softmax_log_weights;
use super::density::{estimate_density_with, FeatureSamples};
use crate::error::{Error, Result};
use crate::features::{FeatureKind, FeatureValue};
use crate::generators::{prior_predictive, GridPoint, ModelSpec};

/// One hypothesis of the joint grid after evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorPoint {
    pub family: String,
    pub param: String,
    pub value: f64,
    pub prior_weight: f64,
    pub log_evidence: f64,
    pub evidence: f64,
    pub posterior: f64,
    /// `ln(posterior)`, finite even where `posterior` underflows to zero.
    pub log_posterior: f64,
}

/// Posterior over a (possibly multi-family) parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamPosterior {
    pub points: Vec<PosteriorPoint>,
}

impl ParamPosterior {
    /// Total posterior mass of grid points for `param` with value in `[lo, hi]`.
    pub fn window_probability(&self, param: &str, lo: f64, hi: f64) -> f64 {
        self.points
            .iter()
            .filter(|p| p.param == param && p.value >= lo && p.value <= hi)
            .map(|p| p.posterior)
            .sum()
    }

    /// Natural log of [`window_probability`](Self::window_probability),
    /// `-inf` for a window that contains no grid point.
    pub fn window_log_probability(&self, param: &str, lo: f64, hi: f64) -> f64 {
        let logs: Vec<f64> = self
            .points
            .iter()
            .filter(|p| p.param == param && p.value >= lo && p.value <= hi)
            .map(|p| p.log_posterior)
            .collect();
        log_sum_exp(&logs)
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Joins the grid priors of several specs into one hypothesis list.
///
/// Each point's prior weight is proportional to its within-grid weight times
/// the grid size, so uniform grids give a flat prior over all points and a
/// single spec keeps its own grid weights.
pub fn joint_grid(specs: &[ModelSpec]) -> Result<Vec<GridPoint>> {
    if specs.is_empty() {
        return Err(Error::InvalidInput("need at least one grid spec".into()));
    }
    let mut points = Vec::new();
    for spec in specs {
        let grid = spec.grid_points()?;
        let size = grid.len() as f64;
        points.extend(grid.into_iter().map(|mut p| {
            p.weight *= size;
            p
        }));
    }
    let total: f64 = points.iter().map(|p| p.weight).sum();
    if total <= 0.0 {
        return Err(Error::InvalidSpec("grid prior weights sum to zero".into()));
    }
    for p in &mut points {
        p.weight /= total;
    }
    Ok(points)
}

/// Simulates `n_per_point` graphs per grid point (all points share the seed
/// stream), evaluates the density of `kind` at `observed`, and normalizes
/// `prior · evidence` into posterior weights.
pub fn param_posterior(
    observed: &FeatureValue,
    kind: FeatureKind,
    grid: &[GridPoint],
    n_per_point: usize,
    master_seed: u64,
    pseudo_count: f64,
) -> Result<ParamPosterior> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty parameter grid".into()));
    }
    let log_evidences = grid
        .par_iter()
        .map(|point| {
            let graphs = prior_predictive(&point.spec, n_per_point, master_seed)?;
            let samples = FeatureSamples::from_graphs(kind, point.spec.family(), &graphs)?;
            estimate_density_with(&samples, pseudo_count)?.log_evidence(observed)
        })
        .collect::<Result<Vec<f64>>>()?;
    let log_weights: Vec<f64> = grid
        .iter()
        .zip(&log_evidences)
        .map(|(p, &le)| {
            if p.weight > 0.0 {
                p.weight.ln() + le
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let posterior = softmax_log_weights(&log_weights)?;
    let log_norm = log_sum_exp(&log_weights);
    let points = grid
        .iter()
        .zip(log_evidences)
        .zip(posterior)
        .zip(&log_weights)
        .map(|(((p, log_evidence), posterior), lw)| PosteriorPoint {
            family: p.spec.family().to_string(),
            param: p.param.to_string(),
            value: p.value,
            prior_weight: p.weight,
            log_evidence,
            evidence: log_evidence.exp(),
            posterior,
            log_posterior: lw - log_norm,
        })
        .collect();
    Ok(ParamPosterior { points })
}
