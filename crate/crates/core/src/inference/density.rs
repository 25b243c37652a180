//! Feature ensembles and their density estimates.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{extract_feature, FeatureKind, FeatureValue};
use crate::graph::Graph;

/// Additive smoothing used for discrete evidences unless overridden.
pub const DEFAULT_PSEUDO_COUNT: f64 = 0.5;

/// Monte Carlo draws of one feature from one model's prior predictive.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSamples {
    pub kind: FeatureKind,
    pub model_id: String,
    values: Vec<FeatureValue>,
}

impl FeatureSamples {
    pub fn new(
        kind: FeatureKind,
        model_id: impl Into<String>,
        values: Vec<FeatureValue>,
    ) -> Result<Self> {
        let Some(first) = values.first() else {
            return Err(Error::InvalidInput(
                "feature samples must be non-empty".into(),
            ));
        };
        if values
            .iter()
            .any(|v| v.is_discrete() != first.is_discrete())
        {
            return Err(Error::InvalidInput(
                "feature samples mix discrete and continuous values".into(),
            ));
        }
        Ok(FeatureSamples {
            kind,
            model_id: model_id.into(),
            values,
        })
    }

    /// Extracts `kind` from every graph, in order.
    pub fn from_graphs(
        kind: FeatureKind,
        model_id: impl Into<String>,
        graphs: &[Graph],
    ) -> Result<Self> {
        let values = graphs
            .par_iter()
            .map(|g| extract_feature(g, kind))
            .collect::<Result<Vec<_>>>()?;
        FeatureSamples::new(kind, model_id, values)
    }

    pub fn values(&self) -> &[FeatureValue] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_discrete(&self) -> bool {
        self.values[0].is_discrete()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.values.iter().map(FeatureValue::as_f64).collect()
    }

    fn check_variant(&self, observed: &FeatureValue) -> Result<()> {
        if observed.is_discrete() != self.is_discrete() {
            return Err(Error::InvalidInput(format!(
                "observed {} value does not match {} samples of {}",
                variant_name(observed.is_discrete()),
                variant_name(self.is_discrete()),
                self.kind
            )));
        }
        Ok(())
    }
}

fn variant_name(discrete: bool) -> &'static str {
    if discrete {
        "discrete"
    } else {
        "continuous"
    }
}

/// Estimated distribution of a feature under one model.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityEstimate {
    /// Smoothed empirical pmf; `counts` is sorted by value.
    DiscretePmf {
        counts: Vec<(f64, usize)>,
        total: usize,
        pseudo_count: f64,
        discrete: bool,
    },
    /// Gaussian kernel density estimate.
    Kde { samples: Vec<f64>, bandwidth: f64 },
}

/// Sample quantile with linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Silverman's rule `0.9 · min(σ̂, IQR/1.34) · N^(-1/5)`; falls back to σ̂
/// alone when the IQR is zero. Returns 0 for zero-variance data.
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    if sd == 0.0 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * (n as f64).powf(-0.2)
}

fn pmf_from(values: &[f64], pseudo_count: f64, discrete: bool) -> DensityEstimate {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut counts: Vec<(f64, usize)> = Vec::new();
    for x in sorted {
        match counts.last_mut() {
            Some((v, c)) if *v == x => *c += 1,
            _ => counts.push((x, 1)),
        }
    }
    DensityEstimate::DiscretePmf {
        counts,
        total: values.len(),
        pseudo_count,
        discrete,
    }
}

pub fn estimate_density(samples: &FeatureSamples) -> Result<DensityEstimate> {
    estimate_density_with(samples, DEFAULT_PSEUDO_COUNT)
}

/// Discrete samples become a smoothed pmf; continuous samples a Gaussian KDE
/// with Silverman bandwidth, or a point-mass pmf when they have zero variance.
pub fn estimate_density_with(
    samples: &FeatureSamples,
    pseudo_count: f64,
) -> Result<DensityEstimate> {
    if samples.is_empty() {
        return Err(Error::InvalidInput(
            "cannot estimate a density from no samples".into(),
        ));
    }
    if !(pseudo_count > 0.0) || !pseudo_count.is_finite() {
        return Err(Error::InvalidInput(format!(
            "pseudo-count {pseudo_count} must be positive"
        )));
    }
    let values = samples.as_f64();
    if samples.is_discrete() {
        return Ok(pmf_from(&values, pseudo_count, true));
    }
    let bandwidth = silverman_bandwidth(&values);
    if bandwidth > 0.0 {
        Ok(DensityEstimate::Kde {
            samples: values,
            bandwidth,
        })
    } else {
        Ok(pmf_from(&values, pseudo_count, false))
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

impl DensityEstimate {
    pub fn is_kde(&self) -> bool {
        matches!(self, DensityEstimate::Kde { .. })
    }

    /// Natural log of [`evidence`]; stays finite where the linear value underflows.
    pub fn log_evidence(&self, observed: &FeatureValue) -> Result<f64> {
        match self {
            DensityEstimate::DiscretePmf {
                counts,
                total,
                pseudo_count,
                discrete,
            } => {
                if observed.is_discrete() != *discrete {
                    return Err(Error::InvalidInput(format!(
                        "observed {} value against a pmf of {} values",
                        variant_name(observed.is_discrete()),
                        variant_name(*discrete)
                    )));
                }
                let x = observed.as_f64();
                let (seen, support) = match counts.iter().find(|(v, _)| *v == x) {
                    Some(&(_, c)) => (c, counts.len()),
                    None => (0, counts.len() + 1),
                };
                let num = seen as f64 + pseudo_count;
                let den = *total as f64 + pseudo_count * support as f64;
                Ok(num.ln() - den.ln())
            }
            DensityEstimate::Kde { samples, bandwidth } => {
                if observed.is_discrete() {
                    return Err(Error::InvalidInput(
                        "observed discrete value against a kernel density".into(),
                    ));
                }
                let x = observed.as_f64();
                let h = *bandwidth;
                let kernels = samples.iter().map(move |&xi| {
                    let z = (x - xi) / h;
                    -0.5 * z * z
                });
                let norm = (samples.len() as f64 * h).ln() + 0.5 * (2.0 * PI).ln();
                Ok(log_sum_exp(kernels) - norm)
            }
        }
    }

    /// Smoothed probability (pmf) or density (KDE) of `observed`.
    pub fn evidence(&self, observed: &FeatureValue) -> Result<f64> {
        Ok(self.log_evidence(observed)?.exp())
    }

    /// Plot data: `(x, density)` on an even grid for a KDE, or
    /// `(value, smoothed probability)` per support point for a pmf.
    pub fn curve(&self, points: usize) -> Vec<(f64, f64)> {
        match self {
            DensityEstimate::DiscretePmf {
                counts,
                total,
                pseudo_count,
                ..
            } => {
                let den = *total as f64 + pseudo_count * counts.len() as f64;
                counts
                    .iter()
                    .map(|&(v, c)| (v, (c as f64 + pseudo_count) / den))
                    .collect()
            }
            DensityEstimate::Kde { samples, bandwidth } => {
                let lo = samples.iter().copied().fold(f64::INFINITY, f64::min) - 3.0 * bandwidth;
                let hi =
                    samples.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 3.0 * bandwidth;
                let points = points.max(2);
                (0..points)
                    .map(|i| {
                        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
                        let y = self
                            .evidence(&FeatureValue::Continuous(x))
                            .expect("continuous query");
                        (x, y)
                    })
                    .collect()
            }
        }
    }
}

/// Convenience wrapper over [`DensityEstimate::evidence`].
pub fn evidence(density: &DensityEstimate, observed: &FeatureValue) -> Result<f64> {
    density.evidence(observed)
}

/// Checks that `observed` can be compared against `samples`.
pub(crate) fn check_observed(samples: &FeatureSamples, observed: &FeatureValue) -> Result<()> {
    samples.check_variant(observed)
}
