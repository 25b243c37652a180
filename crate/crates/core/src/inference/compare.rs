//! End-to-end comparison of two models against one observed graph.

use serde::{Deserialize, Serialize};

use super::bayes::{
    bayes_factor_from_log, decide, softmax_log_weights, Decision, Ratio, DECISION_RULE,
};
use super::density::{
    estimate_density_with, DensityEstimate, FeatureSamples, DEFAULT_PSEUDO_COUNT,
};
use super::loss::{combined_loss_ratio, expected_loss, LossKind};
use crate::error::{Error, Result};
use crate::features::{extract_feature, FeatureKind, FeatureValue};
use crate::generators::{prior_predictive, ModelSpec};
use crate::graph::Graph;

/// Recorded in every report: block counts come from the normalized-adjacency eigengap.
pub const BLOCK_COUNT_METHOD: &str = "spectral_eigengap";

const SEED_STREAM_NOTE: &str =
    "both models draw sample i from the same derived seed (master_seed, i)";

/// Knobs of a comparison run.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub features: Vec<FeatureKind>,
    pub loss: LossKind,
    pub n_samples: usize,
    pub master_seed: u64,
    /// Prior probabilities of model 1 and model 2; need not be normalized.
    pub model_priors: [f64; 2],
    pub pseudo_count: f64,
}

impl CompareOptions {
    pub fn new(
        features: Vec<FeatureKind>,
        loss: LossKind,
        n_samples: usize,
        master_seed: u64,
    ) -> Self {
        CompareOptions {
            features,
            loss,
            n_samples,
            master_seed,
            model_priors: [0.5, 0.5],
            pseudo_count: DEFAULT_PSEUDO_COUNT,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::InvalidInput(
                "at least one feature is required".into(),
            ));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidInput(
                "sample count must be at least 1".into(),
            ));
        }
        if self
            .model_priors
            .iter()
            .any(|&p| !(p >= 0.0) || !p.is_finite())
            || self.model_priors.iter().sum::<f64>() <= 0.0
        {
            return Err(Error::InvalidInput(
                "model priors must be finite, non-negative and not both zero".into(),
            ));
        }
        if !(self.pseudo_count > 0.0) || !self.pseudo_count.is_finite() {
            return Err(Error::InvalidInput("pseudo count must be positive".into()));
        }
        if let LossKind::ZeroOne { tolerance } = self.loss {
            if !(tolerance >= 0.0) {
                return Err(Error::InvalidInput(
                    "zero-one tolerance must be non-negative".into(),
                ));
            }
        }
        Ok(())
    }
}

/// How one model's feature distribution was smoothed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityNote {
    /// `pmf` for discrete features, `kde` for continuous ones, `point_mass`
    /// for a continuous ensemble with zero variance.
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
}

impl DensityNote {
    fn of(d: &DensityEstimate) -> Self {
        match d {
            DensityEstimate::Kde { bandwidth, .. } => DensityNote {
                method: "kde".into(),
                bandwidth: Some(*bandwidth),
            },
            DensityEstimate::DiscretePmf { discrete: true, .. } => DensityNote {
                method: "pmf".into(),
                bandwidth: None,
            },
            DensityEstimate::DiscretePmf {
                discrete: false, ..
            } => DensityNote {
                method: "point_mass".into(),
                bandwidth: None,
            },
        }
    }
}

/// Per-feature row of a [`ComparisonReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub kind: FeatureKind,
    pub observed: FeatureValue,
    pub evidence_1: f64,
    pub evidence_2: f64,
    pub log_evidence_1: f64,
    pub log_evidence_2: f64,
    pub bayes_factor: Ratio,
    pub el_1: f64,
    pub el_2: f64,
    pub loss_ratio: f64,
    pub density_1: DensityNote,
    pub density_2: DensityNote,
}

/// Everything needed to audit one comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub model_1: String,
    pub model_2: String,
    pub spec_1: ModelSpec,
    pub spec_2: ModelSpec,
    pub n_samples: usize,
    pub master_seed: u64,
    pub loss: LossKind,
    pub features: Vec<FeatureRecord>,
    /// Mean of the per-feature `el_1 / el_2`.
    pub combined_ratio: f64,
    pub model_priors: [f64; 2],
    /// `P(M1|D) / P(M2|D)`; features are treated as independent, so this is
    /// the prior odds times the product of per-feature Bayes factors.
    pub posterior_odds: Ratio,
    pub posterior_probs: [f64; 2],
    pub decision: Decision,
    pub decision_rule: String,
    pub block_count_method: String,
    pub seed_stream: String,
    pub pseudo_count: f64,
}

impl ComparisonReport {
    /// Checks the arithmetic relations a well-formed report must satisfy.
    pub fn check_invariants(&self) -> Result<()> {
        let ratios: Vec<(f64, f64)> = self.features.iter().map(|f| (f.el_1, f.el_2)).collect();
        let mean = combined_loss_ratio(&ratios)?;
        if mean.to_bits() != self.combined_ratio.to_bits() {
            return Err(Error::InvalidInput(format!(
                "combined_ratio {} differs from mean loss ratio {mean}",
                self.combined_ratio
            )));
        }
        if decide(self.combined_ratio, self.posterior_odds) != self.decision {
            return Err(Error::InvalidInput(
                "decision disagrees with the decision rule".into(),
            ));
        }
        Ok(())
    }
}

/// Simulated ensembles and densities for one feature, for plot export.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDetail {
    pub samples: [FeatureSamples; 2],
    pub densities: [DensityEstimate; 2],
}

/// A report together with the intermediate ensembles it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRun {
    pub report: ComparisonReport,
    pub details: Vec<FeatureDetail>,
}

/// See [`run_comparison`].
pub fn compare_models(
    data: &Graph,
    model_1: (&str, &ModelSpec),
    model_2: (&str, &ModelSpec),
    options: &CompareOptions,
) -> Result<ComparisonReport> {
    run_comparison(data, model_1, model_2, options).map(|run| run.report)
}

/// Simulates both prior predictives, smooths each feature, and combines
/// evidences and expected losses into a decision.
///
/// Errors with [`Error::DegenerateRatio`] when model 2 reproduces a feature
/// exactly in every sample, and with [`Error::UndefinedFeature`] when a
/// feature is undefined on the data or on any simulated graph.
pub fn run_comparison(
    data: &Graph,
    model_1: (&str, &ModelSpec),
    model_2: (&str, &ModelSpec),
    options: &CompareOptions,
) -> Result<ComparisonRun> {
    options.validate()?;
    model_1.1.validate()?;
    model_2.1.validate()?;
    let graphs_1 = prior_predictive(model_1.1, options.n_samples, options.master_seed)?;
    let graphs_2 = prior_predictive(model_2.1, options.n_samples, options.master_seed)?;

    let mut records = Vec::with_capacity(options.features.len());
    let mut details = Vec::with_capacity(options.features.len());
    for &kind in &options.features {
        let observed = extract_feature(data, kind)?;
        let samples_1 = FeatureSamples::from_graphs(kind, model_1.0, &graphs_1)?;
        let samples_2 = FeatureSamples::from_graphs(kind, model_2.0, &graphs_2)?;
        let density_1 = estimate_density_with(&samples_1, options.pseudo_count)?;
        let density_2 = estimate_density_with(&samples_2, options.pseudo_count)?;
        let log_evidence_1 = density_1.log_evidence(&observed)?;
        let log_evidence_2 = density_2.log_evidence(&observed)?;
        let el_1 = expected_loss(&samples_1, &observed, options.loss)?;
        let el_2 = expected_loss(&samples_2, &observed, options.loss)?;
        records.push(FeatureRecord {
            kind,
            observed,
            evidence_1: log_evidence_1.exp(),
            evidence_2: log_evidence_2.exp(),
            log_evidence_1,
            log_evidence_2,
            bayes_factor: bayes_factor_from_log(log_evidence_1, log_evidence_2)?,
            el_1,
            el_2,
            loss_ratio: el_1 / el_2,
            density_1: DensityNote::of(&density_1),
            density_2: DensityNote::of(&density_2),
        });
        details.push(FeatureDetail {
            samples: [samples_1, samples_2],
            densities: [density_1, density_2],
        });
    }

    let pairs: Vec<(f64, f64)> = records.iter().map(|r| (r.el_1, r.el_2)).collect();
    let combined_ratio = combined_loss_ratio(&pairs)?;

    let [prior_1, prior_2] = options.model_priors;
    let log_joint_1 = prior_1.ln() + records.iter().map(|r| r.log_evidence_1).sum::<f64>();
    let log_joint_2 = prior_2.ln() + records.iter().map(|r| r.log_evidence_2).sum::<f64>();
    let posterior_odds = bayes_factor_from_log(log_joint_1, log_joint_2)?;
    let probs = softmax_log_weights(&[log_joint_1, log_joint_2])?;
    let total_prior = prior_1 + prior_2;

    let report = ComparisonReport {
        model_1: model_1.0.to_string(),
        model_2: model_2.0.to_string(),
        spec_1: model_1.1.clone(),
        spec_2: model_2.1.clone(),
        n_samples: options.n_samples,
        master_seed: options.master_seed,
        loss: options.loss,
        features: records,
        combined_ratio,
        model_priors: [prior_1 / total_prior, prior_2 / total_prior],
        posterior_odds,
        posterior_probs: [probs[0], probs[1]],
        decision: decide(combined_ratio, posterior_odds),
        decision_rule: DECISION_RULE.to_string(),
        block_count_method: BLOCK_COUNT_METHOD.to_string(),
        seed_stream: SEED_STREAM_NOTE.to_string(),
        pseudo_count: options.pseudo_count,
    };
    Ok(ComparisonRun { report, details })
}
