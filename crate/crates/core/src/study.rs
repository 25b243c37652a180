//! Replicated simulation studies: window posteriors over a joint hypothesis
//! grid plus expected-loss ratios between two candidate models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{extract_feature, FeatureKind, FeatureValue};
use crate::generators::{EdgeProbs, Membership, ModelSpec, ParamPrior};
use crate::inference::compare::{compare_models, CompareOptions};
use crate::inference::density::DEFAULT_PSEUDO_COUNT;
use crate::inference::loss::LossKind;
use crate::inference::posterior::{joint_grid, param_posterior, ParamPosterior};
use crate::seed::{derive_seed, rng_for};

/// A posterior query: total mass of grid points for `param` inside `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub label: String,
    pub param: String,
    pub lo: f64,
    pub hi: f64,
}

/// A model with a display name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedModel {
    pub name: String,
    pub spec: ModelSpec,
}

/// One data-generating setting of the study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyRow {
    /// Shown in the `real_param` column.
    pub label: String,
    pub data: ModelSpec,
    /// Feature on which the joint-grid posterior is evaluated.
    pub posterior_feature: FeatureKind,
    /// Features whose expected-loss ratios are averaged.
    pub features: Vec<FeatureKind>,
    pub losses: Vec<LossKind>,
    pub model_1: NamedModel,
    pub model_2: NamedModel,
}

fn default_samples() -> usize {
    100
}

fn default_replications() -> usize {
    1
}

fn default_pseudo_count() -> f64 {
    DEFAULT_PSEUDO_COUNT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_pseudo_count")]
    pub pseudo_count: f64,
    /// Grid-prior specs joined into one flat hypothesis grid.
    pub hypotheses: Vec<ModelSpec>,
    pub windows: Vec<Window>,
    pub rows: Vec<StudyRow>,
}

/// Window posterior of one study record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowResult {
    pub label: String,
    pub probability: f64,
    pub log_probability: f64,
}

/// One `(replication, row, loss)` line of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub replication: usize,
    pub real_param: String,
    pub loss: LossKind,
    pub loss_ratio: f64,
    pub windows: Vec<WindowResult>,
    pub features: Vec<FeatureKind>,
    pub model_1: String,
    pub model_2: String,
    pub posterior_feature: FeatureKind,
    pub observed: FeatureValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub n_samples: usize,
    pub seed: u64,
    pub records: Vec<StudyRecord>,
}

impl StudyConfig {
    /// The two-family design: power-law data at `alpha = 3.2`, SBM data with
    /// ten blocks, and a joint grid over `alpha` and `K`.
    pub fn table4(n: usize, seed: u64) -> StudyConfig {
        let powerlaw = |alpha: ParamPrior| ModelSpec::Powerlaw { n, alpha, d_min: 1 };
        let sbm = |k: ParamPrior| ModelSpec::Sbm {
            n,
            k,
            membership: Membership::Equal,
            edge_probs: EdgeProbs::Planted {
                p_in: 0.3,
                p_out: 0.03,
            },
        };
        let named = |name: &str, spec: ModelSpec| NamedModel {
            name: name.into(),
            spec,
        };
        let alpha_window = powerlaw(ParamPrior::grid(vec![2.9, 3.0, 3.1]));
        let k9 = sbm(ParamPrior::Point(9.0));
        let both_losses = vec![LossKind::Quadratic, LossKind::Absolute];
        let plaw = FeatureKind::PowerLawExponent { d_min: 1 };
        StudyConfig {
            n_samples: 100,
            seed,
            replications: 1,
            pseudo_count: DEFAULT_PSEUDO_COUNT,
            hypotheses: vec![
                powerlaw(ParamPrior::grid(vec![2.9, 3.0, 3.1, 3.3, 3.5])),
                sbm(ParamPrior::grid(vec![8.0, 9.0, 10.0, 12.0])),
            ],
            windows: vec![
                Window {
                    label: "alpha_2.9_3.1".into(),
                    param: "alpha".into(),
                    lo: 2.9,
                    hi: 3.1,
                },
                Window {
                    label: "k_9".into(),
                    param: "k".into(),
                    lo: 9.0,
                    hi: 9.0,
                },
            ],
            rows: vec![
                StudyRow {
                    label: "alpha".into(),
                    data: powerlaw(ParamPrior::Point(3.2)),
                    posterior_feature: plaw,
                    features: vec![plaw],
                    losses: both_losses.clone(),
                    model_1: named("sbm_k9", k9.clone()),
                    model_2: named("powerlaw_alpha_2.9_3.1", alpha_window.clone()),
                },
                StudyRow {
                    label: "K".into(),
                    data: sbm(ParamPrior::Point(10.0)),
                    posterior_feature: plaw,
                    features: vec![FeatureKind::BlockCount { k_max: 12 }],
                    losses: both_losses.clone(),
                    model_1: named("powerlaw_alpha_2.9_3.1", alpha_window.clone()),
                    model_2: named("sbm_k9", k9),
                },
                StudyRow {
                    label: "alpha=3.2".into(),
                    data: powerlaw(ParamPrior::Point(3.2)),
                    posterior_feature: plaw,
                    features: vec![plaw, FeatureKind::DegreeEntropy],
                    losses: both_losses,
                    model_1: named("powerlaw_alpha_2.9_3.1", alpha_window),
                    model_2: named(
                        "powerlaw_alpha_3.3_3.5",
                        powerlaw(ParamPrior::grid(vec![3.3, 3.5])),
                    ),
                },
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 || self.replications == 0 {
            return Err(Error::InvalidInput(
                "n_samples and replications must be at least 1".into(),
            ));
        }
        if self.rows.is_empty() {
            return Err(Error::InvalidInput("study has no rows".into()));
        }
        for w in &self.windows {
            if !(w.lo <= w.hi) {
                return Err(Error::InvalidInput(format!(
                    "window {} has lo > hi",
                    w.label
                )));
            }
        }
        for row in &self.rows {
            if row.features.is_empty() || row.losses.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "row {} needs features and losses",
                    row.label
                )));
            }
            row.data.validate()?;
            row.model_1.spec.validate()?;
            row.model_2.spec.validate()?;
        }
        joint_grid(&self.hypotheses)?;
        Ok(())
    }
}

/// Evaluates the joint-grid posterior for one data graph.
///
/// Seeds: the data graph of row `r` in replication `rep` uses `(seed, rep, r, 0)`,
/// the grid simulations `(seed, rep, r, 1)` and the loss comparison `(seed, rep, r, 2)`.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let grid = joint_grid(&config.hypotheses)?;
    let mut records = Vec::new();
    for rep in 0..config.replications {
        for (r, row) in config.rows.iter().enumerate() {
            let path = |stage: u64| [rep as u64, r as u64, stage];
            let data = row.data.sample_graph(&mut rng_for(config.seed, &path(0)))?;
            let observed = extract_feature(&data, row.posterior_feature)?;
            let posterior: ParamPosterior = param_posterior(
                &observed,
                row.posterior_feature,
                &grid,
                config.n_samples,
                derive_seed(config.seed, &path(1)),
                config.pseudo_count,
            )?;
            let windows: Vec<WindowResult> = config
                .windows
                .iter()
                .map(|w| WindowResult {
                    label: w.label.clone(),
                    probability: posterior.window_probability(&w.param, w.lo, w.hi),
                    log_probability: posterior.window_log_probability(&w.param, w.lo, w.hi),
                })
                .collect();
            for &loss in &row.losses {
                let mut options = CompareOptions::new(
                    row.features.clone(),
                    loss,
                    config.n_samples,
                    derive_seed(config.seed, &path(2)),
                );
                options.pseudo_count = config.pseudo_count;
                let report = compare_models(
                    &data,
                    (&row.model_1.name, &row.model_1.spec),
                    (&row.model_2.name, &row.model_2.spec),
                    &options,
                )?;
                records.push(StudyRecord {
                    replication: rep,
                    real_param: row.label.clone(),
                    loss,
                    loss_ratio: report.combined_ratio,
                    windows: windows.clone(),
                    features: row.features.clone(),
                    model_1: row.model_1.name.clone(),
                    model_2: row.model_2.name.clone(),
                    posterior_feature: row.posterior_feature,
                    observed,
                });
            }
        }
    }
    Ok(StudyResult {
        n_samples: config.n_samples,
        seed: config.seed,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> StudyConfig {
        let mut cfg = StudyConfig::table4(60, 4);
        cfg.n_samples = 20;
        cfg.rows[1].features = vec![FeatureKind::DegreeEntropy];
        cfg
    }

    #[test]
    fn table4_config_is_valid_and_round_trips() {
        let cfg = StudyConfig::table4(200, 1);
        cfg.validate().unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: StudyConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(joint_grid(&cfg.hypotheses).unwrap().len(), 9);
    }

    #[test]
    fn study_emits_one_record_per_row_and_loss() {
        let result = run_study(&small_config()).unwrap();
        assert_eq!(result.records.len(), 6);
        for rec in &result.records {
            assert_eq!(rec.windows.len(), 2);
            assert!(rec.loss_ratio.is_finite() && rec.loss_ratio > 0.0);
            for w in &rec.windows {
                assert!((0.0..=1.0).contains(&w.probability));
                assert!(w.log_probability <= 1e-12);
            }
        }
    }

    #[test]
    fn study_is_reproducible() {
        let cfg = small_config();
        assert_eq!(run_study(&cfg).unwrap(), run_study(&cfg).unwrap());
    }

    #[test]
    fn inverted_window_is_rejected() {
        let mut cfg = small_config();
        cfg.windows[0].lo = 4.0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidInput(_))));
    }
}
