//! Evidences, Bayes factors, expected losses and decisions over feature ensembles.

pub mod bayes;
pub mod compare;
pub mod density;
pub mod loss;
pub mod posterior;
pub mod range;
pub mod sharding;

pub use bayes::{
    bayes_factor, bayes_factor_from_log, decide, posterior_model_probs, softmax_log_weights,
    Decision, Ratio, DECISION_RULE,
};
pub use compare::{
    compare_models, run_comparison, CompareOptions, ComparisonReport, ComparisonRun, DensityNote,
    FeatureDetail, FeatureRecord, BLOCK_COUNT_METHOD,
};
pub use density::{
    estimate_density, estimate_density_with, evidence, silverman_bandwidth, DensityEstimate,
    FeatureSamples, DEFAULT_PSEUDO_COUNT,
};
pub use loss::{combined_loss_ratio, expected_loss, LossKind};
pub use posterior::{joint_grid, param_posterior, ParamPosterior, PosteriorPoint};
pub use range::{range_probability, RangeProbability};
pub use sharding::{consensus_feature_draws, consensus_merge, shard_cells, MAX_CONSENSUS_WEIGHT};
