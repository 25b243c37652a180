//! Feature-space Bayesian model selection for random network models.
//!
//! Models are compared through low-dimensional graph features: each model's
//! prior predictive is simulated, the feature distribution is smoothed into a
//! density, and evidences, Bayes factors and expected-loss ratios are combined
//! into a decision.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod features;
pub mod generators;
pub mod graph;
pub mod inference;
pub mod seed;
pub mod study;

pub use error::{Error, Result};
pub use features::{extract_feature, FeatureKind, FeatureValue};
pub use generators::{prior_predictive, ModelSpec, ParamPrior};
pub use graph::{read_edge_list, write_edge_list, Graph};
