use thiserror::Error;

/// Errors raised across graph construction, simulation and inference.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid edge ({0}, {1}): self-loops are not allowed")]
    InvalidEdge(usize, usize),

    #[error("node id {id} out of range for graph with {node_count} nodes")]
    InvalidNode { id: usize, node_count: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("feature undefined: {0}")]
    UndefinedFeature(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("bayes factor undefined: both evidences are zero")]
    UndefinedBayesFactor,

    #[error("posterior undefined: every evidence-prior product is zero")]
    UndefinedPosterior,

    #[error("loss ratio undefined: expected loss of the reference model is zero (feature {0})")]
    DegenerateRatio(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures that come from the statistics rather than the inputs.
    pub fn is_indeterminate(&self) -> bool {
        matches!(
            self,
            Error::UndefinedBayesFactor | Error::UndefinedPosterior | Error::DegenerateRatio(_)
        )
    }
}
