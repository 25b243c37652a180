//! Random-network models, parameter priors and prior-predictive sampling.

mod loglinear;
mod powerlaw;
mod random;

pub use loglinear::{
    mh_loglinear_sample, ChainSchedule, ConcordanceFunction, LogLinearPrior, Term,
};
pub use powerlaw::{generate_from_degrees, sample_powerlaw_degrees};
pub use random::{equal_blocks, generate_er, generate_sbm, EdgeProbs};

pub(crate) use loglinear::sorted_intersection_len;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use rand_distr::Gamma;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::rng_for;

/// Prior over one scalar model parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamPrior {
    Point(f64),
    /// Continuous uniform on `[lo, hi]`.
    Uniform([f64; 2]),
    /// Discrete prior on `values`; `weights` default to uniform.
    Grid {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
}

impl ParamPrior {
    pub fn grid(values: Vec<f64>) -> Self {
        ParamPrior::Grid {
            values,
            weights: None,
        }
    }

    /// Normalized grid weights (uniform when omitted).
    pub fn grid_weights(&self) -> Option<Vec<f64>> {
        match self {
            ParamPrior::Grid { values, weights } => Some(match weights {
                Some(w) => w.clone(),
                None => vec![1.0 / values.len() as f64; values.len()],
            }),
            _ => None,
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, ParamPrior::Grid { .. })
    }

    /// Checks structure and that every value the prior can produce lies in `support`.
    pub fn validate(&self, name: &str, support: impl Fn(f64) -> bool) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(format!("prior on {name}: {msg}")));
        match self {
            ParamPrior::Point(x) => {
                if !support(*x) {
                    return bad(format!("value {x} outside the parameter support"));
                }
            }
            ParamPrior::Uniform([lo, hi]) => {
                if !(lo < hi) {
                    return bad(format!("uniform range requires lo < hi, got [{lo}, {hi}]"));
                }
                if !support(*lo) || !support(*hi) {
                    return bad(format!("range [{lo}, {hi}] leaves the parameter support"));
                }
            }
            ParamPrior::Grid { values, weights } => {
                if values.is_empty() {
                    return bad("grid has no values".into());
                }
                if let Some(x) = values.iter().find(|&&x| !support(x)) {
                    return bad(format!("grid value {x} outside the parameter support"));
                }
                if let Some(w) = weights {
                    if w.len() != values.len() {
                        return bad("grid weights and values differ in length".into());
                    }
                    if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                        return bad("grid weights must be non-negative".into());
                    }
                    let total: f64 = w.iter().sum();
                    if (total - 1.0).abs() > 1e-9 {
                        return bad(format!("grid weights sum to {total}, expected 1"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Draws one value from `prior`.
pub fn sample_parameter<R: Rng + ?Sized>(prior: &ParamPrior, rng: &mut R) -> Result<f64> {
    match prior {
        ParamPrior::Point(x) => Ok(*x),
        ParamPrior::Uniform([lo, hi]) => {
            if !(lo < hi) {
                return Err(Error::InvalidSpec(format!(
                    "uniform range [{lo}, {hi}] is empty"
                )));
            }
            Ok(rng.random_range(*lo..=*hi))
        }
        ParamPrior::Grid { values, .. } => {
            if values.len() == 1 {
                return Ok(values[0]);
            }
            let weights = prior.grid_weights().expect("grid prior");
            let index = WeightedIndex::new(&weights)
                .map_err(|e| Error::InvalidSpec(format!("grid weights: {e}")))?;
            Ok(values[index.sample(rng)])
        }
    }
}

/// How SBM nodes are assigned to blocks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Membership {
    /// Contiguous blocks of (nearly) equal size.
    #[default]
    Equal,
    /// Explicit block label per node.
    Fixed(Vec<usize>),
    /// Block proportions drawn from a symmetric Dirichlet with this concentration,
    /// then each node assigned independently.
    Dirichlet(f64),
}

/// A random-network model with parameter priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Er {
        n: usize,
        p: ParamPrior,
    },
    Sbm {
        n: usize,
        k: ParamPrior,
        #[serde(default)]
        membership: Membership,
        edge_probs: EdgeProbs,
    },
    Powerlaw {
        n: usize,
        alpha: ParamPrior,
        #[serde(default = "default_d_min")]
        d_min: usize,
    },
    Loglinear {
        n: usize,
        lambda: f64,
        terms: Vec<Term>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        burn_in: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        thin: Option<usize>,
    },
}

fn default_d_min() -> usize {
    1
}

fn is_probability(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

fn is_block_count(x: f64) -> bool {
    x >= 1.0 && x.fract() == 0.0 && x.is_finite()
}

fn is_finite_mean_exponent(x: f64) -> bool {
    x > 2.0 && x.is_finite()
}

/// One point of a parameter grid, with the spec that pins the parameter to it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub param: &'static str,
    pub value: f64,
    pub weight: f64,
    pub spec: ModelSpec,
}

impl ModelSpec {
    pub fn n(&self) -> usize {
        match self {
            ModelSpec::Er { n, .. }
            | ModelSpec::Sbm { n, .. }
            | ModelSpec::Powerlaw { n, .. }
            | ModelSpec::Loglinear { n, .. } => *n,
        }
    }

    /// Short model family name as used in the JSON `type` field.
    pub fn family(&self) -> &'static str {
        match self {
            ModelSpec::Er { .. } => "er",
            ModelSpec::Sbm { .. } => "sbm",
            ModelSpec::Powerlaw { .. } => "powerlaw",
            ModelSpec::Loglinear { .. } => "loglinear",
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ModelSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Er { p, .. } => p.validate("p", is_probability),
            ModelSpec::Sbm {
                n,
                k,
                membership,
                edge_probs,
            } => {
                if matches!(k, ParamPrior::Uniform(_)) {
                    return Err(Error::InvalidSpec(
                        "block count needs a point or grid prior".into(),
                    ));
                }
                k.validate("k", is_block_count)?;
                let ks: Vec<usize> = match k {
                    ParamPrior::Point(x) => vec![*x as usize],
                    ParamPrior::Grid { values, .. } => values.iter().map(|&x| x as usize).collect(),
                    ParamPrior::Uniform(_) => unreachable!(),
                };
                for &kk in &ks {
                    edge_probs.to_matrix(kk)?;
                }
                match membership {
                    Membership::Equal => {}
                    Membership::Fixed(z) => {
                        if z.len() != *n {
                            return Err(Error::InvalidSpec(format!(
                                "fixed membership has {} labels for n = {n}",
                                z.len()
                            )));
                        }
                        let kmin = ks.iter().copied().min().unwrap_or(1);
                        if let Some(&b) = z.iter().find(|&&b| b >= kmin) {
                            return Err(Error::InvalidSpec(format!(
                                "membership label {b} not below K = {kmin}"
                            )));
                        }
                    }
                    Membership::Dirichlet(c) => {
                        if !(*c > 0.0) || !c.is_finite() {
                            return Err(Error::InvalidSpec(format!(
                                "Dirichlet concentration {c} must be positive"
                            )));
                        }
                    }
                }
                Ok(())
            }
            ModelSpec::Powerlaw { alpha, d_min, .. } => {
                if *d_min == 0 {
                    return Err(Error::InvalidSpec("d_min must be at least 1".into()));
                }
                alpha.validate("alpha", is_finite_mean_exponent)
            }
            ModelSpec::Loglinear { thin, .. } => {
                if *thin == Some(0) {
                    return Err(Error::InvalidSpec("thin must be at least 1".into()));
                }
                self.loglinear_prior().expect("loglinear").validate()
            }
        }
    }

    fn loglinear_prior(&self) -> Option<LogLinearPrior> {
        match self {
            ModelSpec::Loglinear {
                n, lambda, terms, ..
            } => Some(LogLinearPrior {
                n: *n,
                lambda: *lambda,
                terms: terms.clone(),
            }),
            _ => None,
        }
    }

    /// Name and prior of the spec's scalar parameter, if it has one.
    pub fn parameter(&self) -> Option<(&'static str, &ParamPrior)> {
        match self {
            ModelSpec::Er { p, .. } => Some(("p", p)),
            ModelSpec::Sbm { k, .. } => Some(("k", k)),
            ModelSpec::Powerlaw { alpha, .. } => Some(("alpha", alpha)),
            ModelSpec::Loglinear { .. } => None,
        }
    }

    /// Copy of the spec with its parameter prior replaced. `param` must name
    /// the spec's parameter.
    pub fn with_parameter(&self, param: &str, prior: ParamPrior) -> Result<ModelSpec> {
        let mut out = self.clone();
        let slot = match (&mut out, param) {
            (ModelSpec::Er { p, .. }, "p") => p,
            (ModelSpec::Sbm { k, .. }, "k") => k,
            (ModelSpec::Powerlaw { alpha, .. }, "alpha") => alpha,
            _ => {
                return Err(Error::InvalidSpec(format!(
                    "model type {} has no parameter {param:?}",
                    self.family()
                )))
            }
        };
        *slot = prior;
        out.validate()?;
        Ok(out)
    }

    /// Expands the spec's grid prior into one point-prior spec per grid value.
    pub fn grid_points(&self) -> Result<Vec<GridPoint>> {
        let Some((param, prior @ ParamPrior::Grid { values, .. })) = self.parameter() else {
            return Err(Error::InvalidSpec(format!(
                "{} spec carries no grid prior",
                self.family()
            )));
        };
        let weights = prior.grid_weights().expect("grid prior");
        values
            .iter()
            .zip(weights)
            .map(|(&value, weight)| {
                Ok(GridPoint {
                    param,
                    value,
                    weight,
                    spec: self.with_parameter(param, ParamPrior::Point(value))?,
                })
            })
            .collect()
    }

    /// Draws parameters from their priors, then one graph.
    pub fn sample_graph<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        match self {
            ModelSpec::Er { n, p } => {
                let p = sample_parameter(p, rng)?;
                generate_er(*n, p, rng)
            }
            ModelSpec::Sbm {
                n,
                k,
                membership,
                edge_probs,
            } => {
                let k = sample_parameter(k, rng)? as usize;
                let matrix = edge_probs.to_matrix(k)?;
                let z = match membership {
                    Membership::Equal => equal_blocks(*n, k),
                    Membership::Fixed(z) => z.clone(),
                    Membership::Dirichlet(c) => dirichlet_membership(*n, k, *c, rng)?,
                };
                generate_sbm(&z, &matrix, rng)
            }
            ModelSpec::Powerlaw { n, alpha, d_min } => {
                let alpha = sample_parameter(alpha, rng)?;
                let degrees = sample_powerlaw_degrees(*n, alpha, *d_min, rng)?;
                generate_from_degrees(&degrees, rng)
            }
            ModelSpec::Loglinear {
                n, burn_in, thin, ..
            } => {
                let prior = self.loglinear_prior().expect("loglinear");
                let defaults = ChainSchedule::default_for(*n);
                let schedule = ChainSchedule {
                    burn_in: burn_in.unwrap_or(defaults.burn_in),
                    thin: thin.unwrap_or(defaults.thin),
                };
                let mut chain = mh_loglinear_sample(&prior, 1, schedule, rng)?;
                Ok(chain.pop().expect("one sample"))
            }
        }
    }
}

fn dirichlet_membership<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    concentration: f64,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let gamma = Gamma::new(concentration, 1.0)
        .map_err(|e| Error::InvalidSpec(format!("Dirichlet concentration: {e}")))?;
    let mut proportions: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
    if proportions.iter().sum::<f64>() <= 0.0 {
        // every gamma draw underflowed; fall back to a single occupied block
        proportions = vec![0.0; k];
        proportions[rng.random_range(0..k)] = 1.0;
    }
    let index = WeightedIndex::new(&proportions)
        .map_err(|e| Error::InvalidSpec(format!("Dirichlet proportions: {e}")))?;
    Ok((0..n).map(|_| index.sample(rng)).collect())
}

/// Draws `count` graphs from the prior predictive of `spec`.
///
/// Sample `i` uses its own generator seeded from `(master_seed, i)`, so the
/// output does not depend on the rayon thread count.
pub fn prior_predictive(spec: &ModelSpec, count: usize, master_seed: u64) -> Result<Vec<Graph>> {
    spec.validate()?;
    if count == 0 {
        return Err(Error::InvalidInput(
            "sample count must be at least 1".into(),
        ));
    }
    (0..count)
        .into_par_iter()
        .map(|i| spec.sample_graph(&mut rng_for(master_seed, &[i as u64])))
        .collect()
}

/// Seed used for sample `index` of a prior-predictive run.
pub fn sample_seed(master_seed: u64, index: usize) -> u64 {
    crate::seed::derive_seed(master_seed, &[index as u64])
}
