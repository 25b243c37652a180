//! Log-linear graph priors `P(G) ∝ exp(λ Σ_i w_i f_i(G))` and a
//! Metropolis–Hastings edge-toggle sampler for them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Graph statistic used as a concordance term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcordanceFunction {
    EdgeCount,
    TriangleCount,
    /// Number of nodes whose degree equals `degree`.
    DegreeCount {
        degree: usize,
    },
    /// Indicator that the pair `(u, v)` is an edge.
    IndividualEdge {
        u: usize,
        v: usize,
    },
}

impl ConcordanceFunction {
    pub fn evaluate(&self, g: &Graph) -> f64 {
        match *self {
            ConcordanceFunction::EdgeCount => g.edge_count() as f64,
            ConcordanceFunction::TriangleCount => crate::features::count_triangles(g) as f64,
            ConcordanceFunction::DegreeCount { degree } => (0..g.node_count())
                .filter(|&v| g.degree(v) == degree)
                .count() as f64,
            ConcordanceFunction::IndividualEdge { u, v } => g.has_edge(u, v) as u8 as f64,
        }
    }

    /// Change in the statistic if the pair `(u, v)` were toggled. `u != v`.
    pub fn toggle_delta(&self, g: &Graph, u: usize, v: usize) -> f64 {
        let present = g.has_edge(u, v);
        let sign = if present { -1.0 } else { 1.0 };
        match *self {
            ConcordanceFunction::EdgeCount => sign,
            ConcordanceFunction::TriangleCount => {
                sign * sorted_intersection_len(g.neighbors(u), g.neighbors(v)) as f64
            }
            ConcordanceFunction::DegreeCount { degree } => {
                let shift = |d: usize| -> f64 {
                    let after = if present { d - 1 } else { d + 1 };
                    (after == degree) as u8 as f64 - (d == degree) as u8 as f64
                };
                shift(g.degree(u)) + shift(g.degree(v))
            }
            ConcordanceFunction::IndividualEdge { u: a, v: b } => {
                if (a, b) == (u, v) || (a, b) == (v, u) {
                    sign
                } else {
                    0.0
                }
            }
        }
    }
}

pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// One weighted concordance term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub weight: f64,
    pub function: ConcordanceFunction,
}

/// Log-linear prior over graphs on `n` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLinearPrior {
    pub n: usize,
    pub lambda: f64,
    pub terms: Vec<Term>,
}

impl LogLinearPrior {
    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidSpec(
                "log-linear prior needs at least one term".into(),
            ));
        }
        if !self.lambda.is_finite() || self.terms.iter().any(|t| !t.weight.is_finite()) {
            return Err(Error::InvalidSpec(
                "log-linear strength and weights must be finite".into(),
            ));
        }
        for t in &self.terms {
            if let ConcordanceFunction::IndividualEdge { u, v } = t.function {
                if u == v || u >= self.n || v >= self.n {
                    return Err(Error::InvalidSpec(format!(
                        "individual-edge term ({u}, {v}) is not a valid pair for n = {}",
                        self.n
                    )));
                }
            }
        }
        Ok(())
    }

    /// Unnormalized log-probability `λ Σ w_i f_i(G)`.
    pub fn log_weight(&self, g: &Graph) -> f64 {
        self.lambda
            * self
                .terms
                .iter()
                .map(|t| t.weight * t.function.evaluate(g))
                .sum::<f64>()
    }

    fn log_weight_delta(&self, g: &Graph, u: usize, v: usize) -> f64 {
        self.lambda
            * self
                .terms
                .iter()
                .map(|t| t.weight * t.function.toggle_delta(g, u, v))
                .sum::<f64>()
    }
}

/// Chain length controls, measured in toggle proposals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainSchedule {
    pub burn_in: usize,
    pub thin: usize,
}

impl ChainSchedule {
    /// `burn_in = 10 n²`, `thin = n²`.
    pub fn default_for(n: usize) -> Self {
        ChainSchedule {
            burn_in: 10 * n * n,
            thin: (n * n).max(1),
        }
    }
}

/// Runs one Metropolis–Hastings chain from the empty graph and returns
/// `count` states spaced `thin` proposals apart after `burn_in` proposals.
///
/// Proposals toggle a uniformly chosen node pair and are accepted with
/// probability `min(1, exp(λ Σ_i w_i Δf_i))`.
pub fn mh_loglinear_sample<R: Rng + ?Sized>(
    prior: &LogLinearPrior,
    count: usize,
    schedule: ChainSchedule,
    rng: &mut R,
) -> Result<Vec<Graph>> {
    prior.validate()?;
    if count == 0 {
        return Err(Error::InvalidInput(
            "sample count must be at least 1".into(),
        ));
    }
    if schedule.thin == 0 {
        return Err(Error::InvalidInput(
            "thinning interval must be at least 1".into(),
        ));
    }
    let n = prior.n;
    let mut state = Graph::empty(n);
    if n < 2 {
        return Ok(vec![state; count]);
    }
    let mut step = |state: &mut Graph| -> Result<()> {
        let u = rng.random_range(0..n);
        let mut v = rng.random_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        let log_ratio = prior.log_weight_delta(state, u, v);
        if log_ratio >= 0.0 || rng.random::<f64>() < log_ratio.exp() {
            state.toggle_edge(u, v)?;
        }
        Ok(())
    };
    for _ in 0..schedule.burn_in {
        step(&mut state)?;
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        for _ in 0..schedule.thin {
            step(&mut state)?;
        }
        out.push(state.clone());
    }
    Ok(out)
}
