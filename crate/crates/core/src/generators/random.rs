//! Independent-edge generators: Erdős–Rényi and stochastic block models.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Each of the `n(n-1)/2` pairs is an edge independently with probability `p`.
///
/// Uses geometric skipping over the lexicographic pair order, so the cost is
/// proportional to the number of edges drawn rather than the number of pairs.
pub fn generate_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidSpec(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    if p >= 1.0 {
        return Ok(Graph::complete(n));
    }
    let mut g = Graph::empty(n);
    if p <= 0.0 || n < 2 {
        return Ok(g);
    }
    let log_q = (1.0 - p).ln();
    // (u, v) walks the strict upper triangle row by row; v == u means "before row start".
    let (mut u, mut v) = (0usize, 0usize);
    loop {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        let mut step = skip.min(u64::MAX as f64 / 2.0) as u64 + 1;
        loop {
            let remaining = (n - 1 - v) as u64;
            if step <= remaining {
                v += step as usize;
                break;
            }
            step -= remaining;
            u += 1;
            if u >= n - 1 {
                return Ok(g);
            }
            v = u;
        }
        g.add_edge(u, v)?;
    }
}

/// Block-to-block edge probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum EdgeProbs {
    /// `p_in` on the diagonal, `p_out` everywhere else.
    Planted { p_in: f64, p_out: f64 },
    /// Full symmetric `K × K` matrix.
    Matrix { matrix: Vec<Vec<f64>> },
}

impl EdgeProbs {
    /// Expands to a dense `k × k` matrix and checks symmetry and range.
    pub fn to_matrix(&self, k: usize) -> Result<Vec<Vec<f64>>> {
        let m = match self {
            EdgeProbs::Planted { p_in, p_out } => (0..k)
                .map(|a| {
                    (0..k)
                        .map(|b| if a == b { *p_in } else { *p_out })
                        .collect()
                })
                .collect(),
            EdgeProbs::Matrix { matrix } => {
                if matrix.len() != k || matrix.iter().any(|row| row.len() != k) {
                    return Err(Error::InvalidSpec(format!(
                        "edge probability matrix must be {k}x{k}"
                    )));
                }
                matrix.clone()
            }
        };
        validate_block_matrix(&m)?;
        Ok(m)
    }
}

fn validate_block_matrix(m: &[Vec<f64>]) -> Result<()> {
    for (a, row) in m.iter().enumerate() {
        for (b, &p) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidSpec(format!(
                    "edge probability [{a}][{b}] = {p} outside [0, 1]"
                )));
            }
            if (p - m[b][a]).abs() > 1e-12 {
                return Err(Error::InvalidSpec(format!(
                    "edge probability matrix is not symmetric at [{a}][{b}]"
                )));
            }
        }
    }
    Ok(())
}

/// Assigns `n` nodes to `k` contiguous blocks whose sizes differ by at most one.
pub fn equal_blocks(n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|v| v * k / n.max(1)).collect()
}

/// Stochastic block model with fixed memberships.
pub fn generate_sbm<R: Rng + ?Sized>(
    membership: &[usize],
    edge_probs: &[Vec<f64>],
    rng: &mut R,
) -> Result<Graph> {
    let k = edge_probs.len();
    if k == 0 || edge_probs.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidSpec(
            "edge probability matrix must be square and non-empty".into(),
        ));
    }
    validate_block_matrix(edge_probs)?;
    if let Some((v, &b)) = membership.iter().enumerate().find(|(_, &b)| b >= k) {
        return Err(Error::InvalidSpec(format!(
            "node {v} assigned to block {b} >= K = {k}"
        )));
    }
    let n = membership.len();
    let mut g = Graph::empty(n);
    for u in 0..n {
        let row = &edge_probs[membership[u]];
        for v in u + 1..n {
            let p = row[membership[v]];
            if p >= 1.0 || (p > 0.0 && rng.random::<f64>() < p) {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_for;

    #[test]
    fn er_extremes() {
        let mut rng = rng_for(1, &[]);
        assert_eq!(generate_er(3, 1.0, &mut rng).unwrap(), Graph::complete(3));
        assert_eq!(generate_er(5, 0.0, &mut rng).unwrap(), Graph::empty(5));
        assert_eq!(generate_er(1, 0.5, &mut rng).unwrap(), Graph::empty(1));
        assert!(generate_er(3, 1.5, &mut rng).is_err());
    }

    #[test]
    fn er_mean_edge_count() {
        // binomial mean 4950 * 0.1 = 495, standard error sqrt(445.5 / 1000) = 0.667
        let total: usize = (0..1000u64)
            .map(|s| {
                generate_er(100, 0.1, &mut rng_for(s, &[11]))
                    .unwrap()
                    .edge_count()
            })
            .sum();
        let mean = total as f64 / 1000.0;
        assert!((mean - 495.0).abs() < 2.1, "mean edge count {mean}");
    }

    #[test]
    fn er_covers_every_pair() {
        // with p close to 1 every pair position must be reachable, including the last one
        let mut hits = vec![0usize; 10];
        for s in 0..200u64 {
            let g = generate_er(5, 0.5, &mut rng_for(s, &[3])).unwrap();
            let mut idx = 0;
            for u in 0..5 {
                for v in u + 1..5 {
                    hits[idx] += g.has_edge(u, v) as usize;
                    idx += 1;
                }
            }
        }
        assert!(hits.iter().all(|&h| (70..130).contains(&h)), "{hits:?}");
    }

    #[test]
    fn er_pairs_are_uncorrelated() {
        // covariance of edge indicators for a few pair combinations at n = 30
        let n = 30;
        let seeds = 1000;
        let probe = [
            ((0, 1), (0, 2)),
            ((0, 1), (2, 3)),
            ((5, 29), (28, 29)),
            ((3, 4), (3, 5)),
        ];
        let p = 0.3;
        let mut joint = [0.0f64; 4];
        let mut first = [0.0f64; 4];
        let mut second = [0.0f64; 4];
        for s in 0..seeds {
            let g = generate_er(n, p, &mut rng_for(s, &[5])).unwrap();
            for (i, ((a, b), (c, d))) in probe.iter().enumerate() {
                let x = g.has_edge(*a, *b) as u8 as f64;
                let y = g.has_edge(*c, *d) as u8 as f64;
                joint[i] += x * y;
                first[i] += x;
                second[i] += y;
            }
        }
        let m = seeds as f64;
        // standard error of the covariance estimate for independent Bernoulli(p) pairs
        let se = p * (1.0 - p) / m.sqrt();
        for i in 0..probe.len() {
            let cov = joint[i] / m - (first[i] / m) * (second[i] / m);
            assert!(cov.abs() < 3.0 * se, "pair {i}: cov {cov}, se {se}");
        }
    }

    #[test]
    fn sbm_disjoint_cliques() {
        let z = equal_blocks(6, 2);
        assert_eq!(z, vec![0, 0, 0, 1, 1, 1]);
        let m = EdgeProbs::Planted {
            p_in: 1.0,
            p_out: 0.0,
        }
        .to_matrix(2)
        .unwrap();
        let g = generate_sbm(&z, &m, &mut rng_for(0, &[])).unwrap();
        let expected =
            Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        assert_eq!(g, expected);
    }

    #[test]
    fn sbm_cross_block_mean() {
        // binomial mean 25 * 0.2 = 5, standard error sqrt(4 / 1000) = 0.063
        let z = equal_blocks(10, 2);
        let m = EdgeProbs::Planted {
            p_in: 0.5,
            p_out: 0.2,
        }
        .to_matrix(2)
        .unwrap();
        let mut cross = 0usize;
        for s in 0..1000u64 {
            let g = generate_sbm(&z, &m, &mut rng_for(s, &[9])).unwrap();
            cross += g.edges().filter(|&(u, v)| z[u] != z[v]).count();
        }
        let mean = cross as f64 / 1000.0;
        assert!((mean - 5.0).abs() < 0.19, "mean cross-block edges {mean}");
    }

    #[test]
    fn sbm_single_block_matches_er_in_distribution() {
        let z = vec![0; 12];
        let m = vec![vec![0.25]];
        let (mut sbm, mut er) = (0usize, 0usize);
        for s in 0..2000u64 {
            sbm += generate_sbm(&z, &m, &mut rng_for(s, &[1]))
                .unwrap()
                .edge_count();
            er += generate_er(12, 0.25, &mut rng_for(s, &[2]))
                .unwrap()
                .edge_count();
        }
        // both means estimate 66 * 0.25 = 16.5 with standard error ~0.08
        let (a, b) = (sbm as f64 / 2000.0, er as f64 / 2000.0);
        assert!(
            (a - 16.5).abs() < 0.35 && (b - 16.5).abs() < 0.35,
            "{a} {b}"
        );
    }

    #[test]
    fn sbm_rejects_asymmetric_matrix() {
        let m = vec![vec![0.5, 0.1], vec![0.2, 0.5]];
        assert!(matches!(
            generate_sbm(&[0, 1], &m, &mut rng_for(0, &[])),
            Err(Error::InvalidSpec(_))
        ));
        assert!(EdgeProbs::Matrix { matrix: m }.to_matrix(2).is_err());
    }
}
