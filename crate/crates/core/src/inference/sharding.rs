//! Node-cell sharding of large graphs and consensus merging of per-shard draws.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{extract_feature, FeatureKind};
use crate::graph::Graph;

/// Upper bound on a shard's consensus weight; zero-variance shards get this.
pub const MAX_CONSENSUS_WEIGHT: f64 = 1e12;

/// Splits the nodes into consecutive blocks of `cell_size` (the last may be
/// smaller) and returns the induced subgraph of each block.
pub fn shard_cells(g: &Graph, cell_size: usize) -> Result<Vec<Graph>> {
    if cell_size == 0 {
        return Err(Error::InvalidInput("cell size must be at least 1".into()));
    }
    let n = g.node_count();
    (0..n)
        .step_by(cell_size)
        .map(|start| {
            let nodes: Vec<usize> = (start..(start + cell_size).min(n)).collect();
            g.induced_subgraph(&nodes)
        })
        .collect()
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Inverse-variance weighted average of per-shard draw vectors, draw by draw.
pub fn consensus_merge(shard_draws: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = shard_draws.first() else {
        return Err(Error::InvalidInput("no shards to merge".into()));
    };
    let t = first.len();
    if t < 2 {
        return Err(Error::InvalidInput(
            "consensus merge needs at least 2 draws per shard".into(),
        ));
    }
    if shard_draws.iter().any(|d| d.len() != t) {
        return Err(Error::InvalidInput(
            "all shards must contribute the same number of draws".into(),
        ));
    }
    let weights: Vec<f64> = shard_draws
        .iter()
        .map(|d| {
            let var = sample_variance(d);
            if var > 0.0 {
                (1.0 / var).min(MAX_CONSENSUS_WEIGHT)
            } else {
                MAX_CONSENSUS_WEIGHT
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    Ok((0..t)
        .map(|i| {
            shard_draws
                .iter()
                .zip(&weights)
                .map(|(d, w)| w * d[i])
                .sum::<f64>()
                / total
        })
        .collect())
}

/// Extracts `kind` from every shard of every graph and merges the per-shard
/// series into one consensus draw per graph. All graphs must have the same size.
pub fn consensus_feature_draws(
    graphs: &[Graph],
    kind: FeatureKind,
    cell_size: usize,
) -> Result<Vec<f64>> {
    let Some(first) = graphs.first() else {
        return Err(Error::InvalidInput("no graphs to shard".into()));
    };
    if graphs.iter().any(|g| g.node_count() != first.node_count()) {
        return Err(Error::InvalidInput("graphs differ in node count".into()));
    }
    let per_graph: Vec<Vec<f64>> = graphs
        .par_iter()
        .map(|g| {
            shard_cells(g, cell_size)?
                .iter()
                .map(|s| extract_feature(s, kind).map(|v| v.as_f64()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let shards = per_graph[0].len();
    let by_shard: Vec<Vec<f64>> = (0..shards)
        .map(|s| per_graph.iter().map(|row| row[s]).collect())
        .collect();
    consensus_merge(&by_shard)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shard_sizes_partition_the_nodes() {
        let g = Graph::complete(25);
        let shards = shard_cells(&g, 10).unwrap();
        let sizes: Vec<usize> = shards.iter().map(Graph::node_count).collect();
        assert_eq!(sizes, vec![10, 10, 5]);
        assert_eq!(sizes.iter().sum::<usize>(), 25);
        assert_eq!(shards[2], Graph::complete(5));
        assert_eq!(shard_cells(&g, 25).unwrap(), vec![g.clone()]);
        assert_eq!(shard_cells(&g, 100).unwrap(), vec![g.clone()]);
        assert!(shard_cells(&g, 0).is_err());
    }

    #[test]
    fn shards_keep_only_internal_edges() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (4, 5)]).unwrap();
        let shards = shard_cells(&g, 3).unwrap();
        assert_eq!(shards[0], Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap());
        assert_eq!(shards[1], Graph::from_edges(3, [(1, 2)]).unwrap());
    }

    #[test]
    fn merge_identity_and_equal_weights() {
        let x = vec![0.3, 1.7, -2.2, 5.0];
        let single = consensus_merge(std::slice::from_ref(&x)).unwrap();
        for (a, b) in single.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
        let same = consensus_merge(&[x.clone(), x.clone(), x.clone()]).unwrap();
        for (a, b) in same.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
        // y is x shifted, so both shards have the same variance
        let y: Vec<f64> = x.iter().map(|v| v + 10.0).collect();
        let mean = consensus_merge(&[x.clone(), y.clone()]).unwrap();
        for i in 0..x.len() {
            assert!((mean[i] - 0.5 * (x[i] + y[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn merge_inverse_variance_weights() {
        // sample variances 1 and 4
        let x = vec![-1.0, 0.0, 1.0];
        let y = vec![-2.0, 0.0, 2.0];
        let merged = consensus_merge(&[x.clone(), y.clone()]).unwrap();
        for t in 0..3 {
            let expected = (x[t] + 0.25 * y[t]) / 1.25;
            assert!((merged[t] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn merge_errors_and_zero_variance_cap() {
        assert!(consensus_merge(&[]).is_err());
        assert!(consensus_merge(&[vec![1.0]]).is_err());
        assert!(consensus_merge(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        let merged = consensus_merge(&[vec![3.0, 3.0], vec![0.0, 10.0]]).unwrap();
        // the constant shard dominates with weight 1e12 against 1/50
        assert!(merged.iter().all(|m| (m - 3.0).abs() < 1e-9));
    }

    #[test]
    fn consensus_feature_over_graphs() {
        let graphs = vec![Graph::complete(20), Graph::complete(20), Graph::empty(20)];
        let draws = consensus_feature_draws(&graphs, FeatureKind::LinkDensity, 10).unwrap();
        assert_eq!(draws, vec![1.0, 1.0, 0.0]);
        assert!(consensus_feature_draws(
            &[Graph::complete(3), Graph::complete(4)],
            FeatureKind::LinkDensity,
            2
        )
        .is_err());
    }
}
