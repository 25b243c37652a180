//! Power-law degree sequences realized through the erased configuration model.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Draws `n` degrees as `min(n-1, floor(d_min * U^(-1/(alpha-1))))`.
///
/// When the total is odd one uniformly chosen entry is incremented, or
/// decremented if it already sits at the `n-1` cap, so the sum is always even.
pub fn sample_powerlaw_degrees<R: Rng + ?Sized>(
    n: usize,
    alpha: f64,
    d_min: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "power-law exponent {alpha} must be finite and > 2"
        )));
    }
    if d_min == 0 {
        return Err(Error::InvalidSpec("d_min must be at least 1".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let cap = n - 1;
    let exponent = -1.0 / (alpha - 1.0);
    let mut degrees: Vec<usize> = (0..n)
        .map(|_| {
            // 1 - [0, 1) keeps U away from zero
            let u = 1.0 - rng.random::<f64>();
            let x = (d_min as f64 * u.powf(exponent)).floor();
            if x >= cap as f64 {
                cap
            } else {
                x as usize
            }
        })
        .collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let i = rng.random_range(0..n);
        if degrees[i] < cap {
            degrees[i] += 1;
        } else {
            degrees[i] -= 1;
        }
    }
    Ok(degrees)
}

/// Pairs degree stubs uniformly at random, then drops self-loops and repeated pairs.
pub fn generate_from_degrees<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Result<Graph> {
    let n = degrees.len();
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(Error::InvalidSpec(format!("degree sum {total} is odd")));
    }
    if let Some((v, &d)) = degrees.iter().enumerate().find(|(_, &d)| d >= n.max(1)) {
        return Err(Error::InvalidSpec(format!(
            "degree {d} of node {v} exceeds n - 1 = {}",
            n.saturating_sub(1)
        )));
    }
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    stubs.shuffle(rng);
    let mut g = Graph::empty(n);
    for pair in stubs.chunks_exact(2) {
        if pair[0] != pair[1] {
            g.add_edge(pair[0], pair[1])?;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_for;

    #[test]
    fn steep_exponent_collapses_to_minimum_degree() {
        let d = sample_powerlaw_degrees(100, 50.0, 1, &mut rng_for(3, &[])).unwrap();
        assert_eq!(d.iter().filter(|&&x| x != 1).count(), 0);
        let d = sample_powerlaw_degrees(101, 50.0, 1, &mut rng_for(3, &[])).unwrap();
        assert_eq!(d.iter().sum::<usize>(), 102);
        assert_eq!(d.iter().filter(|&&x| x != 1).count(), 1);
    }

    #[test]
    fn rejects_infinite_mean_regime() {
        let mut rng = rng_for(0, &[]);
        assert!(matches!(
            sample_powerlaw_degrees(10, 2.0, 1, &mut rng),
            Err(Error::InvalidSpec(_))
        ));
        assert!(sample_powerlaw_degrees(10, 1.5, 1, &mut rng).is_err());
        assert!(sample_powerlaw_degrees(10, f64::NAN, 1, &mut rng).is_err());
        assert!(sample_powerlaw_degrees(10, 3.0, 0, &mut rng).is_err());
    }

    #[test]
    fn sums_are_even_and_capped() {
        for s in 0..500u64 {
            let d = sample_powerlaw_degrees(15, 2.1, 2, &mut rng_for(s, &[4])).unwrap();
            assert_eq!(d.iter().sum::<usize>() % 2, 0);
            assert!(d.iter().all(|&x| x <= 14));
        }
    }

    #[test]
    fn mean_matches_inverse_cdf_series() {
        // E[min(n-1, floor(X))] for X ~ Pareto(x_m = 1, shape 2) is sum_{k=1}^{n-1} k^-2;
        // the parity fix adds 1/n per node with probability 1/2.
        let n = 100;
        let series: f64 = (1..n).map(|k| (k as f64).powi(-2)).sum();
        let oracle = series + 0.5 / n as f64;
        let mut total = 0usize;
        for s in 0..1000u64 {
            total += sample_powerlaw_degrees(n, 3.0, 1, &mut rng_for(s, &[8]))
                .unwrap()
                .iter()
                .sum::<usize>();
        }
        let mean = total as f64 / 1e5;
        assert!(
            (mean / oracle - 1.0).abs() < 0.01,
            "mean {mean} vs oracle {oracle}"
        );
    }

    #[test]
    fn configuration_model_small_cases() {
        let g = generate_from_degrees(&[1, 1], &mut rng_for(0, &[])).unwrap();
        assert_eq!(g, Graph::complete(2));
        for s in 0..100u64 {
            let g = generate_from_degrees(&[2, 2, 2], &mut rng_for(s, &[])).unwrap();
            assert!(g.edges().all(|(u, v)| u < v && v < 3));
        }
        assert!(matches!(
            generate_from_degrees(&[1, 1, 1], &mut rng_for(0, &[])),
            Err(Error::InvalidSpec(_))
        ));
        assert!(generate_from_degrees(&[2, 0], &mut rng_for(0, &[])).is_err());
    }

    /// Probability that a uniform perfect matching of the stubs realizes each
    /// simple graph after erasure, by enumerating every matching.
    fn matching_oracle(degrees: &[usize]) -> std::collections::BTreeMap<Vec<(usize, usize)>, f64> {
        fn recurse(
            stubs: &mut Vec<usize>,
            pairs: &mut Vec<(usize, usize)>,
            out: &mut std::collections::BTreeMap<Vec<(usize, usize)>, usize>,
        ) {
            if stubs.is_empty() {
                let mut edges: Vec<(usize, usize)> = pairs
                    .iter()
                    .filter(|(a, b)| a != b)
                    .map(|&(a, b)| (a.min(b), a.max(b)))
                    .collect();
                edges.sort_unstable();
                edges.dedup();
                *out.entry(edges).or_default() += 1;
                return;
            }
            let first = stubs.remove(0);
            for i in 0..stubs.len() {
                let partner = stubs.remove(i);
                pairs.push((first, partner));
                recurse(stubs, pairs, out);
                pairs.pop();
                stubs.insert(i, partner);
            }
            stubs.insert(0, first);
        }
        let mut stubs: Vec<usize> = degrees
            .iter()
            .enumerate()
            .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
            .collect();
        let mut counts = Default::default();
        recurse(&mut stubs, &mut Vec::new(), &mut counts);
        let total: usize = counts.values().sum();
        counts
            .into_iter()
            .map(|(k, c)| (k, c as f64 / total as f64))
            .collect()
    }

    #[test]
    fn star_sequence_matches_matching_enumeration() {
        let degrees = [3, 1, 1, 1];
        let oracle = matching_oracle(&degrees);
        let star = vec![(0, 1), (0, 2), (0, 3)];
        // 3! of the 15 matchings pair every leaf with the hub
        assert!((oracle[&star] - 0.4).abs() < 1e-12);
        let trials = 1000;
        let mut star_hits = 0;
        for s in 0..trials {
            let g = generate_from_degrees(&degrees, &mut rng_for(s, &[6])).unwrap();
            for (real, want) in g.degree_sequence().iter().zip(degrees) {
                assert!(*real <= want);
            }
            star_hits += (g.edges().collect::<Vec<_>>() == star) as usize;
        }
        let freq = star_hits as f64 / trials as f64;
        let se = (0.4f64 * 0.6 / trials as f64).sqrt();
        assert!((freq - 0.4).abs() < 4.0 * se, "star frequency {freq}");
    }
}
