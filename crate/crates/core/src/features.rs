//! Scalar graph observables used for model comparison.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::sorted_intersection_len;
use crate::graph::Graph;

pub const DEFAULT_D_MIN: usize = 1;
pub const DEFAULT_K_MAX: usize = 10;

/// Which observable to extract from a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureKind {
    /// Shannon entropy (nats) of the empirical degree distribution.
    DegreeEntropy,
    /// Continuous-approximation power-law MLE over degrees `>= d_min`.
    PowerLawExponent {
        d_min: usize,
    },
    /// Spectral eigengap estimate of the number of blocks, capped at `k_max`.
    BlockCount {
        k_max: usize,
    },
    TriangleCount,
    /// Diameter of the largest connected component.
    Diameter,
    LinkDensity,
    /// Transitivity: `3 · triangles / connected 2-paths`.
    GlobalClustering,
    EdgeCount,
}

impl FeatureKind {
    pub const ALL_DEFAULT: [FeatureKind; 8] = [
        FeatureKind::DegreeEntropy,
        FeatureKind::PowerLawExponent {
            d_min: DEFAULT_D_MIN,
        },
        FeatureKind::BlockCount {
            k_max: DEFAULT_K_MAX,
        },
        FeatureKind::TriangleCount,
        FeatureKind::Diameter,
        FeatureKind::LinkDensity,
        FeatureKind::GlobalClustering,
        FeatureKind::EdgeCount,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            FeatureKind::DegreeEntropy => "degree_entropy",
            FeatureKind::PowerLawExponent { .. } => "power_law_exponent",
            FeatureKind::BlockCount { .. } => "block_count",
            FeatureKind::TriangleCount => "triangle_count",
            FeatureKind::Diameter => "diameter",
            FeatureKind::LinkDensity => "link_density",
            FeatureKind::GlobalClustering => "global_clustering",
            FeatureKind::EdgeCount => "edge_count",
        }
    }

    /// Whether extracted values are integers.
    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            FeatureKind::BlockCount { .. }
                | FeatureKind::TriangleCount
                | FeatureKind::Diameter
                | FeatureKind::EdgeCount
        )
    }

    fn validate(self) -> Result<Self> {
        match self {
            FeatureKind::PowerLawExponent { d_min: 0 } => Err(Error::InvalidInput(
                "power_law_exponent needs d_min >= 1".into(),
            )),
            FeatureKind::BlockCount { k_max: 0 } => {
                Err(Error::InvalidInput("block_count needs k_max >= 1".into()))
            }
            ok => Ok(ok),
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureKind::PowerLawExponent { d_min } if *d_min != DEFAULT_D_MIN => {
                write!(f, "{}:{d_min}", self.token())
            }
            FeatureKind::BlockCount { k_max } if *k_max != DEFAULT_K_MAX => {
                write!(f, "{}:{k_max}", self.token())
            }
            _ => f.write_str(self.token()),
        }
    }
}

/// Parses `token` or `token:param`, e.g. `block_count:8` or `power_law_exponent:2`.
impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.trim().split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s.trim(), None),
        };
        let param = |default: usize| -> Result<usize> {
            arg.map_or(Ok(default), |a| {
                a.parse().map_err(|_| {
                    Error::InvalidInput(format!("bad parameter {a:?} for feature {name}"))
                })
            })
        };
        let no_param = |kind: FeatureKind| match arg {
            None => Ok(kind),
            Some(a) => Err(Error::InvalidInput(format!(
                "feature {name} takes no parameter, got {a:?}"
            ))),
        };
        let kind = match name {
            "degree_entropy" => no_param(FeatureKind::DegreeEntropy)?,
            "power_law_exponent" => FeatureKind::PowerLawExponent {
                d_min: param(DEFAULT_D_MIN)?,
            },
            "block_count" => FeatureKind::BlockCount {
                k_max: param(DEFAULT_K_MAX)?,
            },
            "triangle_count" => no_param(FeatureKind::TriangleCount)?,
            "diameter" => no_param(FeatureKind::Diameter)?,
            "link_density" => no_param(FeatureKind::LinkDensity)?,
            "global_clustering" => no_param(FeatureKind::GlobalClustering)?,
            "edge_count" => no_param(FeatureKind::EdgeCount)?,
            other => return Err(Error::InvalidInput(format!("unknown feature {other:?}"))),
        };
        kind.validate()
    }
}

/// JSON form: a bare token, or an object with `kind` and the optional
/// `d_min` / `k_max` fields.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FeatureKindRepr {
    Token(String),
    Object {
        kind: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d_min: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_max: Option<usize>,
    },
}

impl Serialize for FeatureKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match *self {
            FeatureKind::PowerLawExponent { d_min } => FeatureKindRepr::Object {
                kind: self.token().into(),
                d_min: Some(d_min),
                k_max: None,
            },
            FeatureKind::BlockCount { k_max } => FeatureKindRepr::Object {
                kind: self.token().into(),
                d_min: None,
                k_max: Some(k_max),
            },
            _ => FeatureKindRepr::Token(self.token().into()),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FeatureKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let kind = match FeatureKindRepr::deserialize(d)? {
            FeatureKindRepr::Token(t) => t.parse::<FeatureKind>(),
            FeatureKindRepr::Object { kind, d_min, k_max } => {
                kind.parse::<FeatureKind>()
                    .and_then(|k| match (k, d_min, k_max) {
                        (FeatureKind::PowerLawExponent { .. }, Some(d), None) => {
                            FeatureKind::PowerLawExponent { d_min: d }.validate()
                        }
                        (FeatureKind::BlockCount { .. }, None, Some(m)) => {
                            FeatureKind::BlockCount { k_max: m }.validate()
                        }
                        (k, None, None) => Ok(k),
                        (k, _, _) => Err(Error::InvalidInput(format!(
                            "unexpected parameter field for feature {}",
                            k.token()
                        ))),
                    })
            }
        };
        kind.map_err(D::Error::custom)
    }
}

/// One observed feature value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureValue {
    Discrete(i64),
    Continuous(f64),
}

impl FeatureValue {
    pub fn as_f64(&self) -> f64 {
        match *self {
            FeatureValue::Discrete(x) => x as f64,
            FeatureValue::Continuous(x) => x,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, FeatureValue::Discrete(_))
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Discrete(x) => write!(f, "{x}"),
            FeatureValue::Continuous(x) => write!(f, "{x}"),
        }
    }
}

pub fn extract_feature(g: &Graph, kind: FeatureKind) -> Result<FeatureValue> {
    Ok(match kind {
        FeatureKind::DegreeEntropy => FeatureValue::Continuous(degree_entropy(g)?),
        FeatureKind::PowerLawExponent { d_min } => {
            FeatureValue::Continuous(fit_power_law_mle(g, d_min)?)
        }
        FeatureKind::BlockCount { k_max } => {
            FeatureValue::Discrete(estimate_block_count(g, k_max)? as i64)
        }
        FeatureKind::TriangleCount => FeatureValue::Discrete(count_triangles(g) as i64),
        FeatureKind::Diameter => FeatureValue::Discrete(diameter(g)? as i64),
        FeatureKind::LinkDensity => FeatureValue::Continuous(density_and_clustering(g)?.0),
        FeatureKind::GlobalClustering => FeatureValue::Continuous(global_clustering(g)),
        FeatureKind::EdgeCount => FeatureValue::Discrete(g.edge_count() as i64),
    })
}

/// Entropy in nats of the empirical degree pmf.
pub fn degree_entropy(g: &Graph) -> Result<f64> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::UndefinedFeature(
            "degree entropy of a graph with no nodes".into(),
        ));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..n {
        *counts.entry(g.degree(v)).or_default() += 1;
    }
    let total = n as f64;
    let h = -counts
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            p * p.ln()
        })
        .sum::<f64>();
    // a single-class pmf gives -1 * ln 1 = -0.0
    Ok(h.max(0.0))
}

/// `α̂ = 1 + m / Σ ln(d_i / (d_min - 1/2))` over the `m` nodes with degree `>= d_min`.
pub fn fit_power_law_mle(g: &Graph, d_min: usize) -> Result<f64> {
    power_law_mle_from_degrees((0..g.node_count()).map(|v| g.degree(v)), d_min)
}

/// Same estimator over a bare degree sequence.
pub fn power_law_mle_from_degrees(
    degrees: impl IntoIterator<Item = usize>,
    d_min: usize,
) -> Result<f64> {
    if d_min == 0 {
        return Err(Error::UndefinedFeature(
            "power-law fit needs d_min >= 1".into(),
        ));
    }
    let shift = d_min as f64 - 0.5;
    let (m, log_sum) = degrees
        .into_iter()
        .filter(|&d| d >= d_min)
        .fold((0usize, 0.0f64), |(m, s), d| {
            (m + 1, s + (d as f64 / shift).ln())
        });
    if m == 0 {
        return Err(Error::UndefinedFeature(format!(
            "no node with degree >= {d_min} for the power-law fit"
        )));
    }
    Ok(1.0 + m as f64 / log_sum)
}

/// Eigenvalues of `D^{-1/2} A D^{-1/2}` in descending order. Isolated nodes
/// contribute zero rows.
pub fn normalized_adjacency_spectrum(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|v| match g.degree(v) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (u, v) in g.edges() {
        let w = inv_sqrt[u] * inv_sqrt[v];
        m[(u, v)] = w;
        m[(v, u)] = w;
    }
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// `K̂ = argmax_{1 <= k <= k_max} (λ_k - λ_{k+1})` over the descending
/// normalized-adjacency spectrum; ties go to the smaller `k`.
pub fn estimate_block_count(g: &Graph, k_max: usize) -> Result<usize> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::UndefinedFeature(
            "block count needs at least 2 nodes".into(),
        ));
    }
    if k_max == 0 {
        return Err(Error::UndefinedFeature(
            "block count needs k_max >= 1".into(),
        ));
    }
    let spectrum = normalized_adjacency_spectrum(g);
    let upper = k_max.min(n - 1);
    let mut best = (1, f64::NEG_INFINITY);
    for k in 1..=upper {
        let gap = spectrum[k - 1] - spectrum[k];
        if gap > best.1 + 1e-12 {
            best = (k, gap);
        }
    }
    Ok(best.0)
}

/// Triangles counted once each via sorted neighbor intersections.
pub fn count_triangles(g: &Graph) -> usize {
    let mut total = 0;
    for u in 0..g.node_count() {
        let nu = g.neighbors(u);
        for &v in &nu[nu.partition_point(|&w| w <= u)..] {
            let nv = g.neighbors(v);
            total += sorted_intersection_len(
                &nu[nu.partition_point(|&w| w <= v)..],
                &nv[nv.partition_point(|&w| w <= v)..],
            );
        }
    }
    total
}

/// Maximum eccentricity within the largest connected component; ties between
/// equally large components go to the one containing the smallest node id.
pub fn diameter(g: &Graph) -> Result<usize> {
    if g.node_count() == 0 {
        return Err(Error::UndefinedFeature(
            "diameter of a graph with no nodes".into(),
        ));
    }
    let components = g.connected_components();
    let largest =
        components.iter().fold(
            &components[0],
            |best, c| if c.len() > best.len() { c } else { best },
        );
    let mut diam = 0;
    for &s in largest {
        let dist = g.shortest_path_distances(s)?;
        let ecc = largest.iter().filter_map(|&t| dist[t]).max().unwrap_or(0);
        diam = diam.max(ecc);
    }
    Ok(diam)
}

fn two_paths(g: &Graph) -> usize {
    (0..g.node_count())
        .map(|v| {
            let d = g.degree(v);
            d * d.saturating_sub(1) / 2
        })
        .sum()
}

fn global_clustering(g: &Graph) -> f64 {
    match two_paths(g) {
        0 => 0.0,
        paths => 3.0 * count_triangles(g) as f64 / paths as f64,
    }
}

/// `(|E| / C(n, 2), 3 · triangles / 2-paths)`; clustering is 0 without 2-paths.
pub fn density_and_clustering(g: &Graph) -> Result<(f64, f64)> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::UndefinedFeature(
            "link density needs at least 2 nodes".into(),
        ));
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok((g.edge_count() as f64 / pairs, global_clustering(g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    fn star(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|v| (0, v))).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap()
    }

    fn two_cliques(size: usize) -> Graph {
        let mut edges = Vec::new();
        for block in 0..2 {
            let base = block * size;
            for u in 0..size {
                for v in u + 1..size {
                    edges.push((base + u, base + v));
                }
            }
        }
        Graph::from_edges(2 * size, edges).unwrap()
    }

    #[test]
    fn dispatcher_examples() {
        let k3 = Graph::complete(3);
        assert_eq!(
            extract_feature(&k3, FeatureKind::LinkDensity).unwrap(),
            FeatureValue::Continuous(1.0)
        );
        assert_eq!(
            extract_feature(&k3, FeatureKind::TriangleCount).unwrap(),
            FeatureValue::Discrete(1)
        );
        assert_eq!(
            extract_feature(&k3, FeatureKind::EdgeCount).unwrap(),
            FeatureValue::Discrete(3)
        );
        let h = extract_feature(&path(3), FeatureKind::DegreeEntropy)
            .unwrap()
            .as_f64();
        assert!((h - 0.6365).abs() < 1e-4);
        for kind in FeatureKind::ALL_DEFAULT {
            let v = extract_feature(&Graph::complete(5), kind).unwrap();
            assert_eq!(v.is_discrete(), kind.is_discrete(), "{kind}");
        }
    }

    #[test]
    fn entropy_hand_values() {
        let expected_path = 3f64.ln() - (2.0 / 3.0) * 2f64.ln();
        assert!((degree_entropy(&path(3)).unwrap() - expected_path).abs() < 1e-12);
        let expected_star = 4f64.ln() - 0.75 * 3f64.ln();
        assert!((degree_entropy(&star(4)).unwrap() - expected_star).abs() < 1e-12);
        assert!((expected_star - 0.5623).abs() < 1e-4);
        assert_eq!(degree_entropy(&cycle(7)).unwrap(), 0.0);
        assert_eq!(degree_entropy(&Graph::complete(6)).unwrap(), 0.0);
        assert_eq!(degree_entropy(&Graph::empty(3)).unwrap(), 0.0);
        assert!(degree_entropy(&Graph::empty(0)).is_err());
    }

    #[test]
    fn power_law_mle_closed_forms() {
        let a = power_law_mle_from_degrees([1, 2, 4], 1).unwrap();
        assert!((a - (1.0 + 3.0 / (6.0 * 2f64.ln()))).abs() < 1e-12);
        assert!((a - 1.7213).abs() < 1e-4);
        // nodes below d_min are excluded
        assert_eq!(power_law_mle_from_degrees([0, 1, 2, 4], 1), Ok(a));

        let matching = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let a = fit_power_law_mle(&matching, 1).unwrap();
        assert!((a - (1.0 + 1.0 / 2f64.ln())).abs() < 1e-12);
        assert!((a - 2.4427).abs() < 1e-4);
        assert!(matches!(
            fit_power_law_mle(&Graph::empty(5), 1),
            Err(Error::UndefinedFeature(_))
        ));
        assert!(fit_power_law_mle(&matching, 2).is_err());
    }

    #[test]
    fn block_count_on_disjoint_cliques() {
        let g = two_cliques(10);
        let spectrum = normalized_adjacency_spectrum(&g);
        // each K10 block contributes 1 once and -1/9 nine times
        assert!((spectrum[0] - 1.0).abs() < 1e-10 && (spectrum[1] - 1.0).abs() < 1e-10);
        assert!(spectrum[2..].iter().all(|&x| (x + 1.0 / 9.0).abs() < 1e-10));
        assert_eq!(estimate_block_count(&g, 6).unwrap(), 2);
        assert_eq!(estimate_block_count(&g, 1).unwrap(), 1);
        assert_eq!(estimate_block_count(&Graph::complete(8), 5).unwrap(), 1);
        assert!(estimate_block_count(&Graph::empty(1), 3).is_err());
        assert!(estimate_block_count(&Graph::complete(3), 10).unwrap() <= 2);
    }

    #[test]
    fn triangle_examples() {
        assert_eq!(count_triangles(&Graph::complete(4)), 4);
        assert_eq!(count_triangles(&star(6)), 0);
        assert_eq!(count_triangles(&path(6)), 0);
        assert_eq!(count_triangles(&cycle(5)), 0);
        assert_eq!(count_triangles(&Graph::complete(6)), 20);
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&path(4)).unwrap(), 3);
        assert_eq!(diameter(&Graph::complete(5)).unwrap(), 1);
        assert_eq!(diameter(&Graph::complete(2)).unwrap(), 1);
        let two = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(diameter(&two).unwrap(), 1);
        let mixed = Graph::from_edges(7, [(0, 1), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert_eq!(diameter(&mixed).unwrap(), 3);
        assert_eq!(diameter(&Graph::empty(3)).unwrap(), 0);
    }

    #[test]
    fn density_and_clustering_examples() {
        assert_eq!(
            density_and_clustering(&Graph::complete(3)).unwrap(),
            (1.0, 1.0)
        );
        assert_eq!(density_and_clustering(&star(4)).unwrap(), (0.5, 0.0));
        assert_eq!(
            density_and_clustering(&Graph::empty(5)).unwrap(),
            (0.0, 0.0)
        );
        assert!(density_and_clustering(&Graph::empty(1)).is_err());
    }

    #[test]
    fn feature_tokens() {
        assert_eq!(
            "block_count:8".parse::<FeatureKind>().unwrap(),
            FeatureKind::BlockCount { k_max: 8 }
        );
        assert_eq!(
            "power_law_exponent".parse::<FeatureKind>().unwrap(),
            FeatureKind::PowerLawExponent { d_min: 1 }
        );
        assert!("diameter:3".parse::<FeatureKind>().is_err());
        assert!("block_count:0".parse::<FeatureKind>().is_err());
        assert!("modularity".parse::<FeatureKind>().is_err());
        for kind in FeatureKind::ALL_DEFAULT {
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(serde_json::from_str::<FeatureKind>(&json).unwrap(), kind);
            assert_eq!(kind.to_string().parse::<FeatureKind>().unwrap(), kind);
        }
        let obj: FeatureKind = serde_json::from_str(r#"{"kind":"block_count","k_max":4}"#).unwrap();
        assert_eq!(obj, FeatureKind::BlockCount { k_max: 4 });
        assert!(serde_json::from_str::<FeatureKind>(r#"{"kind":"diameter","k_max":4}"#).is_err());
    }

    fn random_graph(n: usize, bits: &[bool]) -> Graph {
        let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, pairs.zip(bits).filter(|(_, &b)| b).map(|(p, _)| p)).unwrap()
    }

    proptest! {
        #[test]
        fn triangles_match_triple_enumeration(n in 0usize..=7, bits in prop::collection::vec(any::<bool>(), 21)) {
            let g = random_graph(n, &bits);
            let mut brute = 0;
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        brute += (g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c)) as usize;
                    }
                }
            }
            prop_assert_eq!(count_triangles(&g), brute);
        }

        #[test]
        fn entropy_bounds(n in 1usize..=9, bits in prop::collection::vec(any::<bool>(), 36)) {
            let g = random_graph(n, &bits);
            let h = degree_entropy(&g).unwrap();
            prop_assert!(h >= 0.0 && h <= (n as f64).ln() + 1e-12);
            let degs = g.degree_sequence();
            let regular = degs.iter().all(|&d| d == degs[0]);
            prop_assert_eq!(h == 0.0, regular);
        }

        #[test]
        fn extractors_are_pure(n in 2usize..=9, bits in prop::collection::vec(any::<bool>(), 36)) {
            let g = random_graph(n, &bits);
            for kind in FeatureKind::ALL_DEFAULT {
                prop_assert_eq!(extract_feature(&g, kind).ok(), extract_feature(&g.clone(), kind).ok());
            }
        }
    }
}
