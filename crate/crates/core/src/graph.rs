//! Simple undirected graphs stored as sorted adjacency lists.
//!
//! Node ids are dense and 0-based. Every mutation keeps the adjacency
//! symmetric, loop-free and duplicate-free.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Graph with `node_count` isolated nodes.
    pub fn empty(node_count: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list. Duplicate and reversed pairs collapse
    /// into one edge; self-loops and out-of-range ids are rejected.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(node_count);
        for (u, v) in edges {
            g.check_pair(u, v)?;
            g.insert_unchecked(u, v);
        }
        Ok(g)
    }

    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n)
            .map(|v| (0..n).filter(|&u| u != v).collect())
            .collect();
        Graph {
            adjacency,
            edge_count: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor ids of `v`.
    ///
    /// Panics when `v` is out of range.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Flips the pair `(u, v)`. Returns `true` when the edge is present afterwards.
    pub fn toggle_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        self.check_pair(u, v)?;
        match self.adjacency[u].binary_search(&v) {
            Ok(iu) => {
                self.adjacency[u].remove(iu);
                let iv = self.adjacency[v]
                    .binary_search(&u)
                    .expect("adjacency is symmetric");
                self.adjacency[v].remove(iv);
                self.edge_count -= 1;
                Ok(false)
            }
            Err(iu) => {
                self.adjacency[u].insert(iu, v);
                let iv = self.adjacency[v]
                    .binary_search(&u)
                    .expect_err("adjacency is symmetric");
                self.adjacency[v].insert(iv, u);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    /// Adds `(u, v)` if absent. Returns `true` when a new edge was created.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        self.check_pair(u, v)?;
        Ok(self.insert_unchecked(u, v))
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
            let start = nbrs.partition_point(|&w| w <= u);
            nbrs[start..].iter().map(move |&v| (u, v))
        })
    }

    /// Subgraph induced by `nodes`, relabeled to `0..k` in ascending id order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        let n = self.node_count();
        let mut keep: Vec<usize> = nodes.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&v| v >= n) {
            return Err(Error::InvalidNode {
                id: bad,
                node_count: n,
            });
        }
        let mut relabel = vec![usize::MAX; n];
        for (new, &old) in keep.iter().enumerate() {
            relabel[old] = new;
        }
        let mut sub = Graph::empty(keep.len());
        for (new_u, &old_u) in keep.iter().enumerate() {
            sub.adjacency[new_u] = self.adjacency[old_u]
                .iter()
                .filter_map(|&w| (relabel[w] != usize::MAX).then_some(relabel[w]))
                .collect();
        }
        sub.edge_count = sub.adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(sub)
    }

    /// Breadth-first hop counts from `source`; `None` marks unreachable nodes.
    pub fn shortest_path_distances(&self, source: usize) -> Result<Vec<Option<usize>>> {
        self.check_node(source)?;
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued nodes have a distance");
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut members = Vec::new();
            while let Some(u) = stack.pop() {
                members.push(u);
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                id: v,
                node_count: self.node_count(),
            })
        }
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::InvalidEdge(u, v));
        }
        Ok(())
    }

    fn insert_unchecked(&mut self, u: usize, v: usize) -> bool {
        match self.adjacency[u].binary_search(&v) {
            Ok(_) => false,
            Err(iu) => {
                self.adjacency[u].insert(iu, v);
                let iv = self.adjacency[v].binary_search(&u).unwrap_err();
                self.adjacency[v].insert(iv, u);
                self.edge_count += 1;
                true
            }
        }
    }
}

/// Parses the tab-separated edge-list format.
///
/// A `# n=<N>` header is required; other `#` lines and blank lines are ignored.
/// Fields may be separated by a tab or any run of whitespace.
pub fn read_edge_list(text: &str) -> Result<Graph> {
    let mut node_count: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("n=") {
                let n = value.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad node count header {line:?}"),
                })?;
                if node_count.replace(n).is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "duplicate node count header".into(),
                    });
                }
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two fields, got {line:?}"),
            });
        };
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("node id {s:?} is not a non-negative integer"),
            })
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == v {
            return Err(Error::Parse {
                line: line_no,
                message: format!("self-loop on node {u}"),
            });
        }
        edges.push((line_no, u, v));
    }
    let n = node_count.ok_or(Error::Parse {
        line: 0,
        message: "missing \"# n=<N>\" header".into(),
    })?;
    let mut g = Graph::empty(n);
    for (line_no, u, v) in edges {
        g.add_edge(u, v).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
    }
    Ok(g)
}

/// Canonical edge-list text: header, then `u<TAB>v` with `u < v` in lexicographic order.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + g.edge_count() * 8);
    writeln!(out, "# n={}", g.node_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u}\t{v}").unwrap();
    }
    out
}
