//! Graph storage and edge-list ingestion.
//!
//! Graphs are simple and undirected, stored in compressed sparse row form.
//! Nodes carry dense internal ids `0..n`; when a graph is loaded from an
//! edge list the original ids are kept in a remap table so results can be
//! reported against the source data. Each undirected edge has a single
//! [`EdgeId`], assigned in first-appearance order.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub type NodeId = u32;
pub type EdgeId = u32;

/// An undirected simple graph in CSR form, optionally edge-weighted.
///
/// Weights, when present, are strictly positive. Unweighted graphs behave
/// as if every edge had weight 1.
#[derive(Debug, Clone)]
pub struct Graph {
    /// CSR row offsets, length `n + 1`.
    offsets: Vec<usize>,
    /// Flattened adjacency: `(neighbor, edge id)`, sorted by neighbor within
    /// each row.
    adj: Vec<(NodeId, EdgeId)>,
    /// Endpoints per edge as `(min, max)`.
    endpoints: Vec<(NodeId, NodeId)>,
    /// Per-edge weights; `None` for unweighted graphs.
    weights: Option<Vec<f64>>,
    /// Original node ids from the input file, indexed by internal id.
    /// `None` when the graph was built programmatically (ids are their own
    /// names in that case).
    external_ids: Option<Vec<u64>>,
}

impl Graph {
    /// Builds an unweighted graph over nodes `0..n` from an edge list.
    ///
    /// Rejects self-loops, out-of-range endpoints, and duplicate edges
    /// (in either orientation).
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Graph> {
        Self::build(n, edges, None, None)
    }

    /// Builds a weighted graph; weights must be finite and strictly positive.
    pub fn from_weighted_edges(n: usize, edges: &[(NodeId, NodeId, f64)]) -> Result<Graph> {
        let pairs: Vec<(NodeId, NodeId)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        let weights: Vec<f64> = edges.iter().map(|&(_, _, w)| w).collect();
        Self::build(n, &pairs, Some(weights), None)
    }

    fn build(
        n: usize,
        edges: &[(NodeId, NodeId)],
        weights: Option<Vec<f64>>,
        external_ids: Option<Vec<u64>>,
    ) -> Result<Graph> {
        if let Some(w) = &weights {
            debug_assert_eq!(w.len(), edges.len());
            for (i, &wi) in w.iter().enumerate() {
                if !wi.is_finite() || wi <= 0.0 {
                    return Err(Error::InvalidGraph(format!(
                        "edge {i} has non-positive weight {wi}"
                    )));
                }
            }
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut endpoints = Vec::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u == v {
                return Err(Error::InvalidGraph(format!("edge {i} is a self-loop at {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} = ({u}, {v}) out of range for {n} nodes"
                )));
            }
            let pair = (u.min(v), u.max(v));
            if !seen.insert(pair) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({u}, {v}) at position {i}"
                )));
            }
            endpoints.push(pair);
        }

        let mut degree = vec![0usize; n];
        for &(u, v) in &endpoints {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets.clone();
        let mut adj = vec![(0 as NodeId, 0 as EdgeId); acc];
        for (e, &(u, v)) in endpoints.iter().enumerate() {
            adj[cursor[u as usize]] = (v, e as EdgeId);
            cursor[u as usize] += 1;
            adj[cursor[v as usize]] = (u, e as EdgeId);
            cursor[v as usize] += 1;
        }
        for v in 0..n {
            adj[offsets[v]..offsets[v + 1]].sort_unstable();
        }

        Ok(Graph { offsets, adj, endpoints, weights, external_ids })
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.endpoints.len()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Neighbors of `v` with the connecting edge ids, sorted by neighbor id.
    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adj[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    /// Endpoints of edge `e` as `(min, max)`.
    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.endpoints[e as usize]
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Weight of edge `e`; 1 for unweighted graphs.
    pub fn weight(&self, e: EdgeId) -> f64 {
        match &self.weights {
            Some(w) => w[e as usize],
            None => 1.0,
        }
    }

    /// The id a node had in the source file, or the internal id itself for
    /// programmatically built graphs.
    pub fn external_id(&self, v: NodeId) -> u64 {
        match &self.external_ids {
            Some(ids) => ids[v as usize],
            None => v as u64,
        }
    }

    /// Sum of degrees over a node set (each internal edge counts twice).
    pub fn volume(&self, members: &[NodeId]) -> u64 {
        members.iter().map(|&v| self.degree(v) as u64).sum()
    }

    /// Number of edges with both endpoints in `members`.
    pub fn internal_edge_count(&self, members: &[NodeId]) -> u64 {
        let mut inside = vec![false; self.n()];
        for &v in members {
            inside[v as usize] = true;
        }
        let mut count = 0;
        for &v in members {
            for &(u, _) in self.neighbors(v) {
                if v < u && inside[u as usize] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Returns a copy with every edge weight multiplied by `alpha`.
    /// An unweighted graph becomes a weighted one with uniform weight
    /// `alpha`.
    pub fn scale_weights(&self, alpha: f64) -> Result<Graph> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidGraph(format!("scale factor {alpha} must be positive")));
        }
        let mut g = self.clone();
        g.weights = Some(match &self.weights {
            Some(w) => w.iter().map(|&x| x * alpha).collect(),
            None => vec![alpha; self.m()],
        });
        Ok(g)
    }
}

/// Reads a whitespace-separated edge list.
///
/// Lines starting with `#` are comments and blank lines are skipped. Every
/// other line must hold exactly two unsigned integers. Self-loop lines are
/// dropped before their ids are looked at, duplicate edges (in either
/// orientation) collapse to one, and surviving node ids are densely
/// renumbered in first-appearance order. The original ids stay available
/// through [`Graph::external_id`].
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut ids: HashMap<u64, NodeId> = HashMap::new();
    let mut external: Vec<u64> = Vec::new();
    let mut seen: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();

    let intern = |raw: u64, external: &mut Vec<u64>, ids: &mut HashMap<u64, NodeId>| match ids
        .entry(raw)
    {
        Entry::Occupied(o) => *o.get(),
        Entry::Vacant(v) => {
            let id = external.len() as NodeId;
            external.push(raw);
            *v.insert(id)
        }
    };

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut tokens = text.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("expected two integers, got {text:?}"),
                })
            }
        };
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                reason: format!("invalid node id {tok:?}"),
            })
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if a == b {
            continue; // self-loop: dropped before id registration
        }
        let u = intern(a, &mut external, &mut ids);
        let v = intern(b, &mut external, &mut ids);
        let pair = (u.min(v), u.max(v));
        if seen.insert(pair) {
            edges.push(pair);
        }
    }

    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    Graph::build(external.len(), &edges, None, Some(external))
}

/// Writes the graph as a canonical edge list: one `u v` pair per line in
/// original (external) ids, smaller endpoint first, pairs sorted.
/// Reloading canonical output and writing it again reproduces the same
/// bytes.
pub fn write_canonical_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    let mut pairs: Vec<(u64, u64)> = (0..g.m() as EdgeId)
        .map(|e| {
            let (u, v) = g.endpoints(e);
            let (a, b) = (g.external_id(u), g.external_id(v));
            (a.min(b), a.max(b))
        })
        .collect();
    pairs.sort_unstable();
    for (a, b) in pairs {
        writeln!(out, "{a} {b}")?;
    }
    Ok(())
}

/// A partition of the nodes `0..n` into labelled clusters.
///
/// Labels are arbitrary `u32`s; clusters produced by the hierarchy use the
/// smallest member id as the label. Iteration is always in ascending label
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    assignment: Vec<u32>,
    clusters: BTreeMap<u32, Vec<NodeId>>,
}

impl Clustering {
    /// Builds a clustering from a per-node label array.
    pub fn from_assignment(assignment: Vec<u32>) -> Clustering {
        let mut clusters: BTreeMap<u32, Vec<NodeId>> = BTreeMap::new();
        for (v, &label) in assignment.iter().enumerate() {
            clusters.entry(label).or_default().push(v as NodeId);
        }
        Clustering { assignment, clusters }
    }

    /// Every node in its own cluster, labelled by its own id.
    pub fn singletons(n: usize) -> Clustering {
        Self::from_assignment((0..n as u32).collect())
    }

    /// All nodes in one cluster labelled 0.
    pub fn whole(n: usize) -> Clustering {
        Self::from_assignment(vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn label_of(&self, v: NodeId) -> u32 {
        self.assignment[v as usize]
    }

    pub fn members(&self, label: u32) -> Option<&[NodeId]> {
        self.clusters.get(&label).map(|m| m.as_slice())
    }

    /// Clusters in ascending label order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &[NodeId])> {
        self.clusters.iter().map(|(&l, m)| (l, m.as_slice()))
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }
}

/// Writes a clustering as `node_id,cluster_label` rows (with header), one
/// row per node in id order.
pub fn write_clustering_csv<W: Write>(c: &Clustering, mut out: W) -> Result<()> {
    writeln!(out, "node_id,cluster_label")?;
    for (v, &label) in c.assignment().iter().enumerate() {
        writeln!(out, "{v},{label}")?;
    }
    Ok(())
}

/// Reads a clustering for a graph with `n` nodes from `node_id,cluster_label`
/// rows. A header line is optional. Every node must appear exactly once;
/// missing nodes are reported in the error.
pub fn read_clustering_csv<R: BufRead>(reader: R, n: usize) -> Result<Clustering> {
    let mut assignment: Vec<Option<u32>> = vec![None; n];
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if lineno == 1 && text.starts_with("node_id") {
            continue;
        }
        let mut fields = text.split(',').map(str::trim);
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("expected node_id,cluster_label, got {text:?}"),
                })
            }
        };
        let node: usize = a.parse().map_err(|_| Error::Parse {
            line: lineno,
            reason: format!("invalid node id {a:?}"),
        })?;
        let label: u32 = b.parse().map_err(|_| Error::Parse {
            line: lineno,
            reason: format!("invalid cluster label {b:?}"),
        })?;
        if node >= n {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("node {node} out of range for {n} nodes"),
            });
        }
        if assignment[node].is_some() {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("node {node} assigned more than once"),
            });
        }
        assignment[node] = Some(label);
    }
    let missing: Vec<NodeId> =
        assignment.iter().enumerate().filter(|(_, a)| a.is_none()).map(|(v, _)| v as NodeId).collect();
    if !missing.is_empty() {
        return Err(Error::MissingNodes { missing });
    }
    Ok(Clustering::from_assignment(assignment.into_iter().map(Option::unwrap).collect()))
}
