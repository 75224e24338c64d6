//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here recomputes quantities from first principles — dense
//! Floyd–Warshall distance matrices, direct scans over the full edge set,
//! exhaustive partition listings — deliberately bypassing the library's own
//! bookkeeping so the two sides of a comparison cannot share a bug.
#![allow(dead_code)] // each test binary uses its own subset

use std::collections::HashSet;
use std::path::PathBuf;

use lexcluster::graph::{Clustering, Graph, NodeId};
use rand::seq::SliceRandom;
use rand::Rng;

/// Two triangles {0,1,2} and {3,4,5} joined by the bridge edge 2–3. The
/// worked example behind most closed-form expectations: Q({A,B}) = 5/14,
/// φ = 1/7, L = 6.
pub fn bridge_graph() -> Graph {
    Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
}

/// Pairwise distances within the induced subgraph by Floyd–Warshall over a
/// dense matrix, indexed by position in `members`. Edge length is 1 on
/// unweighted graphs and `1/w` on weighted ones; unreachable pairs stay
/// infinite.
pub fn oracle_distances(g: &Graph, members: &[NodeId]) -> Vec<Vec<f64>> {
    let k = members.len();
    let pos = |v: NodeId| members.iter().position(|&x| x == v);
    let mut d = vec![vec![f64::INFINITY; k]; k];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in 0..g.m() as u32 {
        let (u, v) = g.endpoints(e);
        if let (Some(i), Some(j)) = (pos(u), pos(v)) {
            let len = if g.is_weighted() { 1.0 / g.weight(e) } else { 1.0 };
            if len < d[i][j] {
                d[i][j] = len;
                d[j][i] = len;
            }
        }
    }
    for mid in 0..k {
        for i in 0..k {
            for j in 0..k {
                let alt = d[i][mid] + d[mid][j];
                if alt < d[i][j] {
                    d[i][j] = alt;
                }
            }
        }
    }
    d
}

/// Induced diameter: the largest entry of the distance matrix.
pub fn oracle_diameter(g: &Graph, members: &[NodeId]) -> f64 {
    let d = oracle_distances(g, members);
    d.iter().flatten().fold(0.0f64, |acc, &x| acc.max(x))
}

/// Mean over members of their largest induced distance.
pub fn oracle_mean_eccentricity(g: &Graph, members: &[NodeId]) -> f64 {
    let d = oracle_distances(g, members);
    let sum: f64 = d.iter().map(|row| row.iter().fold(0.0f64, |acc, &x| acc.max(x))).sum();
    sum / members.len() as f64
}

/// (internal edge count, volume, cut) of a cluster, by scanning every edge
/// of the graph and counting how many endpoints fall inside.
pub fn oracle_counts(g: &Graph, members: &[NodeId]) -> (u64, u64, u64) {
    let inside: HashSet<NodeId> = members.iter().copied().collect();
    let (mut internal, mut cut) = (0u64, 0u64);
    for e in 0..g.m() as u32 {
        let (u, v) = g.endpoints(e);
        match (inside.contains(&u), inside.contains(&v)) {
            (true, true) => internal += 1,
            (true, false) | (false, true) => cut += 1,
            (false, false) => {}
        }
    }
    (internal, 2 * internal + cut, cut)
}

/// Sum of internal edge weights (edge count on unweighted graphs).
pub fn oracle_internal_weight(g: &Graph, members: &[NodeId]) -> f64 {
    let inside: HashSet<NodeId> = members.iter().copied().collect();
    let mut total = 0.0;
    for e in 0..g.m() as u32 {
        let (u, v) = g.endpoints(e);
        if inside.contains(&u) && inside.contains(&v) {
            total += if g.is_weighted() { g.weight(e) } else { 1.0 };
        }
    }
    total
}

/// `None` where the denominator is zero (empty-volume cluster, or a cluster
/// holding the whole volume).
pub fn oracle_conductance(g: &Graph, members: &[NodeId]) -> Option<f64> {
    let (_, vol, cut) = oracle_counts(g, members);
    let denom = vol.min(2 * g.m() as u64 - vol);
    if denom == 0 {
        None
    } else {
        Some(cut as f64 / denom as f64)
    }
}

pub fn oracle_modularity(g: &Graph, c: &Clustering) -> f64 {
    let m = g.m() as f64;
    c.iter()
        .map(|(_, members)| {
            let (internal, vol, _) = oracle_counts(g, members);
            internal as f64 / m - (vol as f64 / (2.0 * m)).powi(2)
        })
        .sum()
}

pub fn oracle_coverage(g: &Graph, c: &Clustering) -> f64 {
    let internal: u64 = c.iter().map(|(_, members)| oracle_counts(g, members).0).sum();
    internal as f64 / g.m() as f64
}

/// Internal weight over induced diameter; zero for edgeless or
/// disconnected clusters.
pub fn oracle_compactness_cluster(g: &Graph, members: &[NodeId]) -> f64 {
    let (internal, _, _) = oracle_counts(g, members);
    let diam = oracle_diameter(g, members);
    if internal == 0 || diam.is_infinite() {
        0.0
    } else {
        oracle_internal_weight(g, members) / diam
    }
}

pub fn oracle_compactness_clustering(g: &Graph, c: &Clustering) -> f64 {
    c.iter().map(|(_, members)| oracle_compactness_cluster(g, members)).sum()
}

/// Number of connected components, by plain stack-based flood fill.
pub fn oracle_component_count(g: &Graph) -> usize {
    let mut seen = vec![false; g.n()];
    let mut components = 0;
    let mut stack = Vec::new();
    for s in 0..g.n() as NodeId {
        if seen[s as usize] {
            continue;
        }
        components += 1;
        seen[s as usize] = true;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &(u, _) in g.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    stack.push(u);
                }
            }
        }
    }
    components
}

/// Whether the members induce a connected subgraph (vacuously true for a
/// singleton), by flood fill restricted to the member set.
pub fn induces_connected(g: &Graph, members: &[NodeId]) -> bool {
    let inside: HashSet<NodeId> = members.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut stack = vec![members[0]];
    seen.insert(members[0]);
    while let Some(v) = stack.pop() {
        for &(u, _) in g.neighbors(v) {
            if inside.contains(&u) && seen.insert(u) {
                stack.push(u);
            }
        }
    }
    seen.len() == members.len()
}

/// Every set partition of `{0..n}` as assignment vectors, enumerated as
/// restricted growth strings: position 0 is labeled 0, and each later
/// position may reuse any earlier label or open the next fresh one.
pub fn set_partitions(n: usize) -> Vec<Vec<u32>> {
    fn extend(prefix: &mut Vec<u32>, max_used: u32, n: usize, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            prefix.push(label);
            extend(prefix, max_used.max(label), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    extend(&mut vec![0], 0, n, &mut out);
    out
}

/// Random simple graph: `n` nodes, each possible pair kept with probability
/// `p`. May be disconnected or edgeless.
pub fn random_graph<R: Rng>(rng: &mut R, n: u32, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n as usize, &edges).unwrap()
}

/// Random connected graph: a spanning path over a shuffled node order plus
/// `extra` random chords.
pub fn connected_graph<R: Rng>(rng: &mut R, n: u32, extra: usize) -> Graph {
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: HashSet<(NodeId, NodeId)> =
        order.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
    add_random_chords(rng, n, extra, &mut edges);
    Graph::from_edges(n as usize, &edges.into_iter().collect::<Vec<_>>()).unwrap()
}

/// Random connected graph with m ≥ n: a spanning cycle over a shuffled node
/// order plus `extra` random chords. On such graphs every visit-time gap is
/// strictly below m, keeping edge scores strictly positive.
pub fn cyclic_graph<R: Rng>(rng: &mut R, n: u32, extra: usize) -> Graph {
    assert!(n >= 3);
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: HashSet<(NodeId, NodeId)> =
        order.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
    let (first, last) = (order[0], order[n as usize - 1]);
    edges.insert((first.min(last), first.max(last)));
    add_random_chords(rng, n, extra, &mut edges);
    Graph::from_edges(n as usize, &edges.into_iter().collect::<Vec<_>>()).unwrap()
}

fn add_random_chords<R: Rng>(
    rng: &mut R,
    n: u32,
    extra: usize,
    edges: &mut HashSet<(NodeId, NodeId)>,
) {
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
}

/// Random connected weighted graph; weights drawn from [0.25, 4).
pub fn weighted_graph<R: Rng>(rng: &mut R, n: u32, extra: usize) -> Graph {
    let plain = connected_graph(rng, n, extra);
    let edges: Vec<(NodeId, NodeId, f64)> = (0..plain.m() as u32)
        .map(|e| {
            let (u, v) = plain.endpoints(e);
            (u, v, rng.gen_range(0.25..4.0))
        })
        .collect();
    Graph::from_weighted_edges(plain.n(), &edges).unwrap()
}

/// Uniformly random assignment of `n` nodes to at most `max_labels`
/// clusters (empty labels simply never materialize).
pub fn random_clustering<R: Rng>(rng: &mut R, n: usize, max_labels: u32) -> Clustering {
    Clustering::from_assignment((0..n).map(|_| rng.gen_range(0..max_labels)).collect())
}

pub fn facebook_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/facebook_combined.txt")
}

/// Loads the facebook social-circles snapshot, or panics with fetch
/// instructions when the file has not been downloaded yet.
pub fn load_facebook() -> Graph {
    let path = facebook_path();
    let file = std::fs::File::open(&path).unwrap_or_else(|e| {
        panic!(
            "cannot open {} ({e}); run scripts/fetch_data.sh to download the \
             facebook dataset first",
            path.display()
        )
    });
    let g = lexcluster::graph::load_edge_list(std::io::BufReader::new(file)).unwrap();
    assert_eq!((g.n(), g.m()), (4039, 88234), "unexpected facebook snapshot");
    g
}
