//! Clustering quality measures.
//!
//! Conductance, modularity, and coverage are defined on edge and degree
//! *counts* and ignore weights even on weighted graphs. Compactness is the
//! cluster's internal edge weight divided by its induced diameter, so it
//! rewards clusters that are both dense and tight; weighted graphs use
//! inverse-weight edge lengths for the diameter and the weight sum in the
//! numerator.

mod axioms;
mod diameter;
mod trace;

pub use axioms::{check_axiom_properties, AxiomReport};
pub use trace::{trace_dendrogram_quality, QualityTrace, StepQuality};

pub(crate) use diameter::DistScratch;

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Clustering, Graph, NodeId};

/// Which per-cluster path-length statistic divides the internal weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathLength {
    #[default]
    Diameter,
    /// Mean over members of their in-cluster eccentricity.
    MeanEccentricity,
}

/// How the diameter is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiameterMethod {
    #[default]
    Exact,
    /// Two BFS sweeps; cheaper but only a lower bound on the diameter (so
    /// an upper estimate of compactness). Weighted graphs always use the
    /// exact computation.
    DoubleSweepLowerBound,
}

/// Options for compactness evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompactnessConfig {
    pub path_length: PathLength,
    pub method: DiameterMethod,
    /// Divide clustering-level totals by the graph's edge count. Applies to
    /// whole-clustering and trace values, never to single clusters.
    pub normalize: bool,
}

/// Everything measured about one cluster; one CSV row of the per-cluster
/// quality export.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterQuality {
    pub label: u32,
    pub size: u32,
    /// Number of edges with both endpoints inside.
    pub internal_edges: u64,
    /// Their weight sum (equals `internal_edges` on unweighted graphs).
    pub internal_weight: f64,
    /// Degree sum over members.
    pub volume: u64,
    /// Number of edges leaving the cluster.
    pub cut: u64,
    /// Induced path-length statistic per the config; infinite when the
    /// induced subgraph is disconnected.
    pub diameter: f64,
    pub compactness: f64,
    /// `None` when the cluster or complement volume is zero.
    pub conductance: Option<f64>,
}

/// Modularity contribution of one cluster, written exactly this way
/// everywhere so trace replay and from-scratch evaluation agree bitwise.
#[inline]
pub(crate) fn modularity_term(internal: u64, volume: u64, m: u64) -> f64 {
    internal as f64 / m as f64 - (volume as f64 / (2 * m) as f64).powi(2)
}

/// Compactness of a cluster given its internal weight and path length;
/// 0 for edgeless or disconnected clusters.
#[inline]
pub(crate) fn compactness_value(internal_edges: u64, internal_weight: f64, path_length: f64) -> f64 {
    if internal_edges == 0 || path_length.is_infinite() {
        0.0
    } else {
        internal_weight / path_length
    }
}

fn cluster_counts(g: &Graph, members: &[NodeId], inside: &impl Fn(NodeId) -> bool) -> (u64, f64, u64) {
    let mut internal = 0u64;
    let mut weight = 0.0f64;
    let mut volume = 0u64;
    for &v in members {
        volume += g.degree(v) as u64;
        for &(u, e) in g.neighbors(v) {
            if v < u && inside(u) {
                internal += 1;
                weight += g.weight(e);
            }
        }
    }
    (internal, weight, volume)
}

/// Conductance of one cluster: cut edges over the smaller of the cluster's
/// volume and the complement's volume. Errors if the cluster is empty or
/// either volume is zero.
pub fn conductance_cluster(g: &Graph, members: &[NodeId]) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let mut inside = vec![false; g.n()];
    for &v in members {
        inside[v as usize] = true;
    }
    let (internal, _, volume) = cluster_counts(g, members, &|v| inside[v as usize]);
    let complement = 2 * g.m() as u64 - volume;
    if volume.min(complement) == 0 {
        return Err(Error::UndefinedConductance);
    }
    let cut = volume - 2 * internal;
    Ok(cut as f64 / volume.min(complement) as f64)
}

/// Conductance of a clustering: the minimum over its clusters, taken in
/// label order. Errors if any cluster's conductance is undefined.
pub fn conductance_clustering(g: &Graph, c: &Clustering) -> Result<f64> {
    let mut best = f64::INFINITY;
    for (_, members) in c.iter() {
        best = best.min(conductance_cluster(g, members)?);
    }
    if best.is_infinite() {
        return Err(Error::EmptyCluster);
    }
    Ok(best)
}

fn per_label_counts(g: &Graph, c: &Clustering) -> std::collections::BTreeMap<u32, (u64, u64)> {
    let mut counts: std::collections::BTreeMap<u32, (u64, u64)> =
        c.iter().map(|(label, _)| (label, (0, 0))).collect();
    for e in 0..g.m() as u32 {
        let (u, v) = g.endpoints(e);
        if c.label_of(u) == c.label_of(v) {
            counts.get_mut(&c.label_of(u)).unwrap().0 += 1;
        }
    }
    for v in 0..g.n() as NodeId {
        counts.get_mut(&c.label_of(v)).unwrap().1 += g.degree(v) as u64;
    }
    counts
}

/// Newman modularity of a clustering, on edge counts. Errors on edgeless
/// graphs. Ranges over (-1/2, 1].
pub fn modularity(g: &Graph, c: &Clustering) -> Result<f64> {
    if g.m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let m = g.m() as u64;
    Ok(per_label_counts(g, c).values().map(|&(internal, volume)| modularity_term(internal, volume, m)).sum())
}

/// Fraction of edges internal to some cluster. Errors on edgeless graphs.
pub fn coverage(g: &Graph, c: &Clustering) -> Result<f64> {
    if g.m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let internal: u64 = per_label_counts(g, c).values().map(|&(i, _)| i).sum();
    Ok(internal as f64 / g.m() as f64)
}

/// Compactness of one cluster with explicit options. Errors if empty;
/// 0 for edgeless or disconnected clusters.
pub fn compactness_cluster_with(
    g: &Graph,
    members: &[NodeId],
    cfg: &CompactnessConfig,
) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let mut inside = vec![false; g.n()];
    for &v in members {
        inside[v as usize] = true;
    }
    let inside = |v: NodeId| inside[v as usize];
    let (internal, weight, _) = cluster_counts(g, members, &inside);
    if internal == 0 {
        return Ok(0.0);
    }
    let path = DistScratch::new(g.n()).path_length(g, members, &inside, cfg);
    Ok(compactness_value(internal, weight, path))
}

/// Compactness of one cluster: internal weight over exact induced diameter.
pub fn compactness_cluster(g: &Graph, members: &[NodeId]) -> Result<f64> {
    compactness_cluster_with(g, members, &CompactnessConfig::default())
}

/// Clustering-level compactness: the sum of cluster compactness values in
/// label order, divided by the edge count if `cfg.normalize` is set.
pub fn compactness_clustering_with(g: &Graph, c: &Clustering, cfg: &CompactnessConfig) -> f64 {
    let mut total = 0.0;
    for (_, members) in c.iter() {
        total += compactness_cluster_with(g, members, cfg).expect("clusters are non-empty");
    }
    if cfg.normalize {
        total /= g.m() as f64;
    }
    total
}

/// Clustering-level compactness with default options (exact diameter,
/// unnormalized).
pub fn compactness_clustering(g: &Graph, c: &Clustering) -> f64 {
    compactness_clustering_with(g, c, &CompactnessConfig::default())
}

/// Exact diameter of the subgraph induced by `members`; infinite when
/// disconnected, 0 for singletons. Errors if empty.
pub fn cluster_diameter(g: &Graph, members: &[NodeId]) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let mut inside = vec![false; g.n()];
    for &v in members {
        inside[v as usize] = true;
    }
    Ok(DistScratch::new(g.n()).exact_diameter(g, members, &|v| inside[v as usize]))
}

pub(crate) fn cluster_quality_inner(
    g: &Graph,
    label: u32,
    members: &[NodeId],
    inside: &impl Fn(NodeId) -> bool,
    scratch: &mut DistScratch,
    cfg: &CompactnessConfig,
) -> ClusterQuality {
    let (internal, weight, volume) = cluster_counts(g, members, inside);
    let cut = volume - 2 * internal;
    let diameter = if internal == 0 && members.len() > 1 {
        f64::INFINITY
    } else {
        scratch.path_length(g, members, inside, cfg)
    };
    let complement = 2 * g.m() as u64 - volume;
    let conductance = if volume.min(complement) == 0 {
        None
    } else {
        Some(cut as f64 / volume.min(complement) as f64)
    };
    ClusterQuality {
        label,
        size: members.len() as u32,
        internal_edges: internal,
        internal_weight: weight,
        volume,
        cut,
        diameter,
        compactness: compactness_value(internal, weight, diameter),
        conductance,
    }
}

/// Full quality row for one cluster.
pub fn cluster_quality(
    g: &Graph,
    label: u32,
    members: &[NodeId],
    cfg: &CompactnessConfig,
) -> Result<ClusterQuality> {
    if members.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let mut inside = vec![false; g.n()];
    for &v in members {
        inside[v as usize] = true;
    }
    Ok(cluster_quality_inner(
        g,
        label,
        members,
        &|v| inside[v as usize],
        &mut DistScratch::new(g.n()),
        cfg,
    ))
}

/// Quality rows for every cluster, in label order. Clusters are evaluated
/// in parallel.
pub fn evaluate_clustering(g: &Graph, c: &Clustering, cfg: &CompactnessConfig) -> Vec<ClusterQuality> {
    let clusters: Vec<(u32, &[NodeId])> = c.iter().collect();
    clusters
        .par_iter()
        .map_init(
            || DistScratch::new(g.n()),
            |scratch, &(label, members)| {
                cluster_quality_inner(g, label, members, &|v| c.label_of(v) == label, scratch, cfg)
            },
        )
        .collect()
}

/// Writes cluster quality rows as CSV (with header). Undefined conductance
/// is written as `nan`, disconnected diameters as `inf`.
pub fn write_quality_csv<W: Write>(mut out: W, rows: &[ClusterQuality]) -> Result<()> {
    writeln!(
        out,
        "label,size,internal_edges,internal_weight,volume,cut,diameter,compactness,conductance"
    )?;
    for r in rows {
        let conductance = match r.conductance {
            Some(c) => c.to_string(),
            None => "nan".to_string(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{conductance}",
            r.label, r.size, r.internal_edges, r.internal_weight, r.volume, r.cut, r.diameter,
            r.compactness
        )?;
    }
    Ok(())
}
