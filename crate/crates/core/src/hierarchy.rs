//! Bottom-up cluster hierarchy over score-ranked edges.
//!
//! Edges are processed in descending mean-score order; an edge whose
//! endpoints lie in different clusters merges them and is recorded as a
//! [`MergeEvent`]. The resulting [`Dendrogram`] can be cut after any number
//! of merges. Cluster labels are always the smallest member node id.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{Clustering, EdgeId, Graph, NodeId};
use crate::lexdfs::EdgeScores;

/// Union-find over node ids with union by size, path halving, and the
/// smallest member id tracked per set as its label.
pub(crate) struct DisjointSet {
    parent: Vec<NodeId>,
    size: Vec<u32>,
    min_label: Vec<NodeId>,
}

impl DisjointSet {
    pub(crate) fn new(n: usize) -> DisjointSet {
        DisjointSet {
            parent: (0..n as NodeId).collect(),
            size: vec![1; n],
            min_label: (0..n as NodeId).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut v: NodeId) -> NodeId {
        while self.parent[v as usize] != v {
            let grand = self.parent[self.parent[v as usize] as usize];
            self.parent[v as usize] = grand;
            v = grand;
        }
        v
    }

    /// Smallest node id in `v`'s set.
    pub(crate) fn label(&mut self, v: NodeId) -> NodeId {
        let root = self.find(v);
        self.min_label[root as usize]
    }

    #[cfg(test)]
    pub(crate) fn size_of(&mut self, v: NodeId) -> u32 {
        let root = self.find(v);
        self.size[root as usize]
    }

    /// Merges the sets of `a` and `b`. Returns `(surviving, absorbed)`
    /// labels — the smaller label survives — or `None` if they were already
    /// one set.
    pub(crate) fn union(&mut self, a: NodeId, b: NodeId) -> Option<(NodeId, NodeId)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (keep, gone) =
            if self.size[ra as usize] >= self.size[rb as usize] { (ra, rb) } else { (rb, ra) };
        self.parent[gone as usize] = keep;
        self.size[keep as usize] += self.size[gone as usize];
        let (la, lb) = (self.min_label[keep as usize], self.min_label[gone as usize]);
        self.min_label[keep as usize] = la.min(lb);
        Some((la.min(lb), la.max(lb)))
    }
}

/// One merge in the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeEvent {
    /// 1-based merge step.
    pub step: u32,
    /// The edge that triggered the merge.
    pub edge: EdgeId,
    /// Label of the merged cluster (the smaller of the two).
    pub surviving_label: u32,
    /// Label that disappeared in this merge.
    pub absorbed_label: u32,
    /// Score attached to the merge: the edge's mean traversal score here,
    /// or the modularity gain for the greedy baseline.
    pub score: f64,
}

/// A merge hierarchy over `n` nodes.
///
/// Holds the ordered merge events plus assignment snapshots every ~√E steps
/// so [`clustering_at`](Dendrogram::clustering_at) answers random cuts
/// without replaying from scratch.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    n: usize,
    edge_order: Vec<EdgeId>,
    events: Vec<MergeEvent>,
    checkpoints: Vec<Vec<u32>>,
    stride: usize,
}

impl Dendrogram {
    /// Assembles a dendrogram from merge events, snapshotting checkpoints.
    ///
    /// `edge_order` is the order edges were considered in (all edges for the
    /// score-ranked hierarchy; just the merge witnesses for builders that
    /// pick cluster pairs directly).
    pub(crate) fn from_events(
        n: usize,
        edge_order: Vec<EdgeId>,
        events: Vec<MergeEvent>,
        g: &Graph,
    ) -> Dendrogram {
        assert!(events.len() < n.max(1), "a hierarchy over {n} nodes admits at most n-1 merges");
        let stride = events.len().isqrt().max(1);
        let mut ds = DisjointSet::new(n);
        let mut checkpoints = Vec::with_capacity(events.len() / stride + 1);
        let snapshot = |ds: &mut DisjointSet| (0..n as NodeId).map(|v| ds.label(v)).collect();
        checkpoints.push(snapshot(&mut ds));
        for (i, ev) in events.iter().enumerate() {
            let (u, v) = g.endpoints(ev.edge);
            let merged = ds.union(u, v);
            debug_assert_eq!(merged, Some((ev.surviving_label, ev.absorbed_label)));
            if (i + 1) % stride == 0 {
                checkpoints.push(snapshot(&mut ds));
            }
        }
        Dendrogram { n, edge_order, events, checkpoints, stride }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn events(&self) -> &[MergeEvent] {
        &self.events
    }

    /// Number of merges; equals `n` minus the number of connected
    /// components when every edge was processed.
    pub fn merge_count(&self) -> usize {
        self.events.len()
    }

    /// The order in which edges were considered while building.
    pub fn edge_order(&self) -> &[EdgeId] {
        &self.edge_order
    }

    /// The clustering after the first `step` merges (step 0 = singletons).
    ///
    /// Restores the nearest checkpoint at or below `step` and replays the
    /// remaining (< √E) events.
    pub fn clustering_at(&self, step: usize, g: &Graph) -> Result<Clustering> {
        if step > self.events.len() {
            return Err(Error::StepOutOfRange { step, last: self.events.len() });
        }
        let base = &self.checkpoints[step / self.stride];
        let mut ds = DisjointSet::new(self.n);
        for (v, &label) in base.iter().enumerate() {
            ds.parent[v] = label;
        }
        let mut size = vec![0u32; self.n];
        for &label in base {
            size[label as usize] += 1;
        }
        ds.size = size;
        for ev in &self.events[(step / self.stride) * self.stride..step] {
            let (u, v) = g.endpoints(ev.edge);
            ds.union(u, v);
        }
        Ok(Clustering::from_assignment((0..self.n as NodeId).map(|v| ds.label(v)).collect()))
    }

    /// Iterates over the node set of the cluster formed at each merge step,
    /// in step order, each sorted ascending.
    pub fn merged_cluster_sequence<'a>(&'a self, g: &'a Graph) -> MergedClusterSequence<'a> {
        MergedClusterSequence {
            dendrogram: self,
            g,
            ds: DisjointSet::new(self.n),
            members: (0..self.n as NodeId).map(|v| vec![v]).collect(),
            next: 0,
        }
    }
}

/// Iterator over per-step merged clusters; see
/// [`Dendrogram::merged_cluster_sequence`].
pub struct MergedClusterSequence<'a> {
    dendrogram: &'a Dendrogram,
    g: &'a Graph,
    ds: DisjointSet,
    members: Vec<Vec<NodeId>>,
    next: usize,
}

impl Iterator for MergedClusterSequence<'_> {
    /// `(step, members of the cluster created at that step)`.
    type Item = (u32, Vec<NodeId>);

    fn next(&mut self) -> Option<Self::Item> {
        let ev = self.dendrogram.events.get(self.next)?;
        self.next += 1;
        let (u, v) = self.g.endpoints(ev.edge);
        let (ru, rv) = (self.ds.find(u), self.ds.find(v));
        debug_assert_ne!(ru, rv, "events only record genuine merges");
        self.ds.union(u, v);
        let root = self.ds.find(u);
        let other = if root == ru { rv } else { ru };
        let moved = std::mem::take(&mut self.members[other as usize]);
        self.members[root as usize].extend(moved);
        let mut merged = self.members[root as usize].clone();
        merged.sort_unstable();
        Some((ev.step, merged))
    }
}

/// Builds the hierarchy for `g` from mean edge scores.
///
/// Every edge is considered, sorted by descending mean score with ties going
/// to the smaller edge id; edges internal to an existing cluster contribute
/// no event. `scores` must cover every edge of `g`.
pub fn build_dendrogram(g: &Graph, scores: &EdgeScores) -> Dendrogram {
    assert_eq!(scores.mean.len(), g.m(), "scores must cover every edge");
    let order = scores.ranked_edges();
    let mut ds = DisjointSet::new(g.n());
    let mut events = Vec::new();
    for &e in &order {
        let (u, v) = g.endpoints(e);
        if let Some((surviving, absorbed)) = ds.union(u, v) {
            events.push(MergeEvent {
                step: events.len() as u32 + 1,
                edge: e,
                surviving_label: surviving,
                absorbed_label: absorbed,
                score: scores.mean[e as usize],
            });
        }
    }
    Dendrogram::from_events(g.n(), order, events, g)
}

/// Writes merge events as `step,edge_u,edge_v,score` rows (with header).
pub fn write_dendrogram_csv<W: Write>(g: &Graph, d: &Dendrogram, mut out: W) -> Result<()> {
    writeln!(out, "step,edge_u,edge_v,score")?;
    for ev in d.events() {
        let (u, v) = g.endpoints(ev.edge);
        writeln!(out, "{},{},{},{}", ev.step, u, v, ev.score)?;
    }
    Ok(())
}
