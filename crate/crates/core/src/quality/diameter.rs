//! Path-length statistics of induced subgraphs.
//!
//! All searches run on the full graph's adjacency restricted by a
//! membership predicate, with reusable scratch arrays so per-merge
//! recomputation during trace replay stays allocation-free. Unweighted
//! distances are hop counts; weighted distances use edge length `1/w`, so
//! heavier edges are shorter.
//!
//! Exact diameters come from all-sources search for small clusters and the
//! iterative fringe upper/lower bound scheme (iFUB) for large unweighted
//! ones, which typically needs only a handful of BFS passes instead of one
//! per node and still returns the exact value. Diameter computations also
//! report a witness pair realizing the value, which lets incremental
//! callers certify that an old diameter survived a merge without a full
//! recomputation.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::graph::{Graph, NodeId};
use crate::quality::{CompactnessConfig, DiameterMethod, PathLength};

const UNSEEN: u32 = u32::MAX;

/// Clusters at or below this size skip iFUB and use all-sources BFS; the
/// bookkeeping is not worth it for a few dozen nodes.
const ALL_SOURCES_CUTOFF: usize = 64;

pub(crate) struct DistScratch {
    dist: Vec<u32>,
    fdist: Vec<f64>,
    parent: Vec<NodeId>,
    touched: Vec<NodeId>,
    queue: VecDeque<NodeId>,
    heap: BinaryHeap<HeapEntry>,
}

struct HeapEntry {
    dist: f64,
    node: NodeId,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.node == other.node
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // Reversed so the max-heap pops the smallest distance; ties go to the
    // smaller node id. Distances are finite by construction.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .expect("distances are finite")
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Result of one restricted single-source search.
pub(crate) struct Sweep {
    /// Eccentricity of the source (hop count cast to f64 when unweighted).
    pub(crate) ecc: f64,
    /// Node realizing the eccentricity; smallest id on ties.
    pub(crate) farthest: NodeId,
    pub(crate) reached: usize,
}

/// An exact diameter together with a pair of nodes realizing it.
pub(crate) struct WitnessedDiameter {
    pub(crate) diameter: f64,
    pub(crate) witness: (NodeId, NodeId),
}

impl DistScratch {
    pub(crate) fn new(n: usize) -> DistScratch {
        DistScratch {
            dist: vec![UNSEEN; n],
            fdist: vec![f64::INFINITY; n],
            parent: vec![0; n],
            touched: Vec::new(),
            queue: VecDeque::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v as usize] = UNSEEN;
            self.fdist[v as usize] = f64::INFINITY;
        }
        self.touched.clear();
        self.queue.clear();
        self.heap.clear();
    }

    /// Single-source search from `src`, BFS or Dijkstra depending on the
    /// graph. Distances stay readable via [`last_dist`](Self::last_dist)
    /// until the next sweep.
    pub(crate) fn sweep<F: Fn(NodeId) -> bool>(&mut self, g: &Graph, src: NodeId, inside: &F) -> Sweep {
        if g.is_weighted() {
            self.dijkstra(g, src, inside)
        } else {
            self.bfs(g, src, inside, false)
        }
    }

    /// Distance of `v` from the last sweep's source; infinite if unreached.
    pub(crate) fn last_dist(&self, g: &Graph, v: NodeId) -> f64 {
        if g.is_weighted() {
            self.fdist[v as usize]
        } else if self.dist[v as usize] == UNSEEN {
            f64::INFINITY
        } else {
            self.dist[v as usize] as f64
        }
    }

    /// BFS from `src` over nodes satisfying `inside`.
    fn bfs<F: Fn(NodeId) -> bool>(
        &mut self,
        g: &Graph,
        src: NodeId,
        inside: &F,
        record_parents: bool,
    ) -> Sweep {
        self.reset();
        self.dist[src as usize] = 0;
        self.touched.push(src);
        self.queue.push_back(src);
        if record_parents {
            self.parent[src as usize] = src;
        }
        while let Some(v) = self.queue.pop_front() {
            let d = self.dist[v as usize];
            for &(u, _) in g.neighbors(v) {
                if self.dist[u as usize] == UNSEEN && inside(u) {
                    self.dist[u as usize] = d + 1;
                    if record_parents {
                        self.parent[u as usize] = v;
                    }
                    self.touched.push(u);
                    self.queue.push_back(u);
                }
            }
        }
        let mut far = src;
        let mut ecc = 0u32;
        for &v in &self.touched {
            let d = self.dist[v as usize];
            if d > ecc || (d == ecc && v < far) {
                ecc = d;
                far = v;
            }
        }
        Sweep { ecc: ecc as f64, farthest: far, reached: self.touched.len() }
    }

    /// Dijkstra from `src` with edge lengths `1/w`, restricted by `inside`.
    fn dijkstra<F: Fn(NodeId) -> bool>(&mut self, g: &Graph, src: NodeId, inside: &F) -> Sweep {
        self.reset();
        self.fdist[src as usize] = 0.0;
        self.touched.push(src);
        self.heap.push(HeapEntry { dist: 0.0, node: src });
        while let Some(HeapEntry { dist, node }) = self.heap.pop() {
            if dist > self.fdist[node as usize] {
                continue;
            }
            for &(u, e) in g.neighbors(node) {
                if !inside(u) {
                    continue;
                }
                let next = dist + 1.0 / g.weight(e);
                if next < self.fdist[u as usize] {
                    if self.fdist[u as usize] == f64::INFINITY {
                        self.touched.push(u);
                    }
                    self.fdist[u as usize] = next;
                    self.heap.push(HeapEntry { dist: next, node: u });
                }
            }
        }
        let mut far = src;
        let mut ecc = 0.0f64;
        for &v in &self.touched {
            let d = self.fdist[v as usize];
            if d > ecc || (d == ecc && v < far) {
                ecc = d;
                far = v;
            }
        }
        Sweep { ecc, farthest: far, reached: self.touched.len() }
    }

    /// Exact diameter of the induced subgraph; infinity if disconnected.
    pub(crate) fn exact_diameter<F: Fn(NodeId) -> bool>(
        &mut self,
        g: &Graph,
        members: &[NodeId],
        inside: &F,
    ) -> f64 {
        self.exact_diameter_witnessed(g, members, inside).diameter
    }

    /// Exact diameter plus a node pair realizing it (meaningless when the
    /// subgraph is disconnected and the diameter is infinite).
    pub(crate) fn exact_diameter_witnessed<F: Fn(NodeId) -> bool>(
        &mut self,
        g: &Graph,
        members: &[NodeId],
        inside: &F,
    ) -> WitnessedDiameter {
        assert!(!members.is_empty());
        if members.len() == 1 {
            return WitnessedDiameter { diameter: 0.0, witness: (members[0], members[0]) };
        }
        if !g.is_weighted() && members.len() > ALL_SOURCES_CUTOFF {
            return self.ifub_diameter(g, members, inside);
        }
        self.all_sources_diameter(g, members, inside)
    }

    /// One sweep per member; exact for any graph, quadratic-ish cost.
    fn all_sources_diameter<F: Fn(NodeId) -> bool>(
        &mut self,
        g: &Graph,
        members: &[NodeId],
        inside: &F,
    ) -> WitnessedDiameter {
        let mut best = WitnessedDiameter { diameter: 0.0, witness: (members[0], members[0]) };
        for (i, &v) in members.iter().enumerate() {
            let sweep = self.sweep(g, v, inside);
            if i == 0 && sweep.reached < members.len() {
                return WitnessedDiameter { diameter: f64::INFINITY, witness: (v, v) };
            }
            if sweep.ecc > best.diameter {
                best = WitnessedDiameter { diameter: sweep.ecc, witness: (v, sweep.farthest) };
            }
        }
        best
    }

    /// iFUB: root a BFS at the midpoint of an approximate longest path, then
    /// resolve fringe levels top-down until the lower bound certifies the
    /// exact diameter. Unweighted graphs only.
    fn ifub_diameter<F: Fn(NodeId) -> bool>(
        &mut self,
        g: &Graph,
        members: &[NodeId],
        inside: &F,
    ) -> WitnessedDiameter {
        debug_assert!(!g.is_weighted());
        // Start the double sweep from the highest-degree member.
        let s0 = *members
            .iter()
            .max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v)))
            .expect("cluster not empty");
        let first = self.bfs(g, s0, inside, false);
        if first.reached < members.len() {
            return WitnessedDiameter { diameter: f64::INFINITY, witness: (s0, s0) };
        }
        let a = first.farthest;
        let sweep_a = self.bfs(g, a, inside, true);
        let mut lb = sweep_a.ecc as u32;
        let mut witness = (a, sweep_a.farthest);
        // Walk halfway back along the found path to its midpoint.
        let mut mid = sweep_a.farthest;
        for _ in 0..lb / 2 {
            mid = self.parent[mid as usize];
        }
        let root_sweep = self.bfs(g, mid, inside, false);
        let root_ecc = root_sweep.ecc as u32;
        let mut levels: Vec<Vec<NodeId>> = vec![Vec::new(); root_ecc as usize + 1];
        for &v in &self.touched {
            levels[self.dist[v as usize] as usize].push(v);
        }
        for level in &mut levels {
            level.sort_unstable();
        }
        if root_ecc > lb {
            lb = root_ecc;
            witness = (mid, root_sweep.farthest);
        }

        let mut i = root_ecc;
        // Invariant: every node at BFS level > i has had its eccentricity
        // folded into lb, so the diameter is at most max(lb, 2i).
        while lb < 2 * i {
            for &v in &levels[i as usize] {
                let sweep = self.bfs(g, v, inside, false);
                if sweep.ecc as u32 > lb {
                    lb = sweep.ecc as u32;
                    witness = (v, sweep.farthest);
                }
            }
            if lb > 2 * (i - 1) {
                break;
            }
            i -= 1;
        }
        WitnessedDiameter { diameter: lb as f64, witness }
    }

    /// Double-sweep lower bound on the diameter (exact on trees, a lower
    /// bound in general); infinity if disconnected. Weighted graphs fall
    /// back to the exact computation.
    fn double_sweep_lower_bound<F: Fn(NodeId) -> bool>(
        &mut self,
        g: &Graph,
        members: &[NodeId],
        inside: &F,
    ) -> f64 {
        if members.len() == 1 {
            return 0.0;
        }
        if g.is_weighted() {
            return self.all_sources_diameter(g, members, inside).diameter;
        }
        let s0 = *members
            .iter()
            .max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v)))
            .expect("cluster not empty");
        let first = self.bfs(g, s0, inside, false);
        if first.reached < members.len() {
            return f64::INFINITY;
        }
        self.bfs(g, first.farthest, inside, false).ecc
    }

    /// Mean eccentricity over the cluster (all-sources); infinity if
    /// disconnected. Averaged in ascending member order for determinism.
    fn mean_eccentricity<F: Fn(NodeId) -> bool>(
        &mut self,
        g: &Graph,
        members: &[NodeId],
        inside: &F,
    ) -> f64 {
        if members.len() == 1 {
            return 0.0;
        }
        let mut sum = 0.0f64;
        for (i, &v) in members.iter().enumerate() {
            let sweep = self.sweep(g, v, inside);
            if i == 0 && sweep.reached < members.len() {
                return f64::INFINITY;
            }
            sum += sweep.ecc;
        }
        sum / members.len() as f64
    }

    /// The path-length statistic selected by `cfg`: the (exact or
    /// lower-bounded) diameter, or the mean eccentricity.
    pub(crate) fn path_length<F: Fn(NodeId) -> bool>(
        &mut self,
        g: &Graph,
        members: &[NodeId],
        inside: &F,
        cfg: &CompactnessConfig,
    ) -> f64 {
        match (cfg.path_length, cfg.method) {
            (PathLength::MeanEccentricity, _) => self.mean_eccentricity(g, members, inside),
            (PathLength::Diameter, DiameterMethod::Exact) => {
                self.exact_diameter(g, members, inside)
            }
            (PathLength::Diameter, DiameterMethod::DoubleSweepLowerBound) => {
                self.double_sweep_lower_bound(g, members, inside)
            }
        }
    }
}
