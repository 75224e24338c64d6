//! Greedy agglomerative modularity baseline.
//!
//! Starts from singletons and repeatedly merges the cluster pair with the
//! largest modularity gain `ΔQ = x/m − Vol_a·Vol_b/(2m²)`, where `x` counts
//! the edges between the pair. Ties go to the lexicographically smallest
//! label pair. Merging continues past `ΔQ ≤ 0` until each connected
//! component is one cluster, so the result is a full dendrogram comparable
//! to the score-ranked one; the best-modularity cut is recovered by
//! maximizing over the trace.
//!
//! Pair gains live in a lazy max-heap: entries are validated on pop by
//! recomputing the gain from current state and discarding mismatches,
//! while every merge pushes fresh entries for the pairs it touched.

use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::hierarchy::{Dendrogram, MergeEvent};

/// The modularity gain of merging clusters with `x` connecting edges and
/// volumes `va`, `vb`. One shared expression keeps heap validation bitwise
/// stable.
#[inline]
fn delta_q(x: u64, va: u64, vb: u64, m: u64) -> f64 {
    x as f64 / m as f64 - (va as f64 * vb as f64) / (2.0 * m as f64 * m as f64)
}

struct PairGain {
    dq: f64,
    a: u32,
    b: u32,
}

impl PartialEq for PairGain {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for PairGain {}
impl PartialOrd for PairGain {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PairGain {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap: larger gain first; on equal gains the smaller label
        // pair compares greater so it pops first.
        self.dq
            .total_cmp(&other.dq)
            .then_with(|| (other.a, other.b).cmp(&(self.a, self.b)))
    }
}

/// Builds the greedy modularity dendrogram. Each merge event's `edge` is
/// the smallest-id edge joining the merged pair and its `score` is the
/// modularity gain. Errors on edgeless graphs.
pub fn cnm_dendrogram(g: &Graph) -> Result<Dendrogram> {
    if g.m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let n = g.n();
    let m = g.m() as u64;

    // Reps track member lists small-to-large; labels (smallest member id)
    // index volumes and the cross-edge maps.
    let mut cluster_of: Vec<NodeId> = (0..n as NodeId).collect();
    let mut members: Vec<Vec<NodeId>> = (0..n as NodeId).map(|v| vec![v]).collect();
    let mut label_of_rep: Vec<u32> = (0..n as u32).collect();
    let mut rep_of_label: Vec<NodeId> = (0..n as NodeId).collect();
    let mut live: Vec<bool> = vec![true; n];
    let mut vol: Vec<u64> = (0..n as NodeId).map(|v| g.degree(v) as u64).collect();
    let mut cross: Vec<HashMap<u32, u64>> = vec![HashMap::new(); n];

    let mut heap = BinaryHeap::with_capacity(g.m() * 2);
    for e in 0..g.m() as EdgeId {
        let (u, v) = g.endpoints(e);
        cross[u as usize].insert(v, 1);
        cross[v as usize].insert(u, 1);
        heap.push(PairGain { dq: delta_q(1, vol[u as usize], vol[v as usize], m), a: u, b: v });
    }

    let mut events = Vec::new();
    let mut edge_order = Vec::new();
    while let Some(PairGain { dq, a, b }) = heap.pop() {
        if !live[a as usize] || !live[b as usize] {
            continue;
        }
        let x = match cross[a as usize].get(&b) {
            Some(&x) => x,
            None => continue,
        };
        if delta_q(x, vol[a as usize], vol[b as usize], m).to_bits() != dq.to_bits() {
            continue; // stale: the pair's gain has changed since this push
        }

        let (ra, rb) = (rep_of_label[a as usize], rep_of_label[b as usize]);
        let (big, small) = if members[ra as usize].len() >= members[rb as usize].len() {
            (ra, rb)
        } else {
            (rb, ra)
        };
        // Witness edge: the smallest edge id joining the two clusters.
        let mut witness = EdgeId::MAX;
        for &w in &members[small as usize] {
            for &(x_nb, e) in g.neighbors(w) {
                if cluster_of[x_nb as usize] == big && e < witness {
                    witness = e;
                }
            }
        }
        debug_assert_ne!(witness, EdgeId::MAX);

        let new_label = a.min(b);
        let dead = a.max(b);
        let moved = std::mem::take(&mut members[small as usize]);
        for &w in &moved {
            cluster_of[w as usize] = big;
        }
        members[big as usize].extend(moved);
        label_of_rep[big as usize] = new_label;
        rep_of_label[new_label as usize] = big;
        live[dead as usize] = false;
        vol[new_label as usize] = vol[a as usize] + vol[b as usize];

        // Fold the two cross maps, dropping the internal pair, and patch
        // every neighbor's map to point at the surviving label.
        let map_a = std::mem::take(&mut cross[a as usize]);
        let map_b = std::mem::take(&mut cross[b as usize]);
        let (mut combined, smaller) =
            if map_a.len() >= map_b.len() { (map_a, map_b) } else { (map_b, map_a) };
        for (nbr, cnt) in smaller {
            *combined.entry(nbr).or_insert(0) += cnt;
        }
        combined.remove(&a);
        combined.remove(&b);
        for (&nbr, &cnt) in &combined {
            let nbr_map = &mut cross[nbr as usize];
            nbr_map.remove(&a);
            nbr_map.remove(&b);
            nbr_map.insert(new_label, cnt);
            let gain = delta_q(cnt, vol[new_label as usize], vol[nbr as usize], m);
            heap.push(PairGain { dq: gain, a: new_label.min(nbr), b: new_label.max(nbr) });
        }
        cross[new_label as usize] = combined;

        edge_order.push(witness);
        events.push(MergeEvent {
            step: events.len() as u32 + 1,
            edge: witness,
            surviving_label: new_label,
            absorbed_label: dead,
            score: dq,
        });
    }

    Ok(Dendrogram::from_events(n, edge_order, events, g))
}
