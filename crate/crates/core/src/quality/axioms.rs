//! Structural checks on the compactness measure.
//!
//! Three properties are exercised on concrete graphs and clusterings:
//!
//! * **Scaling**: multiplying all weights by `α` multiplies each cluster's
//!   compactness by `α²` (weight sum gains `α`, inverse-weight distances
//!   shrink by `α`). Exact when `α` is a power of two, since those scalings
//!   commute with rounding; otherwise checked to relative 1e-9. Cluster
//!   rankings must be preserved either way.
//! * **Locality**: a cluster's compactness depends only on the cluster
//!   itself, and family totals add. Per-cluster independence is checked
//!   bitwise; additivity of totals is checked in exact expansion
//!   arithmetic, with no tolerance.
//! * **Monotonicity**: raising the weight of an intra-cluster edge never
//!   lowers that cluster's (or the clustering's) compactness. Float
//!   rounding is monotone, so this holds with no tolerance too.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Clustering, EdgeId, Graph};
use crate::quality::{compactness_cluster, compactness_clustering, evaluate_clustering, CompactnessConfig};

const SCALE_REL_TOL: f64 = 1e-9;

/// Outcome of [`check_axiom_properties`]: how many individual checks ran
/// per property, and a description of every violation found.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub alpha: f64,
    pub scale_checks: usize,
    pub locality_checks: usize,
    pub monotonicity_checks: usize,
    pub violations: Vec<String>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha {}: {} scale, {} locality, {} monotonicity checks, {} violation(s)",
            self.alpha,
            self.scale_checks,
            self.locality_checks,
            self.monotonicity_checks,
            self.violations.len()
        )?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// Error-free transformation: returns `(fl(a+b), err)` with
/// `a + b = fl(a+b) + err` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bv = s - a;
    let av = s - bv;
    (s, (a - av) + (b - bv))
}

/// A multi-component float holding an exact running sum (Shewchuk-style
/// expansion): the represented value is the exact real sum of everything
/// added. Used to check additivity with zero tolerance.
#[derive(Debug, Clone, Default)]
pub(crate) struct ExactSum {
    components: Vec<f64>,
}

impl ExactSum {
    pub(crate) fn add(&mut self, x: f64) {
        let mut carry = x;
        let mut out = Vec::with_capacity(self.components.len() + 1);
        for &c in &self.components {
            let (sum, err) = two_sum(carry, c);
            if err != 0.0 {
                out.push(err);
            }
            carry = sum;
        }
        if carry != 0.0 {
            out.push(carry);
        }
        self.components = out;
    }

    /// Exactly zero — for a nonoverlapping expansion this is equivalent to
    /// having no nonzero components.
    pub(crate) fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0.0)
    }

    pub(crate) fn approx(&self) -> f64 {
        self.components.iter().sum()
    }
}

fn is_power_of_two(x: f64) -> bool {
    // Normal positive floats with an empty mantissa are exactly 2^k.
    x.is_normal() && x > 0.0 && x.to_bits() & ((1u64 << 52) - 1) == 0
}

/// Runs all three checks over the given clusterings with scale factor
/// `alpha`. The graph may be unweighted; scaling and weight bumps then act
/// on implicit unit weights. Errors if a clustering does not match the
/// graph's node count or `alpha` is not positive.
pub fn check_axiom_properties(
    g: &Graph,
    clusterings: &[Clustering],
    alpha: f64,
) -> Result<AxiomReport> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidGraph(format!("scale factor {alpha} must be positive")));
    }
    for c in clusterings {
        if c.n() != g.n() {
            return Err(Error::InvalidGraph(format!(
                "clustering covers {} nodes, graph has {}",
                c.n(),
                g.n()
            )));
        }
    }

    let mut report = AxiomReport {
        alpha,
        scale_checks: 0,
        locality_checks: 0,
        monotonicity_checks: 0,
        violations: Vec::new(),
    };
    let cfg = CompactnessConfig::default();
    let scaled = g.scale_weights(alpha)?;
    let alpha_sq = alpha * alpha;
    let exact_scale = is_power_of_two(alpha);

    for (ci, c) in clusterings.iter().enumerate() {
        let rows = evaluate_clustering(g, c, &cfg);
        let values: Vec<f64> = rows.iter().map(|r| r.compactness).collect();
        let scaled_rows = evaluate_clustering(&scaled, c, &cfg);

        // Scaling: per-cluster ratio and preserved ranking.
        for (row, srow) in rows.iter().zip(&scaled_rows) {
            report.scale_checks += 1;
            let expect = alpha_sq * row.compactness;
            let err = (srow.compactness - expect).abs();
            let bound = if exact_scale { 0.0 } else { SCALE_REL_TOL * expect.abs().max(1.0) };
            if err > bound {
                report.violations.push(format!(
                    "clustering {ci} cluster {}: scaled compactness {} != {} * {} (err {err:e})",
                    row.label, srow.compactness, alpha_sq, row.compactness
                ));
            }
        }
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let (a, b) = (values[i], values[j]);
                let gap = (a - b).abs();
                if gap > SCALE_REL_TOL * a.abs().max(b.abs()).max(1.0) {
                    report.scale_checks += 1;
                    let (sa, sb) = (scaled_rows[i].compactness, scaled_rows[j].compactness);
                    let preserved = if a > b { sa >= sb } else { sa <= sb };
                    if !preserved {
                        report.violations.push(format!(
                            "clustering {ci}: scaling reordered clusters {} and {}",
                            rows[i].label, rows[j].label
                        ));
                    }
                }
            }
        }

        // Locality: per-cluster values must not depend on the rest of the
        // clustering, and family sums must add exactly.
        let mut total = ExactSum::default();
        let mut halves = [ExactSum::default(), ExactSum::default()];
        for (i, row) in rows.iter().enumerate() {
            report.locality_checks += 1;
            let standalone =
                compactness_cluster(g, c.members(row.label).expect("label from this clustering"))?;
            if standalone.to_bits() != row.compactness.to_bits() {
                report.violations.push(format!(
                    "clustering {ci} cluster {}: standalone compactness {standalone} != in-context {}",
                    row.label, row.compactness
                ));
            }
            total.add(row.compactness);
            halves[i % 2].add(row.compactness);
        }
        report.locality_checks += 1;
        let mut diff = total.clone();
        for half in &halves {
            for &comp in &half.components {
                diff.add(-comp);
            }
        }
        if !diff.is_zero() {
            report.violations.push(format!(
                "clustering {ci}: family sums differ from total by {:e}",
                diff.approx()
            ));
        }

        // Monotonicity: bump one internal edge per cluster.
        for row in &rows {
            if row.internal_edges == 0 {
                continue;
            }
            let members = c.members(row.label).expect("label from this clustering");
            let inside: std::collections::HashSet<_> = members.iter().copied().collect();
            let edge = (0..g.m() as EdgeId)
                .find(|&e| {
                    let (u, v) = g.endpoints(e);
                    inside.contains(&u) && inside.contains(&v)
                })
                .expect("cluster with internal edges");
            for factor in [2.0, 3.0] {
                report.monotonicity_checks += 1;
                let bumped = bump_weight(g, edge, factor)?;
                let after = compactness_cluster(&bumped, members)?;
                if after < row.compactness {
                    report.violations.push(format!(
                        "clustering {ci} cluster {}: raising edge {edge} weight x{factor} \
                         dropped compactness {} -> {after}",
                        row.label, row.compactness
                    ));
                }
                let clustering_after = compactness_clustering(&bumped, c);
                if clustering_after < compactness_clustering(g, c) {
                    report.violations.push(format!(
                        "clustering {ci}: raising edge {edge} weight x{factor} dropped the \
                         clustering total"
                    ));
                }
            }
        }
    }

    Ok(report)
}

/// Rebuilds `g` with edge `e`'s weight multiplied by `factor`; edge ids are
/// preserved.
fn bump_weight(g: &Graph, e: EdgeId, factor: f64) -> Result<Graph> {
    let edges: Vec<(u32, u32, f64)> = (0..g.m() as EdgeId)
        .map(|i| {
            let (u, v) = g.endpoints(i);
            let w = if i == e { g.weight(i) * factor } else { g.weight(i) };
            (u, v, w)
        })
        .collect();
    Graph::from_weighted_edges(g.n(), &edges)
}
