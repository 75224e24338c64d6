use crate::graph::NodeId;

/// Errors reported by graph loading, clustering, and quality evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An edge-list line that is neither a comment nor a valid integer pair.
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    /// The input contained no usable edges (empty file, or comments and
    /// self-loops only).
    #[error("input contains no edges")]
    EmptyInput,

    /// A structurally invalid graph was requested (out-of-range endpoint,
    /// self-loop, duplicate edge, non-positive weight).
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// Score accumulation was asked to average over zero traversal runs.
    #[error("run count must be at least 1")]
    ZeroRuns,

    /// A dendrogram cut was requested past the last merge step.
    #[error("step {step} out of range (dendrogram has {last} merges)")]
    StepOutOfRange { step: usize, last: usize },

    /// Conductance is undefined when the cluster volume or its complement
    /// volume is zero.
    #[error("conductance undefined: cluster or complement volume is zero")]
    UndefinedConductance,

    /// Modularity and coverage need at least one edge.
    #[error("graph has no edges")]
    EdgelessGraph,

    /// A quality measure was applied to an empty node set.
    #[error("cluster is empty")]
    EmptyCluster,

    /// A clustering file did not assign every node of the graph.
    #[error("clustering is missing {} node(s), first missing: {}", missing.len(), missing[0])]
    MissingNodes { missing: Vec<NodeId> },

    /// Convergence analysis needs at least two edge orderings to compare.
    #[error("need at least two orderings, got {0}")]
    TooFewOrderings(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
