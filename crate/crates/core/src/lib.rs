//! Graph clustering from lexicographic depth-first traversal.
//!
//! Repeated randomized traversals assign each edge a score measuring how
//! close together its endpoints tend to be visited; ranking edges by mean
//! score drives a bottom-up cluster hierarchy. The crate also provides the
//! quality measures used to judge the resulting cuts (conductance,
//! modularity, coverage, and a diameter-based compactness measure), a
//! greedy modularity baseline to compare against, and experiment drivers
//! for convergence and repeated-trial studies.
//!
//! ```
//! use lexcluster::graph::Graph;
//! use lexcluster::lexdfs::accumulate_scores;
//! use lexcluster::hierarchy::build_dendrogram;
//! use lexcluster::quality::modularity;
//!
//! // Two triangles joined by a bridge.
//! let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
//!     .unwrap();
//! let scores = accumulate_scores(&g, 20, 42).unwrap();
//! let dendrogram = build_dendrogram(&g, &scores);
//! let cut = dendrogram.clustering_at(4, &g).unwrap();
//! let q = modularity(&g, &cut).unwrap();
//! assert!((q - 5.0 / 14.0).abs() < 1e-15);
//! ```

pub mod cnm;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod hierarchy;
pub mod lexdfs;
pub mod quality;

pub use error::{Error, Result};
