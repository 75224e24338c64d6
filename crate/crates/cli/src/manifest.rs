//! The JSON manifest written next to every run's outputs.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use lexcluster::graph::Graph;

use crate::args::RunArgs;

/// Datasets the CLI can sanity-check after loading, by file stem.
const KNOWN_DATASETS: &[(&str, usize, usize)] = &[("facebook_combined", 4039, 88234)];

/// Reproducibility record for one invocation: configuration, input
/// identity, artifacts written, phase timings, and outcome. Saved as
/// `manifest.json` even when the run fails partway, with the failure in
/// `status`. Every field except `timings_ms` is deterministic for a fixed
/// (input, seed, configuration).
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub input: PathBuf,
    /// Hex SHA-256 of the raw input bytes; absent when the file could not
    /// be read.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algo: Option<String>,
    pub runs: u32,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u32>,
    /// Resolved window widths (a `1%` spec becomes a rank count).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub windows: Option<Vec<u32>>,
    pub path_length: String,
    pub normalize: bool,
    /// File names written into the output directory, in write order.
    pub outputs: Vec<String>,
    /// Best dendrogram step per measure, where the command computes one.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub best: BTreeMap<String, BestStep>,
    /// Wall-clock milliseconds per phase — the one nondeterministic field.
    pub timings_ms: BTreeMap<String, f64>,
    /// `"ok"`, or the error that stopped the run.
    pub status: String,
}

/// A dendrogram step and the quality value reached there.
#[derive(Debug, Serialize)]
pub struct BestStep {
    pub step: u32,
    pub value: f64,
}

impl Manifest {
    pub fn new(command: &str, args: &RunArgs) -> Manifest {
        Manifest {
            command: command.to_string(),
            input: args.input.clone(),
            input_sha256: sha256_hex(&args.input).ok(),
            nodes: None,
            edges: None,
            algo: None,
            runs: args.runs,
            seed: args.seed,
            trials: None,
            windows: None,
            path_length: if args.mean_eccentricity { "mean-eccentricity" } else { "diameter" }
                .to_string(),
            normalize: args.normalize,
            outputs: Vec::new(),
            best: BTreeMap::new(),
            timings_ms: BTreeMap::new(),
            status: "ok".to_string(),
        }
    }

    /// Records the loaded graph's size, warning when a known dataset
    /// arrives with unexpected counts (usually a truncated download).
    pub fn record_graph(&mut self, g: &Graph) {
        self.nodes = Some(g.n());
        self.edges = Some(g.m());
        let stem = self.input.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        if let Some(&(name, n, m)) = KNOWN_DATASETS.iter().find(|&&(d, ..)| d == stem) {
            if (g.n(), g.m()) != (n, m) {
                eprintln!(
                    "warning: {name} is expected to have {n} nodes and {m} edges, \
                     this copy has {} and {}",
                    g.n(),
                    g.m()
                );
            }
        }
    }

    /// Stores the time elapsed since `start` under `phase`.
    pub fn timing(&mut self, phase: &str, start: Instant) {
        self.timings_ms.insert(phase.to_string(), start.elapsed().as_secs_f64() * 1e3);
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(dir.join("manifest.json"), text)
    }
}

/// Hex SHA-256 of a file's bytes.
pub fn sha256_hex(path: &Path) -> io::Result<String> {
    let mut file = std::fs::File::open(path)?;
    let mut hasher = Sha256::new();
    io::copy(&mut file, &mut hasher)?;
    Ok(format!("{:x}", hasher.finalize()))
}
