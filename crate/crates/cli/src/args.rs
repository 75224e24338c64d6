//! Flag and subcommand definitions.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use lexcluster::experiments::one_percent_window;
use lexcluster::quality::{CompactnessConfig, PathLength};

/// Graph clustering from repeated lexicographic depth-first traversals,
/// with a greedy modularity baseline and experiments comparing the two.
#[derive(Debug, Parser)]
#[command(name = "lexcluster", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a merge hierarchy and export its best cuts.
    Cluster(RunArgs),
    /// Evaluate a clustering file against a graph.
    Quality(QualityArgs),
    /// Run both algorithms and export comparison artifacts.
    Compare(RunArgs),
    /// Measure how the edge-score ordering settles over traversal runs.
    Convergence(RunArgs),
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Whitespace-separated edge list; `#` starts a comment line.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Algorithm for the `cluster` command (`compare` always runs both).
    #[arg(long, value_enum, default_value_t = Algo::Lexdfs)]
    pub algo: Algo,

    /// Traversal runs averaged into the edge scores.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub runs: u32,

    /// Master seed; a fixed seed reproduces every CSV byte for byte.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Independent pipeline repetitions aggregated by `compare`.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub trials: u32,

    /// Convergence window: a rank distance, or `1%` for a window sized to
    /// the edge count. May repeat; defaults to 0, 20, and 1%.
    #[arg(long = "window", value_name = "W")]
    pub windows: Vec<WindowSpec>,

    /// Divide internal weight by the mean member eccentricity instead of
    /// the induced diameter.
    #[arg(long)]
    pub mean_eccentricity: bool,

    /// Divide clustering compactness by the graph's edge count.
    #[arg(long)]
    pub normalize: bool,

    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out_dir: PathBuf,
}

impl RunArgs {
    pub fn compactness_config(&self) -> CompactnessConfig {
        CompactnessConfig {
            path_length: if self.mean_eccentricity {
                PathLength::MeanEccentricity
            } else {
                PathLength::Diameter
            },
            normalize: self.normalize,
            ..Default::default()
        }
    }

    /// Window widths in flag order with duplicates dropped (on small
    /// graphs the default `1%` collapses into the 0 window).
    pub fn resolve_windows(&self, m: usize) -> Vec<u32> {
        let specs: &[WindowSpec] =
            if self.windows.is_empty() { &DEFAULT_WINDOWS } else { &self.windows };
        let mut out = Vec::new();
        for spec in specs {
            let w = spec.resolve(m);
            if !out.contains(&w) {
                out.push(w);
            }
        }
        out
    }
}

const DEFAULT_WINDOWS: [WindowSpec; 3] =
    [WindowSpec::Ranks(0), WindowSpec::Ranks(20), WindowSpec::OnePercent];

#[derive(Debug, Args)]
pub struct QualityArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// `node_id,cluster_label` CSV assigning every node of the graph.
    #[arg(long, value_name = "FILE")]
    pub clustering: PathBuf,
}

/// Which hierarchy builder the `cluster` command drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algo {
    /// Edge scores from repeated lexicographic DFS.
    Lexdfs,
    /// Greedy modularity merging.
    Cnm,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Lexdfs => "lexdfs",
            Algo::Cnm => "cnm",
        })
    }
}

/// One `--window` value, resolved against the edge count after loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowSpec {
    Ranks(u32),
    /// `round(0.005 · m)` ranks on each side, so the full window spans
    /// about one percent of all rank positions.
    OnePercent,
}

impl WindowSpec {
    pub fn resolve(self, m: usize) -> u32 {
        match self {
            WindowSpec::Ranks(w) => w,
            WindowSpec::OnePercent => one_percent_window(m),
        }
    }
}

impl FromStr for WindowSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<WindowSpec, String> {
        if s == "1%" {
            return Ok(WindowSpec::OnePercent);
        }
        s.parse()
            .map(WindowSpec::Ranks)
            .map_err(|_| format!("expected a rank count or `1%`, got {s:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn arg_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn window_specs_parse() {
        assert_eq!("0".parse(), Ok(WindowSpec::Ranks(0)));
        assert_eq!("20".parse(), Ok(WindowSpec::Ranks(20)));
        assert_eq!("1%".parse(), Ok(WindowSpec::OnePercent));
        assert!("2%".parse::<WindowSpec>().is_err());
        assert!("-1".parse::<WindowSpec>().is_err());
        assert!("".parse::<WindowSpec>().is_err());
    }

    #[test]
    fn defaults_match_the_experiment_setup() {
        let cli = Cli::try_parse_from(["lexcluster", "cluster", "--input", "g.txt"]).unwrap();
        let Command::Cluster(args) = cli.command else { panic!("expected cluster") };
        assert_eq!(args.algo, Algo::Lexdfs);
        assert_eq!(args.runs, 20);
        assert_eq!(args.seed, 42);
        assert_eq!(args.trials, 20);
        assert!(args.windows.is_empty());
        assert_eq!(args.resolve_windows(88234), vec![0, 20, 441]);
        // On a 7-edge graph the default 1% window resolves to 0 and is
        // dropped as a duplicate.
        assert_eq!(args.resolve_windows(7), vec![0, 20]);
    }

    #[test]
    fn explicit_windows_keep_flag_order() {
        let cli = Cli::try_parse_from([
            "lexcluster",
            "convergence",
            "--input",
            "g.txt",
            "--window",
            "1%",
            "--window",
            "5",
            "--window",
            "5",
        ])
        .unwrap();
        let Command::Convergence(args) = cli.command else { panic!("expected convergence") };
        assert_eq!(args.resolve_windows(1000), vec![5]);
        assert_eq!(args.resolve_windows(88234), vec![441, 5]);
    }

    #[test]
    fn zero_runs_and_trials_are_usage_errors() {
        for argv in [
            ["lexcluster", "cluster", "--input", "g.txt", "--runs", "0"],
            ["lexcluster", "compare", "--input", "g.txt", "--trials", "0"],
        ] {
            assert!(Cli::try_parse_from(argv).is_err());
        }
    }
}
