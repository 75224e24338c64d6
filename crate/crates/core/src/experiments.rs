//! Experiment drivers and exports: ordering convergence, per-cluster
//! profiles, repeated-trial quality envelopes, and the CSV / gnuplot
//! artifacts derived from them.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hierarchy::build_dendrogram;
use crate::lexdfs::ScoreAccumulator;
use crate::quality::{
    trace_dendrogram_quality, CompactnessConfig, QualityTrace, StepQuality,
};

/// How many edges moved more than `window` rank positions between
/// consecutive mean-score orderings. `shifts[i]` compares the orderings
/// after runs `i + 1` and `i + 2`.
#[derive(Debug, Clone)]
pub struct ConvergenceSeries {
    pub window: u32,
    pub shifts: Vec<u64>,
}

impl ConvergenceSeries {
    /// First run index (1-based, counting comparisons) whose shift count is
    /// at or below `threshold`.
    pub fn first_run_at_or_below(&self, threshold: u64) -> Option<u32> {
        self.shifts.iter().position(|&c| c <= threshold).map(|i| i as u32 + 1)
    }
}

/// The "1%" window: half a percent of the edge count on each side, i.e.
/// `round(0.005 · m)`, so the full window spans about one percent of all
/// rank positions.
pub fn one_percent_window(m: usize) -> u32 {
    (0.005 * m as f64).round() as u32
}

/// Counts rank displacements exceeding each window between consecutive
/// snapshots. `snapshots[i][e]` is edge `e`'s rank after `i + 1` runs.
/// Errors when fewer than two snapshots are given.
pub fn convergence_series(snapshots: &[Vec<u32>], windows: &[u32]) -> Result<Vec<ConvergenceSeries>> {
    if snapshots.len() < 2 {
        return Err(Error::TooFewOrderings(snapshots.len()));
    }
    let mut series: Vec<ConvergenceSeries> = windows
        .iter()
        .map(|&w| ConvergenceSeries { window: w, shifts: Vec::with_capacity(snapshots.len() - 1) })
        .collect();
    for pair in snapshots.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        debug_assert_eq!(prev.len(), cur.len());
        for s in &mut series {
            let count =
                prev.iter().zip(cur).filter(|&(&a, &b)| a.abs_diff(b) > s.window).count() as u64;
            s.shifts.push(count);
        }
    }
    Ok(series)
}

/// Streams `runs` traversal runs and tracks ordering shifts per window
/// without retaining every snapshot (memory stays O(m)).
pub fn run_convergence(
    g: &Graph,
    runs: u32,
    seed: u64,
    windows: &[u32],
) -> Result<Vec<ConvergenceSeries>> {
    if runs < 2 {
        return Err(Error::TooFewOrderings(runs as usize));
    }
    let mut acc = ScoreAccumulator::new(g, seed);
    acc.run_once();
    let mut prev = acc.edge_ranks();
    let mut series: Vec<ConvergenceSeries> = windows
        .iter()
        .map(|&w| ConvergenceSeries { window: w, shifts: Vec::with_capacity(runs as usize - 1) })
        .collect();
    for _ in 1..runs {
        acc.run_once();
        let cur = acc.edge_ranks();
        for s in &mut series {
            let count =
                prev.iter().zip(&cur).filter(|&(&a, &b)| a.abs_diff(b) > s.window).count() as u64;
            s.shifts.push(count);
        }
        prev = cur;
    }
    Ok(series)
}

/// One scatter point of the cluster profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub size: u32,
    /// `None` where conductance is undefined (zero cluster or complement
    /// volume).
    pub conductance: Option<f64>,
    pub compactness: f64,
}

/// Which per-cluster measure a profile plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterMeasure {
    Conductance,
    Compactness,
}

/// Every cluster arising along a dendrogram — the singleton start plus each
/// merged cluster — as profile rows sorted by (size, compactness,
/// conductance). With `dedup`, identical rows collapse to one. Also
/// returns how many rows have undefined conductance.
pub fn profile_rows(g: &Graph, trace: &QualityTrace, dedup: bool) -> (Vec<ProfileRow>, usize) {
    let m2 = 2 * g.m() as u64;
    let mut rows: Vec<ProfileRow> = Vec::with_capacity(g.n() + trace.merged.len());
    for v in 0..g.n() as u32 {
        let deg = g.degree(v) as u64;
        let denom = deg.min(m2 - deg);
        rows.push(ProfileRow {
            size: 1,
            conductance: if denom == 0 { None } else { Some(deg as f64 / denom as f64) },
            compactness: 0.0,
        });
    }
    for q in &trace.merged {
        rows.push(ProfileRow { size: q.size, conductance: q.conductance, compactness: q.compactness });
    }
    rows.sort_by(|a, b| {
        a.size
            .cmp(&b.size)
            .then(a.compactness.total_cmp(&b.compactness))
            .then_with(|| match (a.conductance, b.conductance) {
                (None, None) => std::cmp::Ordering::Equal,
                (None, Some(_)) => std::cmp::Ordering::Less,
                (Some(_), None) => std::cmp::Ordering::Greater,
                (Some(x), Some(y)) => x.total_cmp(&y),
            })
    });
    if dedup {
        rows.dedup_by(|a, b| {
            a.size == b.size
                && a.compactness.to_bits() == b.compactness.to_bits()
                && a.conductance.map(f64::to_bits) == b.conductance.map(f64::to_bits)
        });
    }
    let skipped = rows.iter().filter(|r| r.conductance.is_none()).count();
    (rows, skipped)
}

/// Profile points `(size, value)` for one measure, deduplicated and sorted.
/// Rows with undefined conductance are omitted from the conductance
/// profile.
pub fn cluster_profile(g: &Graph, trace: &QualityTrace, measure: ClusterMeasure) -> Vec<(u32, f64)> {
    let (rows, _) = profile_rows(g, trace, false);
    let mut points: Vec<(u32, f64)> = rows
        .iter()
        .filter_map(|r| match measure {
            ClusterMeasure::Conductance => r.conductance.map(|c| (r.size, c)),
            ClusterMeasure::Compactness => Some((r.size, r.compactness)),
        })
        .collect();
    points.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    points.dedup_by(|a, b| a.0 == b.0 && a.1.to_bits() == b.1.to_bits());
    points
}

/// A whole-trace measure to maximize over steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMeasure {
    Modularity,
    Compactness,
}

/// The step with the highest value of `measure` (earliest step on ties)
/// and that value.
pub fn max_quality_step(steps: &[StepQuality], measure: TraceMeasure) -> (u32, f64) {
    assert!(!steps.is_empty(), "trace has at least the singleton step");
    let value = |s: &StepQuality| match measure {
        TraceMeasure::Modularity => s.modularity,
        TraceMeasure::Compactness => s.compactness,
    };
    let mut best = &steps[0];
    for s in &steps[1..] {
        if value(s) > value(best) {
            best = s;
        }
    }
    (best.step, value(best))
}

/// Per-trial seeds derived from one master seed (splitmix-style mixing),
/// so trials are independent but the whole batch reproduces.
fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs the full pipeline (score accumulation, hierarchy, quality trace)
/// once per trial, in parallel. Trial `t` uses the derived seed
/// `trial_seed(seed, t)`.
pub fn run_trials(
    g: &Graph,
    trials: u32,
    runs: u32,
    seed: u64,
    cfg: &CompactnessConfig,
) -> Result<Vec<QualityTrace>> {
    if trials == 0 {
        return Err(Error::ZeroRuns);
    }
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let scores = crate::lexdfs::accumulate_scores(g, runs, trial_seed(seed, t as u64))?;
            let d = build_dendrogram(g, &scores);
            trace_dendrogram_quality(g, &d, cfg)
        })
        .collect()
}

/// Min / mean / max of a quality across trials at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat3 {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Stat3 {
    fn over(values: impl Iterator<Item = f64>) -> Stat3 {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let mut count = 0u32;
        for v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            count += 1;
        }
        Stat3 { min, mean: sum / count as f64, max }
    }
}

/// The envelope of several traces at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeStep {
    pub step: u32,
    pub modularity: Stat3,
    pub compactness: Stat3,
}

/// Folds per-trial traces into per-step min/mean/max envelopes. All traces
/// must come from the same graph (equal step counts).
pub fn envelope(traces: &[QualityTrace]) -> Vec<EnvelopeStep> {
    assert!(!traces.is_empty());
    let len = traces[0].steps.len();
    assert!(
        traces.iter().all(|t| t.steps.len() == len),
        "traces must cover the same merge sequence length"
    );
    (0..len)
        .map(|i| EnvelopeStep {
            step: traces[0].steps[i].step,
            modularity: Stat3::over(traces.iter().map(move |t| t.steps[i].modularity)),
            compactness: Stat3::over(traces.iter().map(move |t| t.steps[i].compactness)),
        })
        .collect()
}

/// Convenience wrapper: run `trials` pipelines and return the per-step
/// envelope.
pub fn repeated_trial_envelope(
    g: &Graph,
    trials: u32,
    runs: u32,
    seed: u64,
    cfg: &CompactnessConfig,
) -> Result<Vec<EnvelopeStep>> {
    Ok(envelope(&run_trials(g, trials, runs, seed, cfg)?))
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "nan".to_string(),
    }
}

/// `algorithm,size,conductance,compactness` rows; undefined conductance is
/// written as `nan`.
pub fn write_profile_csv<W: Write>(mut out: W, sections: &[(&str, &[ProfileRow])]) -> Result<()> {
    writeln!(out, "algorithm,size,conductance,compactness")?;
    for (algo, rows) in sections {
        for r in *rows {
            writeln!(out, "{algo},{},{},{}", r.size, fmt_opt(r.conductance), r.compactness)?;
        }
    }
    Ok(())
}

/// `algorithm,step,modularity,compactness` rows.
pub fn write_trace_csv<W: Write>(mut out: W, sections: &[(&str, &[StepQuality])]) -> Result<()> {
    writeln!(out, "algorithm,step,modularity,compactness")?;
    for (algo, steps) in sections {
        for s in *steps {
            writeln!(out, "{algo},{},{},{}", s.step, s.modularity, s.compactness)?;
        }
    }
    Ok(())
}

/// Envelope variant of the trace export, with min/mean/max per quality.
pub fn write_envelope_csv<W: Write>(mut out: W, sections: &[(&str, &[EnvelopeStep])]) -> Result<()> {
    writeln!(
        out,
        "algorithm,step,modularity_min,modularity_mean,modularity_max,\
         compactness_min,compactness_mean,compactness_max"
    )?;
    for (algo, steps) in sections {
        for s in *steps {
            writeln!(
                out,
                "{algo},{},{},{},{},{},{},{}",
                s.step,
                s.modularity.min,
                s.modularity.mean,
                s.modularity.max,
                s.compactness.min,
                s.compactness.mean,
                s.compactness.max
            )?;
        }
    }
    Ok(())
}

/// `run_index,w,c_i` rows; `run_index` is the 1-based comparison index.
pub fn write_convergence_csv<W: Write>(mut out: W, series: &[ConvergenceSeries]) -> Result<()> {
    writeln!(out, "run_index,w,c_i")?;
    for s in series {
        for (i, &c) in s.shifts.iter().enumerate() {
            writeln!(out, "{},{},{}", i + 1, s.window, c)?;
        }
    }
    Ok(())
}

/// Emits `profile.gp` plotting both profile scatters from `profile.csv`.
pub fn write_profile_script(dir: &Path) -> Result<()> {
    let body = r#"set datafile separator ','
set terminal pngcairo size 900,600
set logscale x
set xlabel 'cluster size'
set key top right
set logscale y
set ylabel 'conductance'
set output 'profile_conductance.png'
plot 'profile.csv' every ::1 using 2:(strcol(1) eq 'lexdfs' ? $3 : NaN) with points pt 7 ps 0.4 title 'lexdfs', \
     ''            every ::1 using 2:(strcol(1) eq 'cnm'    ? $3 : NaN) with points pt 5 ps 0.4 title 'cnm'
set ylabel 'compactness'
set output 'profile_compactness.png'
plot 'profile.csv' every ::1 using 2:(strcol(1) eq 'lexdfs' ? $4 : NaN) with points pt 7 ps 0.4 title 'lexdfs', \
     ''            every ::1 using 2:(strcol(1) eq 'cnm'    ? $4 : NaN) with points pt 5 ps 0.4 title 'cnm'
"#;
    std::fs::write(dir.join("profile.gp"), body)?;
    Ok(())
}

/// Emits `trace.gp` plotting per-step qualities from `trace.csv`; when
/// `enveloped`, the mean is drawn with a min–max band.
pub fn write_trace_script(dir: &Path, enveloped: bool) -> Result<()> {
    let body = if enveloped {
        r#"set datafile separator ','
set terminal pngcairo size 900,600
set xlabel 'merge step'
set key top left
set ylabel 'modularity'
set output 'trace_modularity.png'
plot 'trace.csv' every ::1 using 2:(strcol(1) eq 'lexdfs' ? $3 : NaN):(strcol(1) eq 'lexdfs' ? $5 : NaN) with filledcurves fc 'light-blue' fs transparent solid 0.4 title 'lexdfs min-max', \
     ''          every ::1 using 2:(strcol(1) eq 'lexdfs' ? $4 : NaN) with lines lc 'blue' title 'lexdfs mean', \
     ''          every ::1 using 2:(strcol(1) eq 'cnm'    ? $4 : NaN) with lines lc 'red' title 'cnm'
set ylabel 'compactness'
set output 'trace_compactness.png'
plot 'trace.csv' every ::1 using 2:(strcol(1) eq 'lexdfs' ? $6 : NaN):(strcol(1) eq 'lexdfs' ? $8 : NaN) with filledcurves fc 'light-blue' fs transparent solid 0.4 title 'lexdfs min-max', \
     ''          every ::1 using 2:(strcol(1) eq 'lexdfs' ? $7 : NaN) with lines lc 'blue' title 'lexdfs mean', \
     ''          every ::1 using 2:(strcol(1) eq 'cnm'    ? $7 : NaN) with lines lc 'red' title 'cnm'
"#
    } else {
        r#"set datafile separator ','
set terminal pngcairo size 900,600
set xlabel 'merge step'
set key top left
set ylabel 'modularity'
set output 'trace_modularity.png'
plot 'trace.csv' every ::1 using 2:(strcol(1) eq 'lexdfs' ? $3 : NaN) with lines title 'lexdfs', \
     ''          every ::1 using 2:(strcol(1) eq 'cnm'    ? $3 : NaN) with lines title 'cnm'
set ylabel 'compactness'
set output 'trace_compactness.png'
plot 'trace.csv' every ::1 using 2:(strcol(1) eq 'lexdfs' ? $4 : NaN) with lines title 'lexdfs', \
     ''          every ::1 using 2:(strcol(1) eq 'cnm'    ? $4 : NaN) with lines title 'cnm'
"#
    };
    std::fs::write(dir.join("trace.gp"), body)?;
    Ok(())
}

/// Emits `convergence.gp` with one curve per window from `convergence.csv`.
pub fn write_convergence_script(dir: &Path, windows: &[u32]) -> Result<()> {
    let mut body = String::from(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set xlabel 'run'\n\
         set ylabel 'edges outside window'\n\
         set logscale y\n\
         set output 'convergence.png'\n\
         plot ",
    );
    for (i, w) in windows.iter().enumerate() {
        if i > 0 {
            body.push_str(", \\\n     ");
        }
        body.push_str(&format!(
            "'convergence.csv' every ::1 using 1:(int(column(2)) == {w} ? $3 : NaN) \
             with lines title 'w={w}'"
        ));
    }
    body.push('\n');
    std::fs::write(dir.join("convergence.gp"), body)?;
    Ok(())
}
