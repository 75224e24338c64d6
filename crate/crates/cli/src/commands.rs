//! Subcommand bodies and their shared plumbing.

use std::fmt;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::Path;
use std::time::Instant;

use lexcluster::cnm::cnm_dendrogram;
use lexcluster::experiments::{
    envelope, max_quality_step, profile_rows, run_convergence, run_trials, write_convergence_csv,
    write_convergence_script, write_envelope_csv, write_profile_csv, write_profile_script,
    write_trace_csv, write_trace_script, TraceMeasure,
};
use lexcluster::graph::{
    load_edge_list, read_clustering_csv, write_clustering_csv, Clustering, Graph, NodeId,
};
use lexcluster::hierarchy::{build_dendrogram, write_dendrogram_csv, Dendrogram};
use lexcluster::lexdfs::accumulate_scores;
use lexcluster::quality::{
    compactness_clustering_with, conductance_clustering, coverage, evaluate_clustering, modularity,
    trace_dendrogram_quality, write_quality_csv, CompactnessConfig, QualityTrace,
};
use lexcluster::Error;

use crate::args::{Algo, Cli, Command, QualityArgs, RunArgs};
use crate::manifest::{BestStep, Manifest};

/// A command failure carrying its process exit code: 1 for usage
/// problems, 2 for unreadable or malformed data.
#[derive(Debug)]
pub enum CommandError {
    Usage(String),
    Data(String),
}

impl CommandError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CommandError::Usage(_) => 1,
            CommandError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandError::Usage(msg) | CommandError::Data(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> CommandError {
        CommandError::Data(e.to_string())
    }
}

impl From<io::Error> for CommandError {
    fn from(e: io::Error) -> CommandError {
        CommandError::Data(e.to_string())
    }
}

/// Dispatches a parsed invocation.
pub fn run(cli: &Cli) -> Result<(), CommandError> {
    match &cli.command {
        Command::Cluster(args) => with_manifest("cluster", args, |man| cmd_cluster(args, man)),
        Command::Quality(QualityArgs { run, clustering }) => {
            with_manifest("quality", run, |man| cmd_quality(run, clustering, man))
        }
        Command::Compare(args) => with_manifest("compare", args, |man| cmd_compare(args, man)),
        Command::Convergence(args) => {
            with_manifest("convergence", args, |man| cmd_convergence(args, man))
        }
    }
}

/// Runs `body` with a manifest that is written out no matter how the body
/// ends; failures land in the manifest's `status` field.
fn with_manifest(
    command: &str,
    args: &RunArgs,
    body: impl FnOnce(&mut Manifest) -> Result<(), CommandError>,
) -> Result<(), CommandError> {
    fs::create_dir_all(&args.out_dir).map_err(|e| {
        CommandError::Data(format!("cannot create {}: {e}", args.out_dir.display()))
    })?;
    let mut man = Manifest::new(command, args);
    let result = body(&mut man);
    if let Err(e) = &result {
        man.status = e.to_string();
    }
    let written = man.write(&args.out_dir);
    match (result, written) {
        (Err(e), _) => Err(e),
        (Ok(()), Err(e)) => Err(CommandError::Data(format!("cannot write manifest: {e}"))),
        (Ok(()), Ok(())) => Ok(()),
    }
}

fn cmd_cluster(args: &RunArgs, man: &mut Manifest) -> Result<(), CommandError> {
    man.algo = Some(args.algo.to_string());
    let g = load_graph(args, man)?;
    let d = build_hierarchy(args.algo, &g, args.runs, args.seed, man)?;

    let t = Instant::now();
    let trace = trace_dendrogram_quality(&g, &d, &args.compactness_config())?;
    man.timing("trace", t);

    let t = Instant::now();
    write_output(man, args, "dendrogram.csv", |out| write_dendrogram_csv(&g, &d, out))?;
    for (measure, name) in
        [(TraceMeasure::Modularity, "modularity"), (TraceMeasure::Compactness, "compactness")]
    {
        let (step, value) = max_quality_step(&trace.steps, measure);
        man.best.insert(name.to_string(), BestStep { step, value });
        let cut = d.clustering_at(step as usize, &g)?;
        write_output(man, args, &format!("clustering_best_{name}.csv"), |out| {
            write_clustering_csv(&cut, out)
        })?;
    }
    man.timing("write", t);
    Ok(())
}

fn cmd_quality(args: &RunArgs, clustering: &Path, man: &mut Manifest) -> Result<(), CommandError> {
    let g = load_graph(args, man)?;

    let t = Instant::now();
    let file = fs::File::open(clustering)
        .map_err(|e| CommandError::Data(format!("cannot open {}: {e}", clustering.display())))?;
    let c = read_clustering_csv(BufReader::new(file), g.n()).map_err(|e| match e {
        Error::MissingNodes { missing } => CommandError::Data(format!(
            "{}: unlabeled node(s) {}",
            clustering.display(),
            id_list(&missing)
        )),
        other => CommandError::Data(format!("{}: {other}", clustering.display())),
    })?;
    let cfg = args.compactness_config();
    let rows = evaluate_clustering(&g, &c, &cfg);
    man.timing("evaluate", t);

    let t = Instant::now();
    write_output(man, args, "cluster_quality.csv", |out| write_quality_csv(out, &rows))?;
    let global = global_row(&g, &c, &cfg)?;
    write_output(man, args, "global_quality.csv", |out| {
        out.write_all(global.as_bytes()).map_err(Error::from)
    })?;
    man.timing("write", t);
    Ok(())
}

fn cmd_compare(args: &RunArgs, man: &mut Manifest) -> Result<(), CommandError> {
    man.trials = Some(args.trials);
    let g = load_graph(args, man)?;
    let cfg = args.compactness_config();

    let t = Instant::now();
    let lex_traces = run_trials(&g, args.trials, args.runs, args.seed, &cfg)?;
    man.timing("lexdfs", t);

    let t = Instant::now();
    let cnm_trace = trace_dendrogram_quality(&g, &cnm_dendrogram(&g)?, &cfg)?;
    man.timing("cnm", t);

    let t = Instant::now();
    write_output(man, args, "trace.csv", |out| {
        write_trace_csv(out, &[("lexdfs", &lex_traces[0].steps), ("cnm", &cnm_trace.steps)])
    })?;
    let lex_env = envelope(&lex_traces);
    let cnm_env = envelope(std::slice::from_ref(&cnm_trace));
    write_output(man, args, "envelope.csv", |out| {
        write_envelope_csv(out, &[("lexdfs", &lex_env), ("cnm", &cnm_env)])
    })?;
    let (lex_rows, _) = profile_rows(&g, &lex_traces[0], true);
    let (cnm_rows, _) = profile_rows(&g, &cnm_trace, true);
    write_output(man, args, "profile.csv", |out| {
        write_profile_csv(out, &[("lexdfs", &lex_rows), ("cnm", &cnm_rows)])
    })?;
    let summary = summary_csv(&lex_traces, &cnm_trace, man);
    write_output(man, args, "summary.csv", |out| {
        out.write_all(summary.as_bytes()).map_err(Error::from)
    })?;
    write_trace_script(&args.out_dir, false)?;
    man.outputs.push("trace.gp".to_string());
    write_profile_script(&args.out_dir)?;
    man.outputs.push("profile.gp".to_string());
    man.timing("write", t);
    Ok(())
}

fn cmd_convergence(args: &RunArgs, man: &mut Manifest) -> Result<(), CommandError> {
    if args.runs < 2 {
        return Err(CommandError::Usage(format!(
            "convergence compares consecutive runs and needs --runs of at least 2, got {}",
            args.runs
        )));
    }
    let g = load_graph(args, man)?;
    let windows = args.resolve_windows(g.m());
    man.windows = Some(windows.clone());

    let t = Instant::now();
    let series = run_convergence(&g, args.runs, args.seed, &windows)?;
    man.timing("runs", t);

    let t = Instant::now();
    write_output(man, args, "convergence.csv", |out| write_convergence_csv(out, &series))?;
    write_convergence_script(&args.out_dir, &windows)?;
    man.outputs.push("convergence.gp".to_string());
    man.timing("write", t);
    Ok(())
}

fn load_graph(args: &RunArgs, man: &mut Manifest) -> Result<Graph, CommandError> {
    let t = Instant::now();
    let file = fs::File::open(&args.input)
        .map_err(|e| CommandError::Data(format!("cannot open {}: {e}", args.input.display())))?;
    let g = load_edge_list(BufReader::new(file))
        .map_err(|e| CommandError::Data(format!("{}: {e}", args.input.display())))?;
    man.timing("load", t);
    man.record_graph(&g);
    Ok(g)
}

fn build_hierarchy(
    algo: Algo,
    g: &Graph,
    runs: u32,
    seed: u64,
    man: &mut Manifest,
) -> Result<Dendrogram, CommandError> {
    let t = Instant::now();
    let d = match algo {
        Algo::Lexdfs => build_dendrogram(g, &accumulate_scores(g, runs, seed)?),
        Algo::Cnm => cnm_dendrogram(g)?,
    };
    man.timing("build", t);
    Ok(d)
}

/// Creates `name` in the output directory, runs the writer, and records
/// the artifact in the manifest.
fn write_output(
    man: &mut Manifest,
    args: &RunArgs,
    name: &str,
    body: impl FnOnce(&mut dyn Write) -> lexcluster::Result<()>,
) -> Result<(), CommandError> {
    let path = args.out_dir.join(name);
    let mut out = io::BufWriter::new(fs::File::create(&path)?);
    body(&mut out)?;
    out.flush()?;
    man.outputs.push(name.to_string());
    Ok(())
}

/// The first few ids of a list, with an ellipsis past ten.
fn id_list(ids: &[NodeId]) -> String {
    let shown: Vec<String> = ids.iter().take(10).map(NodeId::to_string).collect();
    let suffix =
        if ids.len() > 10 { format!(", … ({} total)", ids.len()) } else { String::new() };
    format!("{}{suffix}", shown.join(", "))
}

/// One header plus one row of whole-clustering measures. The clustering
/// conductance (minimum over clusters) is `nan` when some cluster has no
/// defined value, as for the whole-graph clustering.
fn global_row(g: &Graph, c: &Clustering, cfg: &CompactnessConfig) -> Result<String, CommandError> {
    let conductance = match conductance_clustering(g, c) {
        Ok(v) => v.to_string(),
        Err(Error::UndefinedConductance) => "nan".to_string(),
        Err(e) => return Err(e.into()),
    };
    Ok(format!(
        "nodes,edges,clusters,coverage,modularity,conductance,compactness\n\
         {},{},{},{},{},{conductance},{}\n",
        g.n(),
        g.m(),
        c.len(),
        coverage(g, c)?,
        modularity(g, c)?,
        compactness_clustering_with(g, c, cfg),
    ))
}

/// `algorithm,measure,trial,step,value` rows for the best modularity and
/// compactness each algorithm reached, mirrored into the manifest under
/// keys like `lexdfs_compactness`.
fn summary_csv(lex: &[QualityTrace], cnm: &QualityTrace, man: &mut Manifest) -> String {
    let mut text = String::from("algorithm,measure,trial,step,value\n");
    for (measure, name) in
        [(TraceMeasure::Modularity, "modularity"), (TraceMeasure::Compactness, "compactness")]
    {
        let (mut best_trial, mut best_step, mut best_value) = (0u32, 0u32, f64::NEG_INFINITY);
        for (trial, trace) in lex.iter().enumerate() {
            let (step, value) = max_quality_step(&trace.steps, measure);
            if value > best_value {
                (best_trial, best_step, best_value) = (trial as u32, step, value);
            }
        }
        text.push_str(&format!("lexdfs,{name},{best_trial},{best_step},{best_value}\n"));
        man.best.insert(format!("lexdfs_{name}"), BestStep { step: best_step, value: best_value });

        let (step, value) = max_quality_step(&cnm.steps, measure);
        text.push_str(&format!("cnm,{name},0,{step},{value}\n"));
        man.best.insert(format!("cnm_{name}"), BestStep { step, value });
    }
    text
}
