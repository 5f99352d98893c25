use crate::error::{BenchError, Result};
use crate::harness::{
    build_stats, default_param, default_sweep, ladder, run_workload, tune, RunConfig, DEFAULT_REPS,
    DEFAULT_WARMUP,
};
use crate::input::{load_dataset, load_workload, write_dataset};
use crate::report::{write_aggregates, write_build_stats, write_per_query, write_tune, RowKey};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lsi_core::workload::io::{write_workload, WorkloadFile};
use lsi_core::workload::{generate, DEFAULT_MAX_ASPECT, DEFAULT_TOLERANCE};
use lsi_core::{
    generate_dataset, BoundingBox, DatasetKind, DatasetSpec, IndexConfig, IndexKind, QueryKind,
    SearchMode, WorkloadSpec,
};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "lsi-bench", version, about = "Spatial index benchmark harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset, or a query workload when --workload is given.
    Generate(GenerateArgs),
    /// Sweep the partition parameter and report the fastest value.
    Tune(TuneArgs),
    /// Run workloads with per-phase timing.
    Run(RunArgs),
    /// Report build time and index size.
    BuildStats(BuildArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DataKind {
    Uniform,
    Clustered,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WorkloadKindArg {
    Skewed,
    Uniform,
}

impl From<WorkloadKindArg> for QueryKind {
    fn from(k: WorkloadKindArg) -> Self {
        match k {
            WorkloadKindArg::Skewed => QueryKind::Skewed,
            WorkloadKindArg::Uniform => QueryKind::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IndexArg {
    Fixed,
    Adaptive,
    Kdtree,
    Quadtree,
    Str,
}

impl From<IndexArg> for IndexKind {
    fn from(k: IndexArg) -> Self {
        match k {
            IndexArg::Fixed => IndexKind::FixedGrid,
            IndexArg::Adaptive => IndexKind::AdaptiveGrid,
            IndexArg::Kdtree => IndexKind::KdTree,
            IndexArg::Quadtree => IndexKind::Quadtree,
            IndexArg::Str => IndexKind::Str,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Learned,
    Binary,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Learned => SearchMode::Learned,
            ModeArg::Binary => SearchMode::Binary,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Dataset distribution.
    #[arg(
        long,
        value_enum,
        default_value = "clustered",
        conflicts_with = "workload"
    )]
    pub kind: DataKind,
    /// Number of points.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Number of Gaussian clusters.
    #[arg(long, default_value_t = 24)]
    pub clusters: usize,
    /// Standard deviation of each cluster, in degrees.
    #[arg(long, default_value_t = 0.01)]
    pub spread: f64,
    /// Generate a workload of this kind instead of a dataset.
    #[arg(long, value_enum)]
    pub workload: Option<WorkloadKindArg>,
    /// Dataset the workload is drawn against (file or `clustered:<n>:<seed>`).
    #[arg(long, default_value = "clustered:100000:1")]
    pub dataset: String,
    #[arg(long, default_value_t = 1e-5)]
    pub selectivity: f64,
    /// Number of queries.
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// Relative tolerance on each query's count.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Largest query aspect ratio; ratios are drawn log-uniformly in [1/a, a].
    #[arg(long, default_value_t = DEFAULT_MAX_ASPECT)]
    pub max_aspect: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file; `.bin` selects the binary dataset format.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Timing {
    /// Measured passes over the workload.
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: usize,
    /// Unmeasured passes before measuring.
    #[arg(long, default_value_t = DEFAULT_WARMUP)]
    pub warmup: usize,
}

impl Timing {
    fn config(&self) -> RunConfig {
        RunConfig {
            warmup: self.warmup,
            reps: self.reps,
        }
    }
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    /// Dataset file or generator spec.
    #[arg(long)]
    pub dataset: String,
    /// Workload file or `<skewed|uniform>:<selectivity>:<count>:<seed>`.
    #[arg(long)]
    pub workload: String,
    #[arg(long, value_enum)]
    pub index: IndexArg,
    #[arg(long, value_enum, default_value = "learned")]
    pub mode: ModeArg,
    /// Parameter bounds `lo:hi`; powers of two in between are tried.
    #[arg(long)]
    pub sweep: Option<String>,
    #[command(flatten)]
    pub timing: Timing,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub dataset: String,
    /// Repeatable.
    #[arg(long, required = true)]
    pub workload: Vec<String>,
    /// Repeatable; all kinds when omitted.
    #[arg(long, value_enum)]
    pub index: Vec<IndexArg>,
    /// Repeatable; both modes when omitted.
    #[arg(long, value_enum)]
    pub mode: Vec<ModeArg>,
    /// One value for every index, or one per --index in order.
    #[arg(long)]
    pub param: Vec<usize>,
    #[command(flatten)]
    pub timing: Timing,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write one row per query (last repetition) to this file.
    #[arg(long)]
    pub per_query: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub dataset: String,
    #[arg(long, value_enum)]
    pub index: Vec<IndexArg>,
    #[arg(long)]
    pub param: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn indexes(args: &[IndexArg]) -> Vec<IndexKind> {
    if args.is_empty() {
        IndexKind::ALL.to_vec()
    } else {
        args.iter().map(|&a| a.into()).collect()
    }
}

fn params(kinds: &[IndexKind], given: &[usize]) -> Result<Vec<usize>> {
    match given.len() {
        0 => Ok(kinds.iter().map(|&k| default_param(k)).collect()),
        1 => Ok(vec![given[0]; kinds.len()]),
        n if n == kinds.len() => Ok(given.to_vec()),
        n => Err(BenchError::Usage(format!(
            "{n} --param values for {} indexes",
            kinds.len()
        ))),
    }
}

fn parse_sweep(s: &str) -> Result<(usize, usize)> {
    let bad = || BenchError::Usage(format!("--sweep expects lo:hi, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        lo.parse().map_err(|_| bad())?,
        hi.parse().map_err(|_| bad())?,
    ))
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Tune(a) => cmd_tune(&a),
        Command::Run(a) => cmd_run(&a),
        Command::BuildStats(a) => cmd_build_stats(&a),
    }
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    match a.workload {
        Some(kind) => {
            let data = load_dataset(&a.dataset)?;
            let spec = WorkloadSpec {
                tolerance: a.tolerance,
                max_aspect: a.max_aspect,
                ..WorkloadSpec::new(kind.into(), a.selectivity, a.count, a.seed)
            };
            let w = generate(&data, &spec)?;
            if w.warnings() > 0 {
                eprintln!(
                    "warning: {} of {} queries outside the tolerance band",
                    w.warnings(),
                    w.queries.len()
                );
            }
            write_workload(&a.out, &WorkloadFile::from(&w))?;
        }
        None => {
            let kind = match a.kind {
                DataKind::Uniform => DatasetKind::UniformBox,
                DataKind::Clustered => DatasetKind::GaussianClusters {
                    clusters: a.clusters,
                    spread: a.spread,
                },
            };
            let domain: BoundingBox = DatasetSpec::CITY_DOMAIN;
            let pts = generate_dataset(&DatasetSpec {
                kind,
                n: a.n,
                domain,
                seed: a.seed,
            })?;
            write_dataset(&a.out, &pts)?;
        }
    }
    Ok(())
}

pub fn cmd_tune(a: &TuneArgs) -> Result<()> {
    let data = load_dataset(&a.dataset)?;
    let wl = load_workload(&a.workload, &data)?;
    let kind: IndexKind = a.index.into();
    let (lo, hi) = match &a.sweep {
        Some(s) => parse_sweep(s)?,
        None => default_sweep(kind),
    };
    let ladder = ladder(lo, hi)?;
    let t = tune(
        &data,
        &wl.queries,
        kind,
        a.mode.into(),
        &ladder,
        &a.timing.config(),
        &IndexConfig::default(),
    )?;
    let mut out = output(a.out.as_deref())?;
    write_tune(&mut out, &t, wl.selectivity, wl.kind)?;
    out.flush()?;
    eprintln!("argmin {}={}", kind, t.best_param());
    Ok(())
}

pub fn cmd_run(a: &RunArgs) -> Result<()> {
    let data = load_dataset(&a.dataset)?;
    let kinds = indexes(&a.index);
    let params = params(&kinds, &a.param)?;
    let modes: Vec<SearchMode> = if a.mode.is_empty() {
        SearchMode::ALL.to_vec()
    } else {
        a.mode.iter().map(|&m| m.into()).collect()
    };
    let cfg = a.timing.config();
    cfg.validate()?;
    let workloads = a
        .workload
        .iter()
        .map(|w| load_workload(w, &data))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut per_query = Vec::new();
    let mut mismatch = None;
    for (&kind, &param) in kinds.iter().zip(&params) {
        let index = lsi_core::build_index(kind, &data, param, &IndexConfig::default())?;
        for (wi, wl) in workloads.iter().enumerate() {
            for &mode in &modes {
                let r = run_workload(&index, &wl.queries, mode, &cfg)?;
                let key = RowKey {
                    index: kind,
                    mode,
                    param,
                    selectivity: wl.selectivity,
                    kind: wl.kind,
                };
                rows.push((wi, key, r.aggregate));
                if a.per_query.is_some() {
                    per_query.push((key, r.last_rep));
                }
            }
        }
    }
    for (wi, key, agg) in &rows {
        let reference = rows.iter().find(|(w, _, _)| w == wi).expect("non-empty");
        if agg.checksum != reference.2.checksum && mismatch.is_none() {
            mismatch = Some(format!(
                "workload `{}`: {} {} gives {:016x}, {} {} gives {:016x}",
                a.workload[*wi],
                key.index,
                key.mode,
                agg.checksum,
                reference.1.index,
                reference.1.mode,
                reference.2.checksum
            ));
        }
    }

    let flat: Vec<_> = rows.into_iter().map(|(_, k, a)| (k, a)).collect();
    let mut out = output(a.out.as_deref())?;
    write_aggregates(&mut out, &flat)?;
    out.flush()?;
    if let Some(p) = &a.per_query {
        write_per_query(BufWriter::new(File::create(p)?), &per_query)?;
    }
    match mismatch {
        Some(m) => Err(BenchError::Checksum(m)),
        None => Ok(()),
    }
}

pub fn cmd_build_stats(a: &BuildArgs) -> Result<()> {
    let data = load_dataset(&a.dataset)?;
    let kinds = indexes(&a.index);
    let params = params(&kinds, &a.param)?;
    let rows = kinds
        .iter()
        .zip(&params)
        .map(|(&k, &p)| build_stats(&data, k, p, a.reps, &IndexConfig::default()))
        .collect::<Result<Vec<_>>>()?;
    let mut out = output(a.out.as_deref())?;
    write_build_stats(&mut out, &rows)?;
    out.flush()?;
    Ok(())
}
