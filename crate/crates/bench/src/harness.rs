//! Measurement loop, aggregation, tuning sweeps and build statistics.

use crate::error::{BenchError, Result};
use lsi_core::{
    build_index, AnyIndex, IndexConfig, IndexKind, Point, QueryExecutor, RangeQuery, SearchMode,
    SpatialIndex,
};
use std::time::Instant;

pub const DEFAULT_WARMUP: usize = 1;
pub const DEFAULT_REPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    /// Full workload passes discarded before measuring.
    pub warmup: usize,
    /// Measured passes, at least 1.
    pub reps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            warmup: DEFAULT_WARMUP,
            reps: DEFAULT_REPS,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(BenchError::Usage("--reps must be at least 1".into()));
        }
        Ok(())
    }
}

/// One measured query execution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuerySample {
    pub total_ns: u64,
    pub index_ns: u64,
    pub refine_ns: u64,
    pub scan_ns: u64,
    pub partitions: usize,
    pub scanned: usize,
    pub result_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    /// Mean total time over every measured execution.
    pub mean_ns: f64,
    pub median_ns: f64,
    pub p99_ns: f64,
    pub index_ns: f64,
    pub refine_ns: f64,
    pub scan_ns: f64,
    pub partitions_mean: f64,
    pub scanned_mean: f64,
    pub checksum: u64,
    /// Mean total time of each repetition.
    pub rep_means: Vec<f64>,
}

impl Aggregate {
    /// Median over repetitions of the per-repetition mean.
    pub fn rep_median_ns(&self) -> f64 {
        median(&self.rep_means)
    }

    /// Share of the summed phase times spent scanning.
    pub fn scan_share(&self) -> f64 {
        let phases = self.index_ns + self.refine_ns + self.scan_ns;
        if phases > 0.0 {
            self.scan_ns / phases
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub aggregate: Aggregate,
    /// Samples of the last repetition, in workload order.
    pub last_rep: Vec<QuerySample>,
}

/// Order-sensitive 64-bit FNV-1a over per-query result counts.
pub fn checksum<I: IntoIterator<Item = usize>>(counts: I) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for c in counts {
        for b in (c as u64).to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

pub fn median(v: &[f64]) -> f64 {
    percentile(v, 0.5)
}

/// Linear-interpolated percentile, `p` in `[0, 1]`. NaN for empty input.
pub fn percentile(v: &[f64], p: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = p.clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < s.len() {
        s[i] + (s[i + 1] - s[i]) * frac
    } else {
        s[i]
    }
}

fn mean<I: Iterator<Item = f64>>(it: I) -> f64 {
    let (sum, n) = it.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Executes `queries` `warmup + reps` times and aggregates the measured passes.
///
/// Fails if a query returns different counts in different passes.
pub fn run_workload(
    index: &AnyIndex,
    queries: &[RangeQuery],
    mode: SearchMode,
    cfg: &RunConfig,
) -> Result<RunResult> {
    cfg.validate()?;
    let mut exec = QueryExecutor::new();
    let mut out: Vec<Point> = Vec::new();
    for _ in 0..cfg.warmup {
        for q in queries {
            out.clear();
            exec.run(index, q, mode, &mut out);
        }
    }

    let mut all: Vec<QuerySample> = Vec::with_capacity(queries.len() * cfg.reps);
    let mut rep_means = Vec::with_capacity(cfg.reps);
    let mut first_counts: Option<Vec<usize>> = None;
    let mut last = Vec::with_capacity(queries.len());
    for _ in 0..cfg.reps {
        last.clear();
        for q in queries {
            out.clear();
            let t0 = Instant::now();
            let st = exec.run(index, q, mode, &mut out);
            let total_ns = t0.elapsed().as_nanos() as u64;
            last.push(QuerySample {
                total_ns,
                index_ns: st.index_ns,
                refine_ns: st.refine_ns,
                scan_ns: st.scan_ns,
                partitions: st.partitions_intersected,
                scanned: st.points_scanned,
                result_count: st.result_count,
            });
        }
        let counts: Vec<usize> = last.iter().map(|s| s.result_count).collect();
        match &first_counts {
            None => first_counts = Some(counts),
            Some(first) if *first != counts => {
                return Err(BenchError::Checksum(format!(
                    "{} {} returned different counts across repetitions",
                    index.kind(),
                    mode
                )))
            }
            Some(_) => {}
        }
        rep_means.push(mean(last.iter().map(|s| s.total_ns as f64)));
        all.extend_from_slice(&last);
    }

    let totals: Vec<f64> = all.iter().map(|s| s.total_ns as f64).collect();
    let aggregate = Aggregate {
        mean_ns: mean(totals.iter().copied()),
        median_ns: median(&totals),
        p99_ns: percentile(&totals, 0.99),
        index_ns: mean(all.iter().map(|s| s.index_ns as f64)),
        refine_ns: mean(all.iter().map(|s| s.refine_ns as f64)),
        scan_ns: mean(all.iter().map(|s| s.scan_ns as f64)),
        partitions_mean: mean(last.iter().map(|s| s.partitions as f64)),
        scanned_mean: mean(last.iter().map(|s| s.scanned as f64)),
        checksum: checksum(last.iter().map(|s| s.result_count)),
        rep_means,
    };
    Ok(RunResult {
        aggregate,
        last_rep: last,
    })
}

/// Powers of two in `[lo, hi]`.
pub fn ladder(lo: usize, hi: usize) -> Result<Vec<usize>> {
    if lo == 0 || lo > hi {
        return Err(BenchError::Usage(format!("bad sweep bounds {lo}:{hi}")));
    }
    let v: Vec<usize> = (0..usize::BITS)
        .map(|k| 1usize << k)
        .filter(|&p| p >= lo && p <= hi)
        .collect();
    if v.is_empty() {
        return Err(BenchError::Usage(format!(
            "no power of two within {lo}:{hi}"
        )));
    }
    Ok(v)
}

/// Default sweep bounds per index kind.
pub fn default_sweep(kind: IndexKind) -> (usize, usize) {
    match kind {
        IndexKind::FixedGrid | IndexKind::AdaptiveGrid => (1 << 4, 1 << 16),
        IndexKind::KdTree => (1 << 6, 1 << 14),
        IndexKind::Quadtree | IndexKind::Str => (1 << 2, 1 << 12),
    }
}

/// Partition parameter used by `run` and `build-stats` when none is given.
pub fn default_param(kind: IndexKind) -> usize {
    match kind {
        IndexKind::FixedGrid | IndexKind::AdaptiveGrid => 1 << 12,
        IndexKind::KdTree => 1 << 8,
        IndexKind::Quadtree => 1 << 6,
        IndexKind::Str => 1 << 5,
    }
}

#[derive(Debug, Clone)]
pub struct TuneCandidate {
    pub param: usize,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone)]
pub struct TuneResult {
    pub kind: IndexKind,
    pub mode: SearchMode,
    pub candidates: Vec<TuneCandidate>,
    /// Position in `candidates` of the fastest parameter.
    pub argmin: usize,
}

impl TuneResult {
    pub fn best_param(&self) -> usize {
        self.candidates[self.argmin].param
    }
}

/// Index of the smallest time; ties go to the later (larger-partition) entry
/// when candidates are ordered by partition size.
fn argmin_by_time(times: &[f64], larger_partitions_first: bool) -> usize {
    let mut best = 0;
    for i in 1..times.len() {
        let better =
            times[i] < times[best] || (times[i] == times[best] && !larger_partitions_first);
        if better {
            best = i;
        }
    }
    best
}

/// Whether a larger parameter means larger partitions.
pub fn param_grows_partitions(kind: IndexKind) -> bool {
    !kind.is_grid()
}

/// Builds `kind` at every ladder value and times the workload.
///
/// Candidate time is the median over repetitions of the per-repetition mean.
/// Ties favour larger partitions: more points per cell for trees, fewer cells
/// for grids.
pub fn tune(
    data: &[Point],
    queries: &[RangeQuery],
    kind: IndexKind,
    mode: SearchMode,
    params: &[usize],
    cfg: &RunConfig,
    index_cfg: &IndexConfig,
) -> Result<TuneResult> {
    if params.is_empty() {
        return Err(BenchError::Usage("empty sweep".into()));
    }
    let mut candidates = Vec::with_capacity(params.len());
    for &param in params {
        let index = build_index(kind, data, param, index_cfg)?;
        let run = run_workload(&index, queries, mode, cfg)?;
        candidates.push(TuneCandidate {
            param,
            aggregate: run.aggregate,
        });
    }
    if let Some(c) = candidates
        .iter()
        .find(|c| c.aggregate.checksum != candidates[0].aggregate.checksum)
    {
        return Err(BenchError::Checksum(format!(
            "{kind} param {} disagrees with param {}",
            c.param, candidates[0].param
        )));
    }
    let times: Vec<f64> = candidates
        .iter()
        .map(|c| c.aggregate.rep_median_ns())
        .collect();
    // Ascending params: for trees larger partitions come last, for grids first.
    let argmin = argmin_by_time(&times, !param_grows_partitions(kind));
    Ok(TuneResult {
        kind,
        mode,
        candidates,
        argmin,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildStats {
    pub kind: IndexKind,
    pub param: usize,
    pub n: usize,
    pub partitions: usize,
    /// Median build time over repetitions.
    pub build_ns: u64,
    pub size_bytes: usize,
    pub directory_bytes: usize,
    pub data_bytes: usize,
}

pub fn build_stats(
    data: &[Point],
    kind: IndexKind,
    param: usize,
    reps: usize,
    index_cfg: &IndexConfig,
) -> Result<BuildStats> {
    if reps == 0 {
        return Err(BenchError::Usage("--reps must be at least 1".into()));
    }
    let mut times = Vec::with_capacity(reps);
    let mut index = None;
    for _ in 0..reps {
        let t0 = Instant::now();
        let built = build_index(kind, data, param, index_cfg)?;
        times.push(t0.elapsed().as_nanos() as f64);
        index = Some(built);
    }
    let index = index.expect("reps >= 1");
    Ok(BuildStats {
        kind,
        param,
        n: data.len(),
        partitions: index.partitions().len(),
        build_ns: median(&times) as u64,
        size_bytes: index.size_bytes(),
        directory_bytes: index.directory_size_bytes(),
        data_bytes: std::mem::size_of_val(data),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(median(&v), 50.5);
        assert!((percentile(&v, 0.99) - 99.01).abs() < 1e-9);
        assert_eq!(percentile(&[7.0], 0.99), 7.0);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn checksum_is_order_sensitive() {
        assert_ne!(checksum([1, 2]), checksum([2, 1]));
        assert_eq!(checksum([5, 0, 3]), checksum(vec![5, 0, 3]));
        assert_ne!(checksum([0]), checksum([]));
    }

    #[test]
    fn ladders() {
        assert_eq!(ladder(16, 64).unwrap(), vec![16, 32, 64]);
        assert_eq!(ladder(10, 40).unwrap(), vec![16, 32]);
        assert_eq!(ladder(64, 64).unwrap(), vec![64]);
        assert!(ladder(0, 4).is_err());
        assert!(ladder(9, 15).is_err());
        assert!(ladder(8, 4).is_err());
        assert_eq!(ladder(16, 65536).unwrap().len(), 13);
    }

    #[test]
    fn argmin_tie_breaks() {
        // trees: later entries have larger partitions
        assert_eq!(argmin_by_time(&[3.0, 1.0, 1.0, 2.0], false), 2);
        // grids: earlier entries have larger partitions
        assert_eq!(argmin_by_time(&[3.0, 1.0, 1.0, 2.0], true), 1);
        assert_eq!(argmin_by_time(&[5.0], true), 0);
    }
}
