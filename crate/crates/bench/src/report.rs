//! CSV output.

use crate::error::Result;
use crate::harness::{Aggregate, BuildStats, QuerySample, TuneResult};
use lsi_core::{IndexKind, QueryKind, SearchMode};
use std::io::Write;

pub const AGGREGATE_HEADER: [&str; 14] = [
    "index",
    "mode",
    "param",
    "selectivity",
    "kind",
    "mean_ns",
    "median_ns",
    "p99_ns",
    "index_ns",
    "refine_ns",
    "scan_ns",
    "partitions_mean",
    "scanned_mean",
    "result_checksum",
];

pub const PER_QUERY_HEADER: [&str; 13] = [
    "index",
    "mode",
    "param",
    "selectivity",
    "kind",
    "query",
    "total_ns",
    "index_ns",
    "refine_ns",
    "scan_ns",
    "partitions",
    "scanned",
    "result_count",
];

pub const BUILD_HEADER: [&str; 8] = [
    "index",
    "param",
    "n",
    "partitions",
    "build_ns",
    "size_bytes",
    "directory_bytes",
    "data_bytes",
];

/// Identifies one (index, mode, workload) configuration.
#[derive(Debug, Clone, Copy)]
pub struct RowKey {
    pub index: IndexKind,
    pub mode: SearchMode,
    pub param: usize,
    pub selectivity: f64,
    pub kind: QueryKind,
}

impl RowKey {
    fn fields(&self) -> [String; 5] {
        [
            self.index.to_string(),
            self.mode.to_string(),
            self.param.to_string(),
            self.selectivity.to_string(),
            self.kind.to_string(),
        ]
    }
}

fn ns(x: f64) -> String {
    format!("{x:.1}")
}

pub fn aggregate_record(key: &RowKey, a: &Aggregate) -> Vec<String> {
    let mut r: Vec<String> = key.fields().into();
    r.extend([
        ns(a.mean_ns),
        ns(a.median_ns),
        ns(a.p99_ns),
        ns(a.index_ns),
        ns(a.refine_ns),
        ns(a.scan_ns),
        a.partitions_mean.to_string(),
        a.scanned_mean.to_string(),
        format!("{:016x}", a.checksum),
    ]);
    r
}

pub fn write_aggregates<W: Write>(out: W, rows: &[(RowKey, Aggregate)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_HEADER)?;
    for (k, a) in rows {
        w.write_record(aggregate_record(k, a))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_per_query<W: Write>(out: W, rows: &[(RowKey, Vec<QuerySample>)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PER_QUERY_HEADER)?;
    for (k, samples) in rows {
        for (i, s) in samples.iter().enumerate() {
            let mut r: Vec<String> = k.fields().into();
            r.extend(
                [
                    i,
                    s.total_ns as usize,
                    s.index_ns as usize,
                    s.refine_ns as usize,
                    s.scan_ns as usize,
                    s.partitions,
                    s.scanned,
                    s.result_count,
                ]
                .map(|v| v.to_string()),
            );
            w.write_record(r)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Aggregate columns plus `rep_median_ns` (the tuning objective) and `is_argmin`.
pub fn write_tune<W: Write>(
    out: W,
    t: &TuneResult,
    selectivity: f64,
    kind: QueryKind,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = AGGREGATE_HEADER.into();
    header.extend(["rep_median_ns", "is_argmin"]);
    w.write_record(header)?;
    for (i, c) in t.candidates.iter().enumerate() {
        let key = RowKey {
            index: t.kind,
            mode: t.mode,
            param: c.param,
            selectivity,
            kind,
        };
        let mut r = aggregate_record(&key, &c.aggregate);
        r.push(ns(c.aggregate.rep_median_ns()));
        r.push((i == t.argmin).to_string());
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_build_stats<W: Write>(out: W, rows: &[BuildStats]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BUILD_HEADER)?;
    for b in rows {
        w.write_record([
            b.kind.to_string(),
            b.param.to_string(),
            b.n.to_string(),
            b.partitions.to_string(),
            b.build_ns.to_string(),
            b.size_bytes.to_string(),
            b.directory_bytes.to_string(),
            b.data_bytes.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
