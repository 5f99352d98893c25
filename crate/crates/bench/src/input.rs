//! Dataset and workload arguments.
//!
//! A dataset argument is either a file (`.bin` is read as binary, anything
//! else as CSV) or a generator spec `clustered:<n>:<seed>` / `uniform:<n>:<seed>`.
//! A workload argument is either a workload file or a generator spec
//! `<skewed|uniform>:<selectivity>:<count>:<seed>` evaluated against the dataset.

use crate::error::{BenchError, Result};
use lsi_core::workload::io::{read_workload, WorkloadFile};
use lsi_core::workload::{generate, DatasetSpec};
use lsi_core::{generate_dataset, DatasetKind, Point, QueryKind, WorkloadSpec};
use std::path::{Path, PathBuf};

fn is_binary(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("bin"))
}

fn usage(msg: String) -> BenchError {
    BenchError::Usage(msg)
}

fn field<T: std::str::FromStr>(s: &str, what: &str, arg: &str) -> Result<T> {
    s.parse()
        .map_err(|_| usage(format!("bad {what} `{s}` in `{arg}`")))
}

pub fn parse_dataset_arg(arg: &str) -> Result<DatasetSpec> {
    let parts: Vec<&str> = arg.split(':').collect();
    if let [kind @ ("clustered" | "uniform"), n, seed] = parts.as_slice() {
        let n: usize = field(n, "point count", arg)?;
        let seed: u64 = field(seed, "seed", arg)?;
        return Ok(if *kind == "clustered" {
            DatasetSpec::clustered(n, seed)
        } else {
            DatasetSpec::uniform(n, seed)
        });
    }
    let path = PathBuf::from(arg);
    let kind = if is_binary(&path) {
        DatasetKind::FileBinary(path)
    } else {
        DatasetKind::FileCsv(path)
    };
    Ok(DatasetSpec {
        kind,
        n: 0,
        domain: DatasetSpec::CITY_DOMAIN,
        seed: 0,
    })
}

pub fn load_dataset(arg: &str) -> Result<Vec<Point>> {
    Ok(generate_dataset(&parse_dataset_arg(arg)?)?)
}

pub fn write_dataset(path: &Path, points: &[Point]) -> Result<()> {
    if is_binary(path) {
        lsi_core::workload::io::write_binary_points(path, points)?;
    } else {
        lsi_core::workload::io::write_csv_points(path, points)?;
    }
    Ok(())
}

/// Parses `<kind>:<selectivity>:<count>:<seed>`; `None` when `arg` is not of that shape.
pub fn parse_workload_spec(arg: &str) -> Result<Option<WorkloadSpec>> {
    let parts: Vec<&str> = arg.split(':').collect();
    let [kind @ ("skewed" | "uniform"), sel, count, seed] = parts.as_slice() else {
        return Ok(None);
    };
    let kind: QueryKind = kind
        .parse()
        .map_err(|e: lsi_core::Error| usage(e.to_string()))?;
    Ok(Some(WorkloadSpec::new(
        kind,
        field(sel, "selectivity", arg)?,
        field(count, "query count", arg)?,
        field(seed, "seed", arg)?,
    )))
}

pub fn load_workload(arg: &str, data: &[Point]) -> Result<WorkloadFile> {
    match parse_workload_spec(arg)? {
        Some(spec) => Ok(WorkloadFile::from(&generate(data, &spec)?)),
        None => Ok(read_workload(arg)?),
    }
}
