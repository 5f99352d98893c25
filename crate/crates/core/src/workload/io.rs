//! Point and workload files.
//!
//! * CSV points: `lon,lat` per line; lines starting with `#` are ignored.
//! * Binary points: little-endian `u64` count, then `count` pairs of `f64` (lon, lat).
//! * Workloads: a `# selectivity=<f> kind=<skewed|uniform> seed=<u64>` header,
//!   then `min_lon,min_lat,max_lon,max_lat` per query.
//!
//! Floats are written in shortest round-trip form, so files are byte-identical
//! for identical inputs.

use super::{QueryKind, Workload};
use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point, RangeQuery};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

/// Parses every record of `reader` as `width` floats.
fn read_rows<R: Read>(
    path: &Path,
    reader: R,
    width: usize,
    line_offset: u64,
) -> Result<Vec<(u64, Vec<f64>)>> {
    let mut rows = Vec::new();
    for rec in csv_reader(reader).into_records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line()) + line_offset;
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line()) + line_offset;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != width {
            return Err(parse_err(
                path,
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        let vals = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(path, line, format!("invalid number `{f}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, vals));
    }
    Ok(rows)
}

pub fn read_csv_points(path: impl AsRef<Path>) -> Result<Vec<Point>> {
    let path = path.as_ref();
    let rows = read_rows(path, BufReader::new(File::open(path)?), 2, 0)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(rows
        .into_iter()
        .map(|(_, v)| Point::new(v[0], v[1]))
        .collect())
}

pub fn write_csv_points(path: impl AsRef<Path>, points: &[Point]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for p in points {
        writeln!(w, "{},{}", p.lon, p.lat)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary_points(path: impl AsRef<Path>) -> Result<Vec<Point>> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 8 {
        return Err(parse_err(path, 0, "truncated count header"));
    }
    let (head, body) = bytes.split_at(8);
    let n = u64::from_le_bytes(head.try_into().expect("8 bytes"));
    if body.len() as u64 != n.saturating_mul(16) {
        return Err(parse_err(
            path,
            0,
            format!("header says {n} points but body holds {} bytes", body.len()),
        ));
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8 bytes"));
    body.chunks_exact(16)
        .enumerate()
        .map(|(i, rec)| {
            Point::checked(f(&rec[..8]), f(&rec[8..]))
                .map_err(|_| parse_err(path, i as u64 + 1, "non-finite coordinate"))
        })
        .collect()
}

pub fn write_binary_points(path: impl AsRef<Path>, points: &[Point]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(points.len() as u64).to_le_bytes())?;
    for p in points {
        w.write_all(&p.lon.to_le_bytes())?;
        w.write_all(&p.lat.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Contents of a workload file.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadFile {
    pub selectivity: f64,
    pub kind: QueryKind,
    pub seed: u64,
    pub queries: Vec<RangeQuery>,
}

impl From<&Workload> for WorkloadFile {
    fn from(w: &Workload) -> Self {
        Self {
            selectivity: w.spec.selectivity,
            kind: w.spec.kind,
            seed: w.spec.seed,
            queries: w.range_queries(),
        }
    }
}

pub fn write_workload(path: impl AsRef<Path>, w: &WorkloadFile) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "# selectivity={} kind={} seed={}",
        w.selectivity, w.kind, w.seed
    )?;
    for q in &w.queries {
        let b = &q.bounds;
        writeln!(
            out,
            "{},{},{},{}",
            b.min_lon, b.min_lat, b.max_lon, b.max_lat
        )?;
    }
    out.flush()?;
    Ok(())
}

fn parse_header(path: &Path, line: &str) -> Result<(f64, QueryKind, u64)> {
    let bad = |m: String| parse_err(path, 1, m);
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| bad("missing `# selectivity=... kind=... seed=...` header".into()))?;
    let (mut sel, mut kind, mut seed) = (None, None, None);
    for tok in body.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed header field `{tok}`")))?;
        match k {
            "selectivity" => {
                sel = Some(
                    v.parse::<f64>()
                        .map_err(|e| bad(format!("selectivity: {e}")))?,
                )
            }
            "kind" => kind = Some(v.parse::<QueryKind>().map_err(|e| bad(e.to_string()))?),
            "seed" => seed = Some(v.parse::<u64>().map_err(|e| bad(format!("seed: {e}")))?),
            other => return Err(bad(format!("unknown header field `{other}`"))),
        }
    }
    match (sel, kind, seed) {
        (Some(s), Some(k), Some(d)) => Ok((s, k, d)),
        _ => Err(bad("header needs selectivity, kind and seed".into())),
    }
}

pub fn read_workload(path: impl AsRef<Path>) -> Result<WorkloadFile> {
    let path = path.as_ref();
    let mut reader = BufReader::new(File::open(path)?);
    let mut header = String::new();
    reader.read_line(&mut header)?;
    let (selectivity, kind, seed) = parse_header(path, &header)?;
    let queries = read_rows(path, reader, 4, 1)?
        .into_iter()
        .map(|(line, v)| {
            BoundingBox::new(v[0], v[1], v[2], v[3])
                .map(RangeQuery::from)
                .map_err(|e| parse_err(path, line, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WorkloadFile {
        selectivity,
        kind,
        seed,
        queries,
    })
}
