//! Three-phase range query execution with per-phase accounting.
//!
//! Phase boundaries: `index_ns` covers the directory lookup that produces the
//! partition list; `refine_ns` covers the search technique, including the
//! learned mode's local correction and downward materialization; `scan_ns`
//! covers the longitude-bounded sweep, latitude filter and copying, plus bulk
//! copies of fully contained partitions.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{Point, RangeQuery};
use crate::partitioning::{Partition, SpatialIndex};

/// How refinement finds the query's lower longitude bound inside a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SearchMode {
    Learned,
    Binary,
}

impl SearchMode {
    pub const ALL: [SearchMode; 2] = [SearchMode::Learned, SearchMode::Binary];

    pub fn name(&self) -> &'static str {
        match self {
            SearchMode::Learned => "learned",
            SearchMode::Binary => "binary",
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "learned" => Ok(SearchMode::Learned),
            "binary" => Ok(SearchMode::Binary),
            _ => Err(Error::InvalidParameter(format!(
                "unknown search mode `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub index_ns: u64,
    pub refine_ns: u64,
    pub scan_ns: u64,
    pub partitions_intersected: usize,
    /// Partitions copied whole because the query covers their bounds.
    pub partitions_contained: usize,
    /// Times the search technique was consulted.
    pub searches: usize,
    pub points_scanned: usize,
    pub result_count: usize,
}

impl QueryStats {
    pub fn phase_ns(&self) -> u64 {
        self.index_ns + self.refine_ns + self.scan_ns
    }
}

/// Outcome of refinement inside one partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Refined {
    /// Where the upward scan starts.
    pub start: usize,
    /// Points visited while correcting downward (learned mode only).
    pub scanned: usize,
}

/// Finds where the scan of `part` starts.
///
/// Binary mode returns the lower bound of `q.min_lon`. Learned mode starts
/// from the model's estimate: on an undershoot it walks up to the lower bound;
/// on an overshoot it walks down to the lower bound, appending qualifying
/// points to `out` on the way, and the scan then starts at the estimate.
/// Either way refine followed by [`scan`] yields the same multiset.
#[inline]
pub fn refine(part: &Partition, q: &RangeQuery, mode: SearchMode, out: &mut Vec<Point>) -> Refined {
    let pts = part.points();
    let k = q.min_lon();
    match (mode, part.model()) {
        (SearchMode::Learned, Some(model)) => {
            let n = pts.len();
            let est = model.estimate_unchecked(k);
            if pts[est].lon < k {
                let window = (est + model.max_error() + 2).min(n);
                let mut i = est + 1;
                while i < window && pts[i].lon < k {
                    i += 1;
                }
                if i == window && i < n && pts[i - 1].lon < k {
                    i += pts[i..].partition_point(|p| p.lon < k);
                }
                Refined {
                    start: i,
                    scanned: 0,
                }
            } else {
                let max_lon = q.max_lon();
                let mut j = est;
                while j > 0 && pts[j - 1].lon >= k {
                    j -= 1;
                    let p = pts[j];
                    if p.lon <= max_lon && q.contains_lat(p.lat) {
                        out.push(p);
                    }
                }
                Refined {
                    start: est,
                    scanned: est - j,
                }
            }
        }
        _ => Refined {
            start: pts.partition_point(|p| p.lon < k),
            scanned: 0,
        },
    }
}

/// Sweeps upward from `start` while `lon <= q.max_lon`, appending points that
/// pass the latitude test. Returns the number of points visited.
#[inline]
pub fn scan(part: &Partition, start: usize, q: &RangeQuery, out: &mut Vec<Point>) -> usize {
    let max_lon = q.max_lon();
    let rest = part.points().get(start..).unwrap_or(&[]);
    let mut visited = 0;
    for p in rest {
        if p.lon > max_lon {
            break;
        }
        visited += 1;
        if q.contains_lat(p.lat) {
            out.push(*p);
        }
    }
    visited
}

trait Clock {
    type Mark: Copy;
    fn now() -> Self::Mark;
    fn elapsed(from: Self::Mark, to: Self::Mark) -> u64;
}

struct Wall;

impl Clock for Wall {
    type Mark = Instant;

    #[inline]
    fn now() -> Instant {
        Instant::now()
    }

    #[inline]
    fn elapsed(from: Instant, to: Instant) -> u64 {
        to.duration_since(from).as_nanos() as u64
    }
}

struct NoClock;

impl Clock for NoClock {
    type Mark = ();

    #[inline]
    fn now() {}

    #[inline]
    fn elapsed(_: (), _: ()) -> u64 {
        0
    }
}

#[inline]
fn execute<I, C>(
    index: &I,
    q: &RangeQuery,
    mode: SearchMode,
    out: &mut Vec<Point>,
    scratch: &mut Vec<usize>,
) -> QueryStats
where
    I: SpatialIndex + ?Sized,
    C: Clock,
{
    let mut stats = QueryStats::default();
    let before = out.len();
    scratch.clear();

    let t0 = C::now();
    index.lookup_into(q, scratch);
    let mut t = C::now();
    stats.index_ns = C::elapsed(t0, t);

    let partitions = index.partitions();
    for &pid in scratch.iter() {
        let part = &partitions[pid];
        stats.partitions_intersected += 1;
        if q.contains_box(part.bounds()) {
            out.extend_from_slice(part.points());
            stats.points_scanned += part.len();
            stats.partitions_contained += 1;
            let t1 = C::now();
            stats.scan_ns += C::elapsed(t, t1);
            t = t1;
            continue;
        }
        stats.searches += 1;
        let refined = refine(part, q, mode, out);
        let t1 = C::now();
        let visited = scan(part, refined.start, q, out);
        let t2 = C::now();
        stats.points_scanned += refined.scanned + visited;
        stats.refine_ns += C::elapsed(t, t1);
        stats.scan_ns += C::elapsed(t1, t2);
        t = t2;
    }
    stats.result_count = out.len() - before;
    stats
}

/// Runs `q` against `index`, appending matches to `out`, with per-phase timing.
pub fn range_query<I: SpatialIndex + ?Sized>(
    index: &I,
    q: &RangeQuery,
    mode: SearchMode,
    out: &mut Vec<Point>,
) -> QueryStats {
    QueryExecutor::new().run(index, q, mode, out)
}

/// Same as [`range_query`] without reading the clock; phase times are zero.
pub fn range_query_untimed<I: SpatialIndex + ?Sized>(
    index: &I,
    q: &RangeQuery,
    mode: SearchMode,
    out: &mut Vec<Point>,
) -> QueryStats {
    QueryExecutor::new().run_untimed(index, q, mode, out)
}

/// Holds the partition-list buffer so repeated queries do not allocate.
#[derive(Debug, Default)]
pub struct QueryExecutor {
    scratch: Vec<usize>,
}

impl QueryExecutor {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn run<I: SpatialIndex + ?Sized>(
        &mut self,
        index: &I,
        q: &RangeQuery,
        mode: SearchMode,
        out: &mut Vec<Point>,
    ) -> QueryStats {
        execute::<I, Wall>(index, q, mode, out, &mut self.scratch)
    }

    #[inline]
    pub fn run_untimed<I: SpatialIndex + ?Sized>(
        &mut self,
        index: &I,
        q: &RangeQuery,
        mode: SearchMode,
        out: &mut Vec<Point>,
    ) -> QueryStats {
        execute::<I, NoClock>(index, q, mode, out, &mut self.scratch)
    }
}
