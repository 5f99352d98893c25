//! Range-query workloads and synthetic datasets.
//!
//! Queries are grown around an anchor until they hold a target number of
//! points. Skewed workloads anchor at data records; uniform workloads anchor
//! at uniform positions in the data bounding box. All randomness comes from
//! ChaCha8 seeded through `seed_from_u64`, so output is identical across
//! platforms for a given seed.

mod counter;
mod dataset;
pub mod io;

pub use counter::{count_in_range, GridCounter};
pub use dataset::{generate_dataset, DatasetKind, DatasetSpec};

use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point, RangeQuery};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

/// The six standard selectivities, smallest first.
pub const STANDARD_SELECTIVITIES: [f64; 6] = [1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2];
pub const DEFAULT_TOLERANCE: f64 = 0.1;
pub const DEFAULT_MAX_ASPECT: f64 = 4.0;
/// Upper bound on bisection steps per query.
pub const MAX_BISECTION_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Skewed,
    Uniform,
}

impl QueryKind {
    pub const ALL: [QueryKind; 2] = [QueryKind::Skewed, QueryKind::Uniform];

    pub fn name(&self) -> &'static str {
        match self {
            QueryKind::Skewed => "skewed",
            QueryKind::Uniform => "uniform",
        }
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QueryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skewed" => Ok(QueryKind::Skewed),
            "uniform" => Ok(QueryKind::Uniform),
            other => Err(Error::InvalidSpec(format!(
                "unknown workload kind `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadSpec {
    pub kind: QueryKind,
    /// Fraction of the dataset each query should hold, in `(0, 1]`.
    pub selectivity: f64,
    pub query_count: usize,
    pub seed: u64,
    /// Allowed relative deviation from the target count, never tighter than one point.
    pub tolerance: f64,
    /// Aspect ratios are drawn log-uniformly from `[1 / max_aspect, max_aspect]`.
    pub max_aspect: f64,
}

impl WorkloadSpec {
    pub fn new(kind: QueryKind, selectivity: f64, query_count: usize, seed: u64) -> Self {
        Self {
            kind,
            selectivity,
            query_count,
            seed,
            tolerance: DEFAULT_TOLERANCE,
            max_aspect: DEFAULT_MAX_ASPECT,
        }
    }

    /// Target count for `n` points: `round(selectivity * n)`, at least 1.
    pub fn target_count(&self, n: usize) -> usize {
        ((self.selectivity * n as f64).round() as usize).max(1)
    }

    /// Inclusive band of accepted counts around `target`.
    pub fn band(&self, target: usize) -> (usize, usize) {
        let slack = (self.tolerance * target as f64).max(1.0);
        let lo = (target as f64 - slack).ceil().max(1.0) as usize;
        let hi = (target as f64 + slack).floor() as usize;
        (lo, hi)
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.selectivity > 0.0 && self.selectivity <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "selectivity {} outside (0, 1]",
                self.selectivity
            )));
        }
        if self.query_count == 0 {
            return Err(Error::InvalidSpec("query count must be positive".into()));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "bad tolerance {}",
                self.tolerance
            )));
        }
        if !(self.max_aspect >= 1.0 && self.max_aspect.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "bad max aspect {}",
                self.max_aspect
            )));
        }
        if self.target_count(n) > n {
            return Err(Error::InvalidSpec(format!(
                "target count {} exceeds dataset size {n}",
                self.target_count(n)
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratedQuery {
    pub query: RangeQuery,
    pub anchor: Point,
    /// Exact number of data points inside `query`.
    pub count: usize,
    /// Set when no scale put the count inside the tolerance band and the
    /// closest count was accepted instead.
    pub warning: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub spec: WorkloadSpec,
    pub target: usize,
    pub queries: Vec<GeneratedQuery>,
}

impl Workload {
    pub fn range_queries(&self) -> Vec<RangeQuery> {
        self.queries.iter().map(|g| g.query).collect()
    }

    pub fn warnings(&self) -> usize {
        self.queries.iter().filter(|g| g.warning).count()
    }
}

pub fn generate_skewed(data: &[Point], spec: &WorkloadSpec) -> Result<Workload> {
    generate(
        data,
        &WorkloadSpec {
            kind: QueryKind::Skewed,
            ..*spec
        },
    )
}

pub fn generate_uniform(data: &[Point], spec: &WorkloadSpec) -> Result<Workload> {
    generate(
        data,
        &WorkloadSpec {
            kind: QueryKind::Uniform,
            ..*spec
        },
    )
}

/// Generates a workload of `spec.kind`.
pub fn generate(data: &[Point], spec: &WorkloadSpec) -> Result<Workload> {
    let counter = GridCounter::new(data).ok_or(Error::EmptyInput)?;
    generate_with_counter(data, &counter, spec)
}

/// As [`generate`], reusing a counter built over `data`.
pub fn generate_with_counter(
    data: &[Point],
    counter: &GridCounter,
    spec: &WorkloadSpec,
) -> Result<Workload> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    spec.validate(data.len())?;
    let target = spec.target_count(data.len());
    let band = spec.band(target);
    let bounds = *counter.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let log_aspect = spec.max_aspect.log2();

    let mut queries = Vec::with_capacity(spec.query_count);
    for _ in 0..spec.query_count {
        let anchor = match spec.kind {
            QueryKind::Skewed => data[rng.random_range(0..data.len())],
            QueryKind::Uniform => Point::new(
                bounds.min_lon + rng.random::<f64>() * bounds.width(),
                bounds.min_lat + rng.random::<f64>() * bounds.height(),
            ),
        };
        let ratio = if log_aspect > 0.0 {
            rng.random_range(-log_aspect..=log_aspect).exp2()
        } else {
            1.0
        };
        let sr = ratio.sqrt();
        let base = (bounds.width() * sr, bounds.height() / sr);
        queries.push(grow(counter, &bounds, anchor, base, band));
    }
    Ok(Workload {
        spec: *spec,
        target,
        queries,
    })
}

/// Rectangle of size `scale * base` centred at `anchor`, clipped to `bounds`.
fn rect(bounds: &BoundingBox, anchor: Point, base: (f64, f64), scale: f64) -> RangeQuery {
    let hw = 0.5 * scale * base.0;
    let hh = 0.5 * scale * base.1;
    RangeQuery {
        bounds: BoundingBox {
            min_lon: (anchor.lon - hw).max(bounds.min_lon),
            min_lat: (anchor.lat - hh).max(bounds.min_lat),
            max_lon: (anchor.lon + hw).min(bounds.max_lon),
            max_lat: (anchor.lat + hh).min(bounds.max_lat),
        },
    }
}

/// Bisects the scale in `[0, 4]` until the count lands in `band`.
///
/// At scale 4 the rectangle covers `bounds` from any anchor inside it. The
/// first probe is the midpoint, so even a one-point target yields a box of
/// the local point spacing rather than the bare anchor.
fn grow(
    counter: &GridCounter,
    bounds: &BoundingBox,
    anchor: Point,
    base: (f64, f64),
    (lo, hi): (usize, usize),
) -> GeneratedQuery {
    let mid = (lo + hi) as f64 / 2.0;
    let eval = |scale: f64| {
        let query = rect(bounds, anchor, base, scale);
        let count = counter.count(&query);
        GeneratedQuery {
            query,
            anchor,
            count,
            warning: !(lo..=hi).contains(&count),
        }
    };
    let miss = |g: &GeneratedQuery| (g.count as f64 - mid).abs();

    let (mut s_lo, mut s_hi) = (0.0f64, 4.0f64);
    let mut best = eval(s_hi);
    if !best.warning {
        return best;
    }
    for _ in 0..MAX_BISECTION_STEPS {
        let s = 0.5 * (s_lo + s_hi);
        let g = eval(s);
        if !g.warning {
            return g;
        }
        if miss(&g) < miss(&best) {
            best = g;
        }
        if g.count < lo {
            s_lo = s;
        } else {
            s_hi = s;
        }
    }
    let g = eval(s_lo);
    if miss(&g) < miss(&best) {
        best = g;
    }
    best
}
