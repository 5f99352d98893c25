//! The five partitioning schemes and the index-lookup phase.
//!
//! Every scheme hands out [`Partition`]s: a bounding box, a point array sorted
//! by longitude and a learned model over those longitudes. Models are always
//! built so that binary and learned refinement run over identical layouts.
//!
//! Grids split on latitude and sort on longitude. Cell intervals are half-open
//! `[low, high)` with the last one closed, and quadtree quadrants follow the
//! same rule, so every point has exactly one home.

mod grid;
mod kdtree;
mod quadtree;
mod str_tree;

use std::fmt;
use std::str::FromStr;

pub use grid::{AdaptiveGridIndex, FixedGridIndex};
pub use kdtree::{KdNode, KdTreeIndex};
pub use quadtree::{QuadNode, QuadNodeKind, QuadtreeIndex};
pub use str_tree::{StrChild, StrNode, StrTreeIndex};

use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point, RangeQuery};
use crate::radix_spline::{RadixSplineModel, SplineConfig};

/// Default depth cap for quadtrees; stops recursion on duplicate-heavy data.
pub const DEFAULT_QUADTREE_MAX_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexConfig {
    pub spline: SplineConfig,
    pub quadtree_max_depth: usize,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            spline: SplineConfig::default(),
            quadtree_max_depth: DEFAULT_QUADTREE_MAX_DEPTH,
        }
    }
}

/// A bounding box plus a longitude-sorted point array and its model.
#[derive(Debug, Clone)]
pub struct Partition {
    bounds: BoundingBox,
    points: Vec<Point>,
    model: Option<RadixSplineModel>,
}

impl Partition {
    /// Sorts `points` by longitude (stable) and builds the model.
    ///
    /// `bounds` defaults to the tight box over the points.
    pub(crate) fn new(
        bounds: Option<BoundingBox>,
        mut points: Vec<Point>,
        config: &SplineConfig,
    ) -> Result<Self> {
        points.sort_by(|a, b| a.lon.total_cmp(&b.lon));
        let bounds = match bounds {
            Some(b) => b,
            None => BoundingBox::of_points(&points).ok_or(Error::EmptyInput)?,
        };
        let model = match (points.first(), points.last()) {
            (Some(first), Some(last)) => Some(RadixSplineModel::build_from_iter(
                first.lon,
                last.lon,
                points.len(),
                points.iter().map(|p| p.lon),
                *config,
            )?),
            _ => None,
        };
        Ok(Self {
            bounds,
            points,
            model,
        })
    }

    #[inline]
    pub fn bounds(&self) -> &BoundingBox {
        &self.bounds
    }

    #[inline]
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    #[inline]
    pub fn model(&self) -> Option<&RadixSplineModel> {
        self.model.as_ref()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn size_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            + self.points.len() * std::mem::size_of::<Point>()
            + self.model.as_ref().map_or(0, RadixSplineModel::size_bytes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexKind {
    FixedGrid,
    AdaptiveGrid,
    KdTree,
    Quadtree,
    Str,
}

impl IndexKind {
    pub const ALL: [IndexKind; 5] = [
        IndexKind::FixedGrid,
        IndexKind::AdaptiveGrid,
        IndexKind::KdTree,
        IndexKind::Quadtree,
        IndexKind::Str,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IndexKind::FixedGrid => "fixed",
            IndexKind::AdaptiveGrid => "adaptive",
            IndexKind::KdTree => "kdtree",
            IndexKind::Quadtree => "quadtree",
            IndexKind::Str => "str",
        }
    }

    /// Grids filter on one dimension only.
    pub fn is_grid(&self) -> bool {
        matches!(self, IndexKind::FixedGrid | IndexKind::AdaptiveGrid)
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IndexKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown index kind `{s}`")))
    }
}

/// Common surface of the five partition directories.
pub trait SpatialIndex {
    fn kind(&self) -> IndexKind;

    /// The partition-size parameter the index was built with.
    fn param(&self) -> usize;

    fn partitions(&self) -> &[Partition];

    /// Appends the indices of non-empty partitions whose bounds intersect `q`,
    /// in directory order.
    fn lookup_into(&self, q: &RangeQuery, out: &mut Vec<usize>);

    fn lookup(&self, q: &RangeQuery) -> Vec<usize> {
        let mut out = Vec::new();
        self.lookup_into(q, &mut out);
        out
    }

    /// Bytes used by the directory alone (offsets, scales or tree nodes).
    fn directory_size_bytes(&self) -> usize;

    /// Directory plus partitions, point payload and models.
    fn size_bytes(&self) -> usize {
        self.directory_size_bytes()
            + self
                .partitions()
                .iter()
                .map(Partition::size_bytes)
                .sum::<usize>()
    }

    fn num_points(&self) -> usize {
        self.partitions().iter().map(Partition::len).sum()
    }
}

/// Any of the five index variants.
#[derive(Debug, Clone)]
pub enum AnyIndex {
    FixedGrid(FixedGridIndex),
    AdaptiveGrid(AdaptiveGridIndex),
    KdTree(KdTreeIndex),
    Quadtree(QuadtreeIndex),
    Str(StrTreeIndex),
}

macro_rules! dispatch {
    ($self:ident, $idx:ident => $body:expr) => {
        match $self {
            AnyIndex::FixedGrid($idx) => $body,
            AnyIndex::AdaptiveGrid($idx) => $body,
            AnyIndex::KdTree($idx) => $body,
            AnyIndex::Quadtree($idx) => $body,
            AnyIndex::Str($idx) => $body,
        }
    };
}

impl SpatialIndex for AnyIndex {
    fn kind(&self) -> IndexKind {
        dispatch!(self, i => i.kind())
    }

    fn param(&self) -> usize {
        dispatch!(self, i => i.param())
    }

    fn partitions(&self) -> &[Partition] {
        dispatch!(self, i => i.partitions())
    }

    #[inline]
    fn lookup_into(&self, q: &RangeQuery, out: &mut Vec<usize>) {
        dispatch!(self, i => i.lookup_into(q, out))
    }

    fn directory_size_bytes(&self) -> usize {
        dispatch!(self, i => i.directory_size_bytes())
    }
}

/// Builds the index of `kind`; `param` is the cell count for grids, the leaf
/// threshold for k-d trees and quadtrees, and the node capacity for STR.
pub fn build_index(
    kind: IndexKind,
    points: &[Point],
    param: usize,
    config: &IndexConfig,
) -> Result<AnyIndex> {
    Ok(match kind {
        IndexKind::FixedGrid => AnyIndex::FixedGrid(FixedGridIndex::build(points, param, config)?),
        IndexKind::AdaptiveGrid => {
            AnyIndex::AdaptiveGrid(AdaptiveGridIndex::build(points, param, config)?)
        }
        IndexKind::KdTree => AnyIndex::KdTree(KdTreeIndex::build(points, param, config)?),
        IndexKind::Quadtree => AnyIndex::Quadtree(QuadtreeIndex::build(points, param, config)?),
        IndexKind::Str => AnyIndex::Str(StrTreeIndex::build(points, param, config)?),
    })
}

fn validate_input(points: &[Point], param: usize, what: &str) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if param == 0 {
        return Err(Error::InvalidParameter(format!(
            "{what} must be at least 1"
        )));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(p.lon.is_finite() && p.lat.is_finite()))
    {
        return Err(Error::InvalidCoordinate {
            lon: p.lon,
            lat: p.lat,
        });
    }
    Ok(())
}

/// Moves elements satisfying `pred` to the front; returns how many did.
fn partition_in_place<T, F: Fn(&T) -> bool>(items: &mut [T], pred: F) -> usize {
    let mut split = 0;
    for i in 0..items.len() {
        if pred(&items[i]) {
            items.swap(split, i);
            split += 1;
        }
    }
    split
}
