//! In-memory 2-D spatial range queries over five partitioning schemes.
//!
//! Every scheme produces a set of [`Partition`]s whose points are sorted by
//! longitude. A range query runs in three phases:
//!
//! 1. **index lookup**: the directory (grid offsets, linear scales or a tree)
//!    yields the partitions intersecting the query rectangle;
//! 2. **refinement**: inside each partition the query's lower longitude bound
//!    is located either by binary search or through a [`RadixSplineModel`];
//! 3. **scan**: the sorted array is swept up to the upper longitude bound and
//!    points are filtered on latitude.
//!
//! Partitions fully covered by the query skip refinement and are copied whole.
//!
//! ```
//! use lsi_core::{build_index, range_query, IndexConfig, IndexKind, Point, RangeQuery, SearchMode};
//!
//! let points: Vec<Point> = (0..1000)
//!     .map(|i| Point::new((i % 37) as f64, (i % 101) as f64))
//!     .collect();
//! let index = build_index(IndexKind::FixedGrid, &points, 8, &IndexConfig::default()).unwrap();
//! let q = RangeQuery::new(3.0, 10.0, 7.5, 20.0).unwrap();
//! let mut out = Vec::new();
//! let stats = range_query(&index, &q, SearchMode::Learned, &mut out);
//! assert_eq!(stats.result_count, out.len());
//! ```

pub mod error;
pub mod geometry;
pub mod partitioning;
pub mod query;
pub mod radix_spline;
pub mod workload;

pub use error::{Error, Result};
pub use geometry::{BoundingBox, Point, RangeQuery};
pub use partitioning::{
    build_index, AdaptiveGridIndex, AnyIndex, FixedGridIndex, IndexConfig, IndexKind, KdTreeIndex,
    Partition, QuadtreeIndex, SpatialIndex, StrTreeIndex,
};
pub use query::{
    range_query, range_query_untimed, refine, scan, QueryExecutor, QueryStats, Refined, SearchMode,
};
pub use radix_spline::{map_key, MappedKey, RadixSplineBuilder, RadixSplineModel, SplineConfig};
pub use workload::{
    count_in_range, generate_dataset, generate_skewed, generate_uniform, DatasetKind, DatasetSpec,
    GeneratedQuery, GridCounter, QueryKind, Workload, WorkloadSpec,
};
