use super::{validate_input, IndexConfig, IndexKind, Partition, SpatialIndex};
use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point, RangeQuery};

/// Equidistant latitude strips; lookup is offset arithmetic.
///
/// Strip `i` covers `[lat_min + i*w, lat_min + (i+1)*w)`, the last strip is
/// closed above. Each strip's partition spans the full data longitude range.
#[derive(Debug, Clone)]
pub struct FixedGridIndex {
    lat_min: f64,
    lat_max: f64,
    width: f64,
    /// `cell_count + 1` strip edges; `edges[cell_count] == lat_max` exactly.
    edges: Vec<f64>,
    lon_min: f64,
    lon_max: f64,
    cells: Vec<Partition>,
}

impl FixedGridIndex {
    /// Builds over the data's own latitude extent.
    pub fn build(points: &[Point], cell_count: usize, config: &IndexConfig) -> Result<Self> {
        validate_input(points, cell_count, "cell count")?;
        let bb = BoundingBox::of_points(points).ok_or(Error::EmptyInput)?;
        Self::build_with_domain(points, cell_count, bb.min_lat, bb.max_lat, config)
    }

    /// Builds with an explicit latitude domain, which must cover every point.
    pub fn build_with_domain(
        points: &[Point],
        cell_count: usize,
        lat_min: f64,
        lat_max: f64,
        config: &IndexConfig,
    ) -> Result<Self> {
        validate_input(points, cell_count, "cell count")?;
        if !(lat_min.is_finite() && lat_max.is_finite() && lat_min <= lat_max) {
            return Err(Error::InvalidParameter(format!(
                "invalid latitude domain [{lat_min}, {lat_max}]"
            )));
        }
        let bb = BoundingBox::of_points(points).ok_or(Error::EmptyInput)?;
        if bb.min_lat < lat_min || bb.max_lat > lat_max {
            return Err(Error::InvalidParameter(format!(
                "points span latitudes [{}, {}] outside domain [{lat_min}, {lat_max}]",
                bb.min_lat, bb.max_lat
            )));
        }
        let width = (lat_max - lat_min) / cell_count as f64;
        let mut edges: Vec<f64> = (0..cell_count)
            .map(|i| lat_min + i as f64 * width)
            .collect();
        edges.push(lat_max);

        let mut index = Self {
            lat_min,
            lat_max,
            width,
            edges,
            lon_min: bb.min_lon,
            lon_max: bb.max_lon,
            cells: Vec::new(),
        };
        let mut buckets: Vec<Vec<Point>> = vec![Vec::new(); cell_count];
        for p in points {
            buckets[index.strip_of(p.lat)].push(*p);
        }
        index.cells = buckets
            .into_iter()
            .enumerate()
            .map(|(i, pts)| {
                let b = BoundingBox {
                    min_lon: bb.min_lon,
                    min_lat: index.edges[i],
                    max_lon: bb.max_lon,
                    max_lat: index.edges[i + 1],
                };
                Partition::new(Some(b), pts, &config.spline)
            })
            .collect::<Result<_>>()?;
        Ok(index)
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn lat_domain(&self) -> (f64, f64) {
        (self.lat_min, self.lat_max)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    #[inline]
    fn guess(&self, lat: f64) -> usize {
        let last = self.cells_len() - 1;
        if self.width > 0.0 {
            let g = ((lat - self.lat_min) / self.width).floor();
            if g <= 0.0 {
                0
            } else {
                (g as usize).min(last)
            }
        } else {
            last
        }
    }

    #[inline]
    fn cells_len(&self) -> usize {
        self.edges.len() - 1
    }

    /// Strip owning `lat` under the half-open rule. The offset guess is
    /// corrected against the stored edges so assignment and lookup agree to
    /// the last bit.
    #[inline]
    fn strip_of(&self, lat: f64) -> usize {
        let last = self.cells_len() - 1;
        let mut i = self.guess(lat);
        while i > 0 && lat < self.edges[i] {
            i -= 1;
        }
        while i < last && lat >= self.edges[i + 1] {
            i += 1;
        }
        i
    }
}

impl SpatialIndex for FixedGridIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::FixedGrid
    }

    fn param(&self) -> usize {
        self.cells.len()
    }

    fn partitions(&self) -> &[Partition] {
        &self.cells
    }

    #[inline]
    fn lookup_into(&self, q: &RangeQuery, out: &mut Vec<usize>) {
        let b = &q.bounds;
        if b.max_lat < self.lat_min
            || b.min_lat > self.lat_max
            || b.max_lon < self.lon_min
            || b.min_lon > self.lon_max
        {
            return;
        }
        let last_cell = self.cells_len() - 1;
        // First strip whose closed upper edge reaches min_lat.
        let mut first = self.guess(b.min_lat);
        while first > 0 && self.edges[first] >= b.min_lat {
            first -= 1;
        }
        while first < last_cell && self.edges[first + 1] < b.min_lat {
            first += 1;
        }
        // Last strip whose lower edge is within max_lat.
        let mut last = self.guess(b.max_lat);
        while last < last_cell && self.edges[last + 1] <= b.max_lat {
            last += 1;
        }
        while last > 0 && self.edges[last] > b.max_lat {
            last -= 1;
        }
        for i in first..=last {
            if !self.cells[i].is_empty() {
                out.push(i);
            }
        }
    }

    fn directory_size_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.edges.len() * std::mem::size_of::<f64>()
    }
}

/// Grid File style latitude cells with equi-depth linear scales.
///
/// Boundaries are latitude quantiles; duplicate quantiles collapse, so
/// duplicate-heavy data yields fewer, deeper cells. Lookup binary-searches the
/// scales.
#[derive(Debug, Clone)]
pub struct AdaptiveGridIndex {
    /// Cell edges, strictly increasing except for a single-value domain `[v, v]`.
    scales: Vec<f64>,
    requested_cells: usize,
    lon_min: f64,
    lon_max: f64,
    cells: Vec<Partition>,
}

impl AdaptiveGridIndex {
    pub fn build(points: &[Point], cell_count: usize, config: &IndexConfig) -> Result<Self> {
        validate_input(points, cell_count, "cell count")?;
        let bb = BoundingBox::of_points(points).ok_or(Error::EmptyInput)?;
        let n = points.len();
        let mut lats: Vec<f64> = points.iter().map(|p| p.lat).collect();
        lats.sort_by(f64::total_cmp);

        let mut scales = Vec::with_capacity(cell_count + 1);
        scales.push(lats[0]);
        for i in 1..cell_count {
            scales.push(lats[i * n / cell_count]);
        }
        scales.push(lats[n - 1]);
        scales.dedup();
        if scales.len() == 1 {
            scales.push(scales[0]);
        }

        let mut index = Self {
            scales,
            requested_cells: cell_count,
            lon_min: bb.min_lon,
            lon_max: bb.max_lon,
            cells: Vec::new(),
        };
        let mut buckets: Vec<Vec<Point>> = vec![Vec::new(); index.scales.len() - 1];
        for p in points {
            buckets[index.cell_of(p.lat)].push(*p);
        }
        index.cells = buckets
            .into_iter()
            .enumerate()
            .map(|(i, pts)| {
                let b = BoundingBox {
                    min_lon: bb.min_lon,
                    min_lat: index.scales[i],
                    max_lon: bb.max_lon,
                    max_lat: index.scales[i + 1],
                };
                Partition::new(Some(b), pts, &config.spline)
            })
            .collect::<Result<_>>()?;
        Ok(index)
    }

    pub fn linear_scales(&self) -> &[f64] {
        &self.scales
    }

    #[inline]
    fn cell_of(&self, lat: f64) -> usize {
        let interior = &self.scales[1..self.scales.len() - 1];
        interior.partition_point(|&s| s <= lat)
    }
}

impl SpatialIndex for AdaptiveGridIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::AdaptiveGrid
    }

    fn param(&self) -> usize {
        self.requested_cells
    }

    fn partitions(&self) -> &[Partition] {
        &self.cells
    }

    #[inline]
    fn lookup_into(&self, q: &RangeQuery, out: &mut Vec<usize>) {
        let b = &q.bounds;
        if b.max_lon < self.lon_min || b.min_lon > self.lon_max {
            return;
        }
        let m = self.scales.len() - 1;
        // Cell i spans [scales[i], scales[i + 1]].
        let first = self.scales[1..].partition_point(|&u| u < b.min_lat);
        let end = self.scales[..m].partition_point(|&l| l <= b.max_lat);
        for i in first..end {
            if !self.cells[i].is_empty() {
                out.push(i);
            }
        }
    }

    fn directory_size_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.scales.len() * std::mem::size_of::<f64>()
    }
}
