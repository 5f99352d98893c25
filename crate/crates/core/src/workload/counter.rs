use crate::geometry::{BoundingBox, Point, RangeQuery};

/// Exact number of points inside `q`, by brute force.
pub fn count_in_range(data: &[Point], q: &RangeQuery) -> usize {
    data.iter().filter(|p| q.contains_point(**p)).count()
}

/// Exact range counting over a uniform bucket grid with a summed-area table.
///
/// Buckets strictly inside the query's bucket range are counted from the
/// table; buckets on the border of that range are filtered point by point.
/// Counts always equal [`count_in_range`].
#[derive(Debug, Clone)]
pub struct GridCounter {
    bounds: BoundingBox,
    nx: usize,
    ny: usize,
    inv_w: f64,
    inv_h: f64,
    /// Points grouped by bucket, row-major (y then x).
    points: Vec<Point>,
    /// `nx * ny + 1` offsets into `points`.
    starts: Vec<usize>,
    /// `(nx + 1) * (ny + 1)` prefix sums of bucket counts.
    sat: Vec<usize>,
}

impl GridCounter {
    /// Returns `None` for empty data.
    pub fn new(data: &[Point]) -> Option<Self> {
        let bounds = BoundingBox::of_points(data)?;
        let side = ((data.len() as f64 / 8.0).sqrt().ceil() as usize).clamp(1, 2048);
        let (nx, ny) = (side, side);
        let inv = |extent: f64, cells: usize| {
            if extent > 0.0 {
                cells as f64 / extent
            } else {
                0.0
            }
        };
        let mut counter = Self {
            bounds,
            nx,
            ny,
            inv_w: inv(bounds.width(), nx),
            inv_h: inv(bounds.height(), ny),
            points: Vec::new(),
            starts: Vec::new(),
            sat: Vec::new(),
        };

        let mut counts = vec![0usize; nx * ny];
        let cells: Vec<usize> = data
            .iter()
            .map(|p| counter.cell(counter.cx(p.lon), counter.cy(p.lat)))
            .collect();
        for &c in &cells {
            counts[c] += 1;
        }
        let mut starts = Vec::with_capacity(nx * ny + 1);
        let mut acc = 0;
        for &c in &counts {
            starts.push(acc);
            acc += c;
        }
        starts.push(acc);
        let mut fill = starts.clone();
        let mut points = vec![Point::default(); data.len()];
        for (p, &c) in data.iter().zip(&cells) {
            points[fill[c]] = *p;
            fill[c] += 1;
        }

        let stride = nx + 1;
        let mut sat = vec![0usize; stride * (ny + 1)];
        for y in 0..ny {
            let mut row = 0;
            for x in 0..nx {
                row += counts[y * nx + x];
                sat[(y + 1) * stride + x + 1] = sat[y * stride + x + 1] + row;
            }
        }
        counter.points = points;
        counter.starts = starts;
        counter.sat = sat;
        Some(counter)
    }

    pub fn bounds(&self) -> &BoundingBox {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    fn cx(&self, lon: f64) -> usize {
        let v = ((lon - self.bounds.min_lon) * self.inv_w).floor();
        if v > 0.0 {
            (v as usize).min(self.nx - 1)
        } else {
            0
        }
    }

    #[inline]
    fn cy(&self, lat: f64) -> usize {
        let v = ((lat - self.bounds.min_lat) * self.inv_h).floor();
        if v > 0.0 {
            (v as usize).min(self.ny - 1)
        } else {
            0
        }
    }

    #[inline]
    fn cell(&self, x: usize, y: usize) -> usize {
        y * self.nx + x
    }

    /// Sum of bucket counts over `[x0, x1) x [y0, y1)`.
    #[inline]
    fn block(&self, x0: usize, x1: usize, y0: usize, y1: usize) -> usize {
        if x0 >= x1 || y0 >= y1 {
            return 0;
        }
        let s = self.nx + 1;
        self.sat[y1 * s + x1] + self.sat[y0 * s + x0]
            - self.sat[y0 * s + x1]
            - self.sat[y1 * s + x0]
    }

    fn count_bucket(&self, x: usize, y: usize, q: &RangeQuery) -> usize {
        let c = self.cell(x, y);
        self.points[self.starts[c]..self.starts[c + 1]]
            .iter()
            .filter(|p| q.contains_point(**p))
            .count()
    }

    pub fn count(&self, q: &RangeQuery) -> usize {
        if !q.intersects(&self.bounds) {
            return 0;
        }
        let b = &q.bounds;
        let (x0, x1) = (self.cx(b.min_lon), self.cx(b.max_lon));
        let (y0, y1) = (self.cy(b.min_lat), self.cy(b.max_lat));
        let mut total = self.block(x0 + 1, x1, y0 + 1, y1);
        for x in x0..=x1 {
            total += self.count_bucket(x, y0, q);
            if y1 != y0 {
                total += self.count_bucket(x, y1, q);
            }
        }
        for y in (y0 + 1)..y1 {
            total += self.count_bucket(x0, y, q);
            if x1 != x0 {
                total += self.count_bucket(x1, y, q);
            }
        }
        total
    }
}
