//! Points, rectangles and the closed-interval predicates every index agrees on.
//!
//! All rectangles are closed on every side: a point lying exactly on a query
//! edge belongs to the query.

use crate::error::{Error, Result};

/// A 2-D location in degrees. Longitude is the sort dimension inside partitions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub lon: f64,
    pub lat: f64,
}

impl Point {
    /// Creates a point without validation. Use [`Point::checked`] at ingestion.
    #[inline]
    pub const fn new(lon: f64, lat: f64) -> Self {
        Self { lon, lat }
    }

    /// Creates a point, rejecting NaN and infinite coordinates.
    pub fn checked(lon: f64, lat: f64) -> Result<Self> {
        if lon.is_finite() && lat.is_finite() {
            Ok(Self { lon, lat })
        } else {
            Err(Error::InvalidCoordinate { lon, lat })
        }
    }

    /// Total order on (lon, lat) using IEEE total ordering; used for multiset comparisons.
    pub fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.lon
            .total_cmp(&other.lon)
            .then(self.lat.total_cmp(&other.lat))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl BoundingBox {
    pub fn new(min_lon: f64, min_lat: f64, max_lon: f64, max_lat: f64) -> Result<Self> {
        let finite = [min_lon, min_lat, max_lon, max_lat]
            .iter()
            .all(|v| v.is_finite());
        if !finite || min_lon > max_lon || min_lat > max_lat {
            return Err(Error::InvalidBox {
                min_lon,
                min_lat,
                max_lon,
                max_lat,
            });
        }
        Ok(Self {
            min_lon,
            min_lat,
            max_lon,
            max_lat,
        })
    }

    /// Degenerate box covering a single point.
    #[inline]
    pub fn from_point(p: Point) -> Self {
        Self {
            min_lon: p.lon,
            min_lat: p.lat,
            max_lon: p.lon,
            max_lat: p.lat,
        }
    }

    /// Tight bounding box of `points`, or `None` when empty.
    pub fn of_points(points: &[Point]) -> Option<Self> {
        let (first, rest) = points.split_first()?;
        let mut b = Self::from_point(*first);
        for p in rest {
            b.expand_point(*p);
        }
        Some(b)
    }

    #[inline]
    pub fn expand_point(&mut self, p: Point) {
        self.min_lon = self.min_lon.min(p.lon);
        self.min_lat = self.min_lat.min(p.lat);
        self.max_lon = self.max_lon.max(p.lon);
        self.max_lat = self.max_lat.max(p.lat);
    }

    #[inline]
    pub fn union(&self, other: &Self) -> Self {
        Self {
            min_lon: self.min_lon.min(other.min_lon),
            min_lat: self.min_lat.min(other.min_lat),
            max_lon: self.max_lon.max(other.max_lon),
            max_lat: self.max_lat.max(other.max_lat),
        }
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.max_lon - self.min_lon
    }

    #[inline]
    pub fn height(&self) -> f64 {
        self.max_lat - self.min_lat
    }

    #[inline]
    pub fn center(&self) -> Point {
        Point::new(
            self.min_lon + self.width() / 2.0,
            self.min_lat + self.height() / 2.0,
        )
    }

    /// True iff the closed rectangles share at least one point.
    #[inline]
    pub fn intersects(&self, other: &Self) -> bool {
        self.min_lon <= other.max_lon
            && other.min_lon <= self.max_lon
            && self.min_lat <= other.max_lat
            && other.min_lat <= self.max_lat
    }

    /// True iff every point of `inner` lies inside `self`.
    #[inline]
    pub fn contains_box(&self, inner: &Self) -> bool {
        self.min_lon <= inner.min_lon
            && inner.max_lon <= self.max_lon
            && self.min_lat <= inner.min_lat
            && inner.max_lat <= self.max_lat
    }

    #[inline]
    pub fn contains_point(&self, p: Point) -> bool {
        self.min_lon <= p.lon
            && p.lon <= self.max_lon
            && self.min_lat <= p.lat
            && p.lat <= self.max_lat
    }
}

/// A closed axis-aligned query rectangle. Degenerate (point) queries are legal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeQuery {
    pub bounds: BoundingBox,
}

impl RangeQuery {
    pub fn new(min_lon: f64, min_lat: f64, max_lon: f64, max_lat: f64) -> Result<Self> {
        BoundingBox::new(min_lon, min_lat, max_lon, max_lat).map(Self::from)
    }

    #[inline]
    pub fn min_lon(&self) -> f64 {
        self.bounds.min_lon
    }

    #[inline]
    pub fn max_lon(&self) -> f64 {
        self.bounds.max_lon
    }

    #[inline]
    pub fn contains_point(&self, p: Point) -> bool {
        self.bounds.contains_point(p)
    }

    #[inline]
    pub fn contains_box(&self, inner: &BoundingBox) -> bool {
        self.bounds.contains_box(inner)
    }

    #[inline]
    pub fn intersects(&self, b: &BoundingBox) -> bool {
        self.bounds.intersects(b)
    }

    /// Latitude half of the containment test, used once longitude is known to qualify.
    #[inline]
    pub fn contains_lat(&self, lat: f64) -> bool {
        self.bounds.min_lat <= lat && lat <= self.bounds.max_lat
    }
}

impl From<BoundingBox> for RangeQuery {
    fn from(bounds: BoundingBox) -> Self {
        Self { bounds }
    }
}

/// Free-function forms of the predicates.
pub fn intersects(a: &BoundingBox, b: &BoundingBox) -> bool {
    a.intersects(b)
}

pub fn contains_box(outer: &RangeQuery, inner: &BoundingBox) -> bool {
    outer.contains_box(inner)
}

pub fn contains_point(q: &RangeQuery, p: Point) -> bool {
    q.contains_point(p)
}
