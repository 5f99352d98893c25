use super::{partition_in_place, validate_input, IndexConfig, IndexKind, Partition, SpatialIndex};
use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point, RangeQuery};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadNodeKind {
    /// `None` for quadrants that received no points.
    Leaf { partition: Option<usize> },
    /// Children in SW, SE, NW, NE order.
    Inner { children: [usize; 4] },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode {
    /// The quadrant itself, not the tight box of its points.
    pub bounds: BoundingBox,
    pub depth: usize,
    pub kind: QuadNodeKind,
}

/// Region quadtree over the data bounding box.
///
/// A node splits into four equal quadrants while it holds more than
/// `leaf_threshold` points and is shallower than `max_depth`. Points on a
/// split line go to the east / north quadrant.
#[derive(Debug, Clone)]
pub struct QuadtreeIndex {
    nodes: Vec<QuadNode>,
    leaf_threshold: usize,
    max_depth: usize,
    partitions: Vec<Partition>,
}

impl QuadtreeIndex {
    pub fn build(points: &[Point], leaf_threshold: usize, config: &IndexConfig) -> Result<Self> {
        validate_input(points, leaf_threshold, "leaf threshold")?;
        let max_depth = config.quadtree_max_depth;
        if max_depth == 0 {
            return Err(Error::InvalidParameter(
                "max depth must be at least 1".into(),
            ));
        }
        let bounds = BoundingBox::of_points(points).ok_or(Error::EmptyInput)?;
        let mut work = points.to_vec();
        let mut builder = Builder {
            nodes: Vec::new(),
            leaves: Vec::new(),
            leaf_threshold,
            max_depth,
        };
        builder.node(bounds, &mut work, 0);
        let partitions = builder
            .leaves
            .into_iter()
            .map(|pts| Partition::new(None, pts, &config.spline))
            .collect::<Result<_>>()?;
        Ok(Self {
            nodes: builder.nodes,
            leaf_threshold,
            max_depth,
            partitions,
        })
    }

    /// Node 0 is the root.
    pub fn nodes(&self) -> &[QuadNode] {
        &self.nodes
    }

    pub fn leaf_threshold(&self) -> usize {
        self.leaf_threshold
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }
}

struct Builder {
    nodes: Vec<QuadNode>,
    leaves: Vec<Vec<Point>>,
    leaf_threshold: usize,
    max_depth: usize,
}

impl Builder {
    fn node(&mut self, bounds: BoundingBox, pts: &mut [Point], depth: usize) -> usize {
        let id = self.nodes.len();
        if pts.len() <= self.leaf_threshold || depth >= self.max_depth {
            let partition = if pts.is_empty() {
                None
            } else {
                self.leaves.push(pts.to_vec());
                Some(self.leaves.len() - 1)
            };
            self.nodes.push(QuadNode {
                bounds,
                depth,
                kind: QuadNodeKind::Leaf { partition },
            });
            return id;
        }
        self.nodes.push(QuadNode {
            bounds,
            depth,
            kind: QuadNodeKind::Inner { children: [0; 4] },
        });

        let mid = bounds.center();
        let south = partition_in_place(pts, |p| p.lat < mid.lat);
        let (s, n) = pts.split_at_mut(south);
        let sw = partition_in_place(s, |p| p.lon < mid.lon);
        let nw = partition_in_place(n, |p| p.lon < mid.lon);
        let (sw_pts, se_pts) = s.split_at_mut(sw);
        let (nw_pts, ne_pts) = n.split_at_mut(nw);

        let BoundingBox {
            min_lon,
            min_lat,
            max_lon,
            max_lat,
        } = bounds;
        let quadrant = |a, b, c, d| BoundingBox {
            min_lon: a,
            min_lat: b,
            max_lon: c,
            max_lat: d,
        };
        let children = [
            self.node(
                quadrant(min_lon, min_lat, mid.lon, mid.lat),
                sw_pts,
                depth + 1,
            ),
            self.node(
                quadrant(mid.lon, min_lat, max_lon, mid.lat),
                se_pts,
                depth + 1,
            ),
            self.node(
                quadrant(min_lon, mid.lat, mid.lon, max_lat),
                nw_pts,
                depth + 1,
            ),
            self.node(
                quadrant(mid.lon, mid.lat, max_lon, max_lat),
                ne_pts,
                depth + 1,
            ),
        ];
        self.nodes[id].kind = QuadNodeKind::Inner { children };
        id
    }
}

impl SpatialIndex for QuadtreeIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::Quadtree
    }

    fn param(&self) -> usize {
        self.leaf_threshold
    }

    fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    fn lookup_into(&self, q: &RangeQuery, out: &mut Vec<usize>) {
        if !q.intersects(&self.nodes[0].bounds) {
            return;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            match self.nodes[id].kind {
                QuadNodeKind::Leaf { partition: Some(p) } => {
                    if q.intersects(self.partitions[p].bounds()) {
                        out.push(p);
                    }
                }
                QuadNodeKind::Leaf { partition: None } => {}
                QuadNodeKind::Inner { children } => {
                    for &c in children.iter().rev() {
                        if q.intersects(&self.nodes[c].bounds) {
                            stack.push(c);
                        }
                    }
                }
            }
        }
    }

    fn directory_size_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.nodes.len() * std::mem::size_of::<QuadNode>()
    }
}
