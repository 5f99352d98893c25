use super::{validate_input, IndexConfig, IndexKind, Partition, SpatialIndex};
use crate::error::Result;
use crate::geometry::{Point, RangeQuery};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KdNode {
    Leaf {
        partition: usize,
    },
    /// `dim` 0 splits on longitude, 1 on latitude. Left holds coordinates
    /// `<= split`, right holds `>= split`.
    Inner {
        dim: u8,
        split: f64,
        left: usize,
        right: usize,
    },
}

/// Data-aware k-d tree: median splits alternating lon (even depth) and lat (odd depth).
///
/// Splits are by rank, so sibling subtrees differ by at most one point even
/// when many points share the split coordinate; the lower median goes left.
/// A range whose points are all identical becomes a leaf whatever its size.
#[derive(Debug, Clone)]
pub struct KdTreeIndex {
    nodes: Vec<KdNode>,
    root: usize,
    leaf_threshold: usize,
    partitions: Vec<Partition>,
}

#[inline]
fn coord(p: &Point, dim: u8) -> f64 {
    if dim == 0 {
        p.lon
    } else {
        p.lat
    }
}

impl KdTreeIndex {
    pub fn build(points: &[Point], leaf_threshold: usize, config: &IndexConfig) -> Result<Self> {
        validate_input(points, leaf_threshold, "leaf threshold")?;
        let mut work = points.to_vec();
        let mut builder = Builder {
            nodes: Vec::new(),
            leaves: Vec::new(),
            leaf_threshold,
        };
        let root = builder.split(&mut work, 0);
        let partitions = builder
            .leaves
            .into_iter()
            .map(|pts| Partition::new(None, pts, &config.spline))
            .collect::<Result<_>>()?;
        Ok(Self {
            nodes: builder.nodes,
            root,
            leaf_threshold,
            partitions,
        })
    }

    pub fn nodes(&self) -> &[KdNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn leaf_threshold(&self) -> usize {
        self.leaf_threshold
    }
}

struct Builder {
    nodes: Vec<KdNode>,
    leaves: Vec<Vec<Point>>,
    leaf_threshold: usize,
}

impl Builder {
    fn split(&mut self, pts: &mut [Point], depth: usize) -> usize {
        let all_same = pts.iter().all(|p| *p == pts[0]);
        if pts.len() <= self.leaf_threshold || all_same {
            self.leaves.push(pts.to_vec());
            self.nodes.push(KdNode::Leaf {
                partition: self.leaves.len() - 1,
            });
            return self.nodes.len() - 1;
        }
        let dim = (depth % 2) as u8;
        let mid = (pts.len() - 1) / 2;
        pts.select_nth_unstable_by(mid, |a, b| coord(a, dim).total_cmp(&coord(b, dim)));
        let split = coord(&pts[mid], dim);
        let (lo, hi) = pts.split_at_mut(mid + 1);
        let id = self.nodes.len();
        self.nodes.push(KdNode::Leaf { partition: 0 });
        let left = self.split(lo, depth + 1);
        let right = self.split(hi, depth + 1);
        self.nodes[id] = KdNode::Inner {
            dim,
            split,
            left,
            right,
        };
        id
    }
}

impl SpatialIndex for KdTreeIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::KdTree
    }

    fn param(&self) -> usize {
        self.leaf_threshold
    }

    fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    fn lookup_into(&self, q: &RangeQuery, out: &mut Vec<usize>) {
        let b = &q.bounds;
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            match self.nodes[id] {
                KdNode::Leaf { partition } => {
                    if q.intersects(self.partitions[partition].bounds()) {
                        out.push(partition);
                    }
                }
                KdNode::Inner {
                    dim,
                    split,
                    left,
                    right,
                } => {
                    let (qmin, qmax) = if dim == 0 {
                        (b.min_lon, b.max_lon)
                    } else {
                        (b.min_lat, b.max_lat)
                    };
                    // right pushed first so the left subtree is visited first
                    if qmax >= split {
                        stack.push(right);
                    }
                    if qmin <= split {
                        stack.push(left);
                    }
                }
            }
        }
    }

    fn directory_size_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.nodes.len() * std::mem::size_of::<KdNode>()
    }
}
