use super::{validate_input, IndexConfig, IndexKind, Partition, SpatialIndex};
use crate::error::Result;
use crate::geometry::{BoundingBox, Point, RangeQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrChild {
    Leaf(usize),
    Node(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrNode {
    pub bounds: BoundingBox,
    pub children: Vec<StrChild>,
}

/// Sort-Tile-Recursive packed R-tree over points.
///
/// Leaves hold exactly `node_capacity` points except the last one packed.
/// Upper levels pack leaf boxes by their centres with the same tiling and a
/// fan-out of `max(node_capacity, 2)`, so lookups can prune by descent.
#[derive(Debug, Clone)]
pub struct StrTreeIndex {
    nodes: Vec<StrNode>,
    root: usize,
    node_capacity: usize,
    partitions: Vec<Partition>,
}

/// Number of vertical slices for `count` items at capacity `cap`: `ceil(sqrt(ceil(count / cap)))`.
pub(crate) fn slice_count(count: usize, cap: usize) -> usize {
    let groups = count.div_ceil(cap);
    let mut s = (groups as f64).sqrt().ceil() as usize;
    while s * s < groups {
        s += 1;
    }
    while s > 1 && (s - 1) * (s - 1) >= groups {
        s -= 1;
    }
    s.max(1)
}

/// One STR pass: sort by x, cut into vertical slices of `S * cap` items,
/// sort each slice by y and cut into runs of `cap`.
fn str_pack<T, X, Y>(mut items: Vec<T>, cap: usize, x: X, y: Y) -> Vec<Vec<T>>
where
    X: Fn(&T) -> f64,
    Y: Fn(&T) -> f64,
{
    let s = slice_count(items.len(), cap);
    items.sort_by(|a, b| x(a).total_cmp(&x(b)));
    let mut groups = Vec::with_capacity(items.len().div_ceil(cap));
    let mut rest = items;
    while !rest.is_empty() {
        let take = (s * cap).min(rest.len());
        let tail = rest.split_off(take);
        let mut slice = std::mem::replace(&mut rest, tail);
        slice.sort_by(|a, b| y(a).total_cmp(&y(b)));
        while !slice.is_empty() {
            let tail = slice.split_off(cap.min(slice.len()));
            groups.push(std::mem::replace(&mut slice, tail));
        }
    }
    groups
}

impl StrTreeIndex {
    pub fn build(points: &[Point], node_capacity: usize, config: &IndexConfig) -> Result<Self> {
        validate_input(points, node_capacity, "node capacity")?;
        let leaves = str_pack(points.to_vec(), node_capacity, |p| p.lon, |p| p.lat);
        let partitions: Vec<Partition> = leaves
            .into_iter()
            .map(|pts| Partition::new(None, pts, &config.spline))
            .collect::<Result<_>>()?;

        let fanout = node_capacity.max(2);
        let mut nodes = Vec::new();
        let mut level: Vec<(BoundingBox, StrChild)> = partitions
            .iter()
            .enumerate()
            .map(|(i, p)| (*p.bounds(), StrChild::Leaf(i)))
            .collect();
        loop {
            let groups = str_pack(level, fanout, |e| e.0.center().lon, |e| e.0.center().lat);
            level = groups
                .into_iter()
                .map(|g| {
                    let bounds = g.iter().skip(1).fold(g[0].0, |acc, e| acc.union(&e.0));
                    nodes.push(StrNode {
                        bounds,
                        children: g.into_iter().map(|e| e.1).collect(),
                    });
                    (bounds, StrChild::Node(nodes.len() - 1))
                })
                .collect();
            if level.len() == 1 {
                break;
            }
        }
        Ok(Self {
            root: nodes.len() - 1,
            nodes,
            node_capacity,
            partitions,
        })
    }

    pub fn nodes(&self) -> &[StrNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_capacity(&self) -> usize {
        self.node_capacity
    }
}

impl SpatialIndex for StrTreeIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::Str
    }

    fn param(&self) -> usize {
        self.node_capacity
    }

    fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    fn lookup_into(&self, q: &RangeQuery, out: &mut Vec<usize>) {
        if !q.intersects(&self.nodes[self.root].bounds) {
            return;
        }
        let mut stack = vec![self.root];
        let mut below = Vec::new();
        while let Some(id) = stack.pop() {
            for child in &self.nodes[id].children {
                match *child {
                    StrChild::Leaf(p) => {
                        if q.intersects(self.partitions[p].bounds()) {
                            out.push(p);
                        }
                    }
                    StrChild::Node(n) => {
                        if q.intersects(&self.nodes[n].bounds) {
                            below.push(n);
                        }
                    }
                }
            }
            stack.extend(below.drain(..).rev());
        }
    }

    fn directory_size_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            + self
                .nodes
                .iter()
                .map(|n| {
                    std::mem::size_of::<StrNode>()
                        + n.children.len() * std::mem::size_of::<StrChild>()
                })
                .sum::<usize>()
    }
}
