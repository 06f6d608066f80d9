//! Exact proximity queries over a subset of a space.
//!
//! Materialized spaces are scanned. Lazy point clouds get a kd-tree and are
//! queried in Euclidean units; since every [`MetricMode`](crate::MetricMode)
//! is a nondecreasing function of the Euclidean length, minima, maxima and
//! ball memberships found in Euclidean units map to the mode's values through
//! [`Geometry::out`].
//!
//! Box bounds are built from the same subtractions, square root and scale
//! division as [`euclidean`], so a
//! bound never exceeds (or, for the far bound, undercuts) the floating-point
//! distance of any point inside the box, and pruning never drops a point the
//! scan would have counted.

use crate::cloud::{euclidean, PointCloud};
use crate::metric::FiniteMetricSpace;

#[derive(Clone, Copy)]
pub(crate) struct Geometry<'a> {
    space: &'a FiniteMetricSpace,
    cloud: Option<&'a PointCloud>,
}

impl<'a> Geometry<'a> {
    pub(crate) fn new(space: &'a FiniteMetricSpace) -> Self {
        let cloud = if space.is_lazy() { space.cloud() } else { None };
        Geometry { space, cloud }
    }

    #[cfg(test)]
    pub(crate) fn scan(space: &'a FiniteMetricSpace) -> Self {
        Geometry { space, cloud: None }
    }

    #[cfg(test)]
    pub(crate) fn tree(space: &'a FiniteMetricSpace) -> Self {
        Geometry {
            space,
            cloud: Some(space.cloud().expect("tree geometry needs coordinates")),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.space.len()
    }

    /// Distance in working units.
    #[inline]
    pub(crate) fn w(&self, i: usize, j: usize) -> f64 {
        match self.cloud {
            Some(c) => c.euclidean(i, j),
            None => self.space.dist(i, j),
        }
    }

    /// Working units to the space's units.
    #[inline]
    pub(crate) fn out(&self, v: f64) -> f64 {
        match self.cloud {
            Some(c) if v.is_finite() => c.mode().apply(v),
            _ => v,
        }
    }

    pub(crate) fn index(&self, members: Vec<usize>, weights: Option<Vec<f64>>) -> SubsetIndex<'a> {
        match self.cloud {
            Some(cloud) => SubsetIndex::Tree(KdTree::build(cloud, members, weights)),
            None => SubsetIndex::Scan {
                geom: *self,
                weights: weights.unwrap_or_default(),
                members,
            },
        }
    }
}

pub(crate) enum SubsetIndex<'a> {
    Scan {
        geom: Geometry<'a>,
        members: Vec<usize>,
        weights: Vec<f64>,
    },
    Tree(KdTree<'a>),
}

impl SubsetIndex<'_> {
    /// Smallest distance from `q` to a member; infinite for an empty index.
    /// May stop early with any value below `abort_below`.
    pub(crate) fn nearest(&self, q: usize, abort_below: f64) -> f64 {
        match self {
            SubsetIndex::Scan { geom, members, .. } => {
                let mut best = f64::INFINITY;
                for &m in members {
                    let d = geom.w(q, m);
                    if d < best {
                        best = d;
                        if best < abort_below {
                            break;
                        }
                    }
                }
                best
            }
            SubsetIndex::Tree(t) => t.nearest(q, None, abort_below),
        }
    }

    /// Smallest distance from `q` to a member lying in the closed ball
    /// `B(center, r)`.
    pub(crate) fn nearest_within(&self, q: usize, center: usize, r: f64, abort_below: f64) -> f64 {
        match self {
            SubsetIndex::Scan { geom, members, .. } => {
                let mut best = f64::INFINITY;
                for &m in members {
                    if geom.w(center, m) > r {
                        continue;
                    }
                    let d = geom.w(q, m);
                    if d < best {
                        best = d;
                        if best < abort_below {
                            break;
                        }
                    }
                }
                best
            }
            SubsetIndex::Tree(t) => t.nearest(q, Some((center, r)), abort_below),
        }
    }

    /// Largest distance from `q` to a member; `-inf` for an empty index.
    /// May stop early with any value above `abort_above`.
    pub(crate) fn farthest(&self, q: usize, abort_above: f64) -> f64 {
        match self {
            SubsetIndex::Scan { geom, members, .. } => {
                let mut best = f64::NEG_INFINITY;
                for &m in members {
                    let d = geom.w(q, m);
                    if d > best {
                        best = d;
                        if best > abort_above {
                            break;
                        }
                    }
                }
                best
            }
            SubsetIndex::Tree(t) => t.farthest(q, abort_above),
        }
    }

    /// Largest weight among members of `B(center, r)`; `-inf` if none.
    pub(crate) fn max_weight_within(&self, center: usize, r: f64) -> f64 {
        match self {
            SubsetIndex::Scan {
                geom,
                members,
                weights,
            } => members
                .iter()
                .zip(weights)
                .filter(|(&m, _)| geom.w(center, m) <= r)
                .map(|(_, &w)| w)
                .fold(f64::NEG_INFINITY, f64::max),
            SubsetIndex::Tree(t) => t.max_weight_within(center, r),
        }
    }

    /// Distances from `center` to the members at distance in `[lo, hi]`.
    pub(crate) fn distances_between(&self, center: usize, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            SubsetIndex::Scan { geom, members, .. } => members
                .iter()
                .map(|&m| geom.w(center, m))
                .filter(|&d| d >= lo && d <= hi)
                .collect(),
            SubsetIndex::Tree(t) => t.distances_between(center, lo, hi),
        }
    }
}

const LEAF_SIZE: usize = 12;
const NO_CHILD: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    start: u32,
    end: u32,
    left: u32,
    right: u32,
    max_weight: f64,
}

impl Node {
    fn is_leaf(&self) -> bool {
        self.left == NO_CHILD
    }
}

pub(crate) struct KdTree<'a> {
    cloud: &'a PointCloud,
    ids: Vec<usize>,
    weights: Vec<f64>,
    nodes: Vec<Node>,
    // Per node: `dim` lower corners followed by `dim` upper corners.
    bounds: Vec<f64>,
}

impl<'a> KdTree<'a> {
    pub(crate) fn build(cloud: &'a PointCloud, ids: Vec<usize>, weights: Option<Vec<f64>>) -> Self {
        let weights = weights.unwrap_or_else(|| vec![f64::NEG_INFINITY; ids.len()]);
        assert_eq!(ids.len(), weights.len());
        let mut items: Vec<(usize, f64)> = ids.into_iter().zip(weights).collect();
        let mut tree = KdTree {
            cloud,
            ids: Vec::new(),
            weights: Vec::new(),
            nodes: Vec::with_capacity(2 * items.len() / LEAF_SIZE + 1),
            bounds: Vec::new(),
        };
        if !items.is_empty() {
            let n = items.len();
            tree.build_node(&mut items, 0, n);
        }
        let (ids, weights) = items.into_iter().unzip();
        tree.ids = ids;
        tree.weights = weights;
        tree
    }

    fn build_node(&mut self, items: &mut [(usize, f64)], start: usize, end: usize) -> u32 {
        let dim = self.cloud.dim();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        let mut max_weight = f64::NEG_INFINITY;
        for &(id, w) in &items[start..end] {
            for (k, &x) in self.cloud.raw(id).iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
            max_weight = max_weight.max(w);
        }
        let axis = (0..dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0);
        let spread = hi[axis] - lo[axis];

        let me = self.nodes.len() as u32;
        self.nodes.push(Node {
            start: start as u32,
            end: end as u32,
            left: NO_CHILD,
            right: NO_CHILD,
            max_weight,
        });
        self.bounds.extend_from_slice(&lo);
        self.bounds.extend_from_slice(&hi);

        if end - start > LEAF_SIZE && spread > 0.0 {
            let mid = start + (end - start) / 2;
            let cloud = self.cloud;
            items[start..end].select_nth_unstable_by(mid - start, |a, b| {
                cloud.point(a.0)[axis].total_cmp(&cloud.point(b.0)[axis])
            });
            let left = self.build_node(items, start, mid);
            let right = self.build_node(items, mid, end);
            let node = &mut self.nodes[me as usize];
            node.left = left;
            node.right = right;
        }
        me
    }

    #[inline]
    fn e(&self, a: &[f64], b: &[f64]) -> f64 {
        euclidean(a, b) / self.cloud.scale()
    }

    fn bounds(&self, node: u32) -> (&[f64], &[f64]) {
        let dim = self.cloud.dim();
        let b = &self.bounds[node as usize * 2 * dim..(node as usize + 1) * 2 * dim];
        b.split_at(dim)
    }

    fn min_dist(&self, node: u32, q: &[f64]) -> f64 {
        let (lo, hi) = self.bounds(node);
        q.iter()
            .zip(lo.iter().zip(hi))
            .map(|(&x, (&l, &h))| {
                let t = if x < l {
                    l - x
                } else if x > h {
                    x - h
                } else {
                    0.0
                };
                t * t
            })
            .sum::<f64>()
            .sqrt()
            / self.cloud.scale()
    }

    fn max_dist(&self, node: u32, q: &[f64]) -> f64 {
        let (lo, hi) = self.bounds(node);
        q.iter()
            .zip(lo.iter().zip(hi))
            .map(|(&x, (&l, &h))| {
                let t = (x - l).abs().max((h - x).abs());
                t * t
            })
            .sum::<f64>()
            .sqrt()
            / self.cloud.scale()
    }

    fn nearest(&self, q: usize, within: Option<(usize, f64)>, abort_below: f64) -> f64 {
        let mut best = f64::INFINITY;
        if self.nodes.is_empty() {
            return best;
        }
        let qp = self.cloud.raw(q);
        let within = within.map(|(c, r)| (self.cloud.raw(c), r));
        let mut stack = vec![(0u32, self.min_dist(0, qp))];
        while let Some((node, bound)) = stack.pop() {
            if bound >= best {
                continue;
            }
            if let Some((cp, r)) = within {
                if self.min_dist(node, cp) > r {
                    continue;
                }
            }
            let n = self.nodes[node as usize];
            if n.is_leaf() {
                for &id in &self.ids[n.start as usize..n.end as usize] {
                    let p = self.cloud.raw(id);
                    if let Some((cp, r)) = within {
                        if self.e(cp, p) > r {
                            continue;
                        }
                    }
                    let d = self.e(qp, p);
                    if d < best {
                        best = d;
                        if best < abort_below {
                            return best;
                        }
                    }
                }
            } else {
                let (dl, dr) = (self.min_dist(n.left, qp), self.min_dist(n.right, qp));
                if dl <= dr {
                    stack.push((n.right, dr));
                    stack.push((n.left, dl));
                } else {
                    stack.push((n.left, dl));
                    stack.push((n.right, dr));
                }
            }
        }
        best
    }

    fn farthest(&self, q: usize, abort_above: f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        if self.nodes.is_empty() {
            return best;
        }
        let qp = self.cloud.raw(q);
        let mut stack = vec![(0u32, self.max_dist(0, qp))];
        while let Some((node, bound)) = stack.pop() {
            if bound <= best {
                continue;
            }
            let n = self.nodes[node as usize];
            if n.is_leaf() {
                for &id in &self.ids[n.start as usize..n.end as usize] {
                    let d = self.e(qp, self.cloud.raw(id));
                    if d > best {
                        best = d;
                        if best > abort_above {
                            return best;
                        }
                    }
                }
            } else {
                let (dl, dr) = (self.max_dist(n.left, qp), self.max_dist(n.right, qp));
                if dl >= dr {
                    stack.push((n.right, dr));
                    stack.push((n.left, dl));
                } else {
                    stack.push((n.left, dl));
                    stack.push((n.right, dr));
                }
            }
        }
        best
    }

    fn max_weight_within(&self, center: usize, r: f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        if self.nodes.is_empty() {
            return best;
        }
        let cp = self.cloud.raw(center);
        let mut stack = vec![0u32];
        while let Some(node) = stack.pop() {
            let n = self.nodes[node as usize];
            if n.max_weight <= best || self.min_dist(node, cp) > r {
                continue;
            }
            if n.is_leaf() {
                for k in n.start as usize..n.end as usize {
                    let w = self.weights[k];
                    if w > best && self.e(cp, self.cloud.raw(self.ids[k])) <= r {
                        best = w;
                    }
                }
            } else {
                let (l, rt) = (self.nodes[n.left as usize], self.nodes[n.right as usize]);
                if l.max_weight >= rt.max_weight {
                    stack.push(n.right);
                    stack.push(n.left);
                } else {
                    stack.push(n.left);
                    stack.push(n.right);
                }
            }
        }
        best
    }

    fn distances_between(&self, center: usize, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let cp = self.cloud.raw(center);
        let mut stack = vec![0u32];
        while let Some(node) = stack.pop() {
            if self.min_dist(node, cp) > hi || self.max_dist(node, cp) < lo {
                continue;
            }
            let n = self.nodes[node as usize];
            if n.is_leaf() {
                for &id in &self.ids[n.start as usize..n.end as usize] {
                    let d = self.e(cp, self.cloud.raw(id));
                    if d >= lo && d <= hi {
                        out.push(d);
                    }
                }
            } else {
                stack.push(n.left);
                stack.push(n.right);
            }
        }
        out
    }
}
