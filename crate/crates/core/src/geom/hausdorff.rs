//! Hausdorff distance between finite point sets.
//!
//! `hausdorff_distance` is exact: the spatial index only prunes the
//! nearest-neighbour scan and returns the same minimum as brute force.

use super::vec::dist2;
use crate::error::{Error, Result};

/// Above this many point pairs the kd-tree is used.
const INDEX_THRESHOLD: usize = 1 << 14;

/// Exact nearest-neighbour index (static kd-tree with median splits on the
/// widest axis).
pub struct PointIndex<'a> {
    coords: &'a [f64],
    dim: usize,
    perm: Vec<u32>,
    nodes: Vec<Node>,
    /// Per-node bounding boxes, `lo` then `hi`.
    boxes: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Leaf { start: u32, end: u32 },
    Split { axis: u8, value: f64, left: u32, right: u32 },
}

const LEAF_SIZE: usize = 8;

impl<'a> PointIndex<'a> {
    pub fn new(coords: &'a [f64], dim: usize) -> Self {
        let count = coords.len() / dim;
        let mut index = PointIndex {
            coords,
            dim,
            perm: (0..count as u32).collect(),
            nodes: Vec::with_capacity(2 * count / LEAF_SIZE + 1),
            boxes: Vec::new(),
        };
        if count > 0 {
            index.build(0, count);
        }
        index
    }

    fn coord(&self, i: u32, axis: usize) -> f64 {
        self.coords[i as usize * self.dim + axis]
    }

    fn build(&mut self, start: usize, end: usize) -> u32 {
        let id = self.nodes.len() as u32;
        for a in 0..self.dim {
            let lo = self.perm[start..end].iter().map(|&i| self.coord(i, a)).fold(f64::INFINITY, f64::min);
            self.boxes.push(lo);
        }
        for a in 0..self.dim {
            let hi = self.perm[start..end].iter().map(|&i| self.coord(i, a)).fold(f64::NEG_INFINITY, f64::max);
            self.boxes.push(hi);
        }
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start: start as u32, end: end as u32 });
            return id;
        }
        let mut axis = 0;
        let mut widest = -1.0;
        for a in 0..self.dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in &self.perm[start..end] {
                let x = self.coord(i, a);
                lo = lo.min(x);
                hi = hi.max(x);
            }
            if hi - lo > widest {
                widest = hi - lo;
                axis = a;
            }
        }
        let mid = (start + end) / 2;
        let (coords, dim) = (self.coords, self.dim);
        let key = |i: &u32| coords[*i as usize * dim + axis];
        self.perm[start..end].select_nth_unstable_by(mid - start, |a, b| key(a).total_cmp(&key(b)));
        let value = key(&self.perm[mid]);
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id as usize] = Node::Split { axis: axis as u8, value, left, right };
        id
    }

    /// Squared distance from `q` to the nearest indexed point.
    pub fn nearest_dist2(&self, q: &[f64]) -> f64 {
        self.nearest(q).1
    }

    /// Index of the nearest point (lowest index on ties) and its squared
    /// distance; `(usize::MAX, inf)` for an empty index.
    pub fn nearest(&self, q: &[f64]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        if !self.nodes.is_empty() {
            self.search(0, q, &mut best);
        }
        best
    }

    fn box_dist2(&self, node: u32, q: &[f64]) -> f64 {
        let b = &self.boxes[2 * self.dim * node as usize..2 * self.dim * (node as usize + 1)];
        let (lo, hi) = b.split_at(self.dim);
        let mut d = 0.0;
        for a in 0..self.dim {
            let e = (lo[a] - q[a]).max(q[a] - hi[a]).max(0.0);
            d += e * e;
        }
        d
    }

    fn search(&self, node: u32, q: &[f64], best: &mut (usize, f64)) {
        if self.box_dist2(node, q) > best.1 {
            return;
        }
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for &i in &self.perm[start as usize..end as usize] {
                    let i = i as usize;
                    let d = dist2(q, &self.coords[i * self.dim..(i + 1) * self.dim]);
                    if d < best.1 || (d == best.1 && i < best.0) {
                        *best = (i, d);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis as usize] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, best);
                if diff * diff <= best.1 {
                    self.search(far, q, best);
                }
            }
        }
    }
}

fn check(a: &[f64], b: &[f64], dim: usize) -> Result<()> {
    if a.is_empty() || b.is_empty() || dim == 0 {
        return Err(Error::EmptyHausdorff);
    }
    if !a.len().is_multiple_of(dim) || !b.len().is_multiple_of(dim) {
        return Err(Error::InvalidArgument("coordinate buffer length not a multiple of dim".into()));
    }
    Ok(())
}

/// `sup_{a in A} dist(a, B)`.
pub fn directed_hausdorff(a: &[f64], b: &[f64], dim: usize) -> Result<f64> {
    check(a, b, dim)?;
    let pairs = (a.len() / dim).saturating_mul(b.len() / dim);
    let worst = if pairs > INDEX_THRESHOLD {
        let index = PointIndex::new(b, dim);
        a.chunks(dim).map(|p| index.nearest_dist2(p)).fold(0.0, f64::max)
    } else {
        directed_brute2(a, b, dim)
    };
    Ok(worst.sqrt())
}

fn directed_brute2(a: &[f64], b: &[f64], dim: usize) -> f64 {
    a.chunks(dim).map(|p| b.chunks(dim).map(|q| dist2(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two finite point sets given as flat
/// coordinate buffers of the same ambient dimension.
pub fn hausdorff_distance(a: &[f64], b: &[f64], dim: usize) -> Result<f64> {
    Ok(directed_hausdorff(a, b, dim)?.max(directed_hausdorff(b, a, dim)?))
}

/// Reference implementation without the spatial index.
pub fn hausdorff_distance_brute(a: &[f64], b: &[f64], dim: usize) -> Result<f64> {
    check(a, b, dim)?;
    Ok(directed_brute2(a, b, dim).max(directed_brute2(b, a, dim)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn circle(r: f64, m: usize) -> Vec<f64> {
        (0..m)
            .flat_map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                [r * t.cos(), r * t.sin()]
            })
            .collect()
    }

    #[test]
    fn identical_sets_have_zero_distance() {
        let a = circle(1.0, 50);
        assert_eq!(hausdorff_distance(&a, &a, 2).unwrap(), 0.0);
    }

    #[test]
    fn one_point_asymmetry() {
        let a = [0.0];
        let b = [0.0, 1.0];
        assert_eq!(hausdorff_distance(&a, &b, 1).unwrap(), 1.0);
        assert_eq!(directed_hausdorff(&a, &b, 1).unwrap(), 0.0);
    }

    #[test]
    fn empty_set_is_an_error() {
        assert_eq!(hausdorff_distance(&[], &[1.0], 1), Err(Error::EmptyHausdorff));
    }

    #[test]
    fn concentric_circles() {
        let m = 2000;
        let spacing = 2.0 * std::f64::consts::PI * 2.0 / m as f64;
        let a = circle(1.0, m);
        let b = circle(2.0, m);
        let d = hausdorff_distance(&a, &b, 2).unwrap();
        let brute = hausdorff_distance_brute(&a, &b, 2).unwrap();
        assert_eq!(d, brute);
        assert!((d - 1.0).abs() <= 2.0 * spacing);
    }

    #[test]
    fn index_matches_brute_force_far_queries() {
        let b = circle(1.0, 300);
        let index = PointIndex::new(&b, 2);
        for q in [[5.0, 0.3], [-40.0, 2.0], [0.0, 0.0], [0.99, 0.01]] {
            let brute = b.chunks(2).map(|p| dist2(&q, p)).fold(f64::INFINITY, f64::min);
            assert_eq!(index.nearest_dist2(&q), brute);
        }
    }

    fn cloud(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, dim..dim * 200).prop_map(move |mut v| {
            v.truncate(v.len() / dim * dim);
            v
        })
    }

    proptest! {
        #[test]
        fn triangle_inequality(a in cloud(3), b in cloud(3), c in cloud(3)) {
            let ab = hausdorff_distance(&a, &b, 3).unwrap();
            let bc = hausdorff_distance(&b, &c, 3).unwrap();
            let ac = hausdorff_distance(&a, &c, 3).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert_eq!(ab, hausdorff_distance(&b, &a, 3).unwrap());
        }

        #[test]
        fn index_is_exact(a in cloud(2), b in cloud(2)) {
            let index = PointIndex::new(&b, 2);
            let via_index = a.chunks(2).map(|p| index.nearest_dist2(p)).fold(0.0, f64::max);
            prop_assert_eq!(via_index, directed_brute2(&a, &b, 2));
        }
    }
}
