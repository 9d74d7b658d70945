use super::vec::{dist, norm};
use super::{Dims, SampledSurface};
use crate::error::{Error, Result};

/// Discretized curve in `R^{1+k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    dim: usize,
    vertices: Vec<f64>,
    closed: bool,
    boundary_fixed: bool,
}

impl Polyline {
    pub fn new(dim: usize, vertices: Vec<f64>, closed: bool, boundary_fixed: bool) -> Result<Self> {
        Dims::new(1, dim.saturating_sub(1))?;
        if !vertices.len().is_multiple_of(dim) {
            return Err(Error::InvalidSurface("vertex buffer length not a multiple of dim".into()));
        }
        let line = Polyline { dim, vertices, closed, boundary_fixed };
        let min = if closed { 3 } else { 2 };
        if line.len() < min {
            return Err(Error::InvalidSurface(format!("polyline needs at least {min} vertices")));
        }
        if line.vertices.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSurface("non-finite vertex".into()));
        }
        for e in 0..line.edge_count() {
            if line.edge_length(e) == 0.0 {
                return Err(Error::InvalidSurface(format!("edge {e} has coincident vertices")));
            }
        }
        Ok(line)
    }

    /// Regular m-gon inscribed in the circle of the given radius in the
    /// first two coordinates of `center`.
    pub fn circle(center: &[f64], radius: f64, m: usize) -> Self {
        let dim = center.len();
        let mut vertices = Vec::with_capacity(m * dim);
        for i in 0..m {
            let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            let mut p = center.to_vec();
            p[0] += radius * t.cos();
            p[1] += radius * t.sin();
            vertices.extend(p);
        }
        Polyline { dim, vertices, closed: true, boundary_fixed: false }
    }

    /// Straight segment from `a` to `b` with `m` equal edges and fixed ends.
    pub fn segment(a: &[f64], b: &[f64], m: usize) -> Self {
        let dim = a.len();
        let vertices = (0..=m)
            .flat_map(|i| {
                let s = i as f64 / m as f64;
                a.iter().zip(b).map(move |(x, y)| x + s * (y - x))
            })
            .collect();
        Polyline { dim, vertices, closed: false, boundary_fixed: true }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dims(&self) -> Dims {
        Dims { n: 1, k: self.dim - 1 }
    }

    pub fn len(&self) -> usize {
        self.vertices.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn boundary_fixed(&self) -> bool {
        self.boundary_fixed
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> &[f64] {
        &self.vertices
    }

    pub(crate) fn vertices_mut(&mut self) -> &mut [f64] {
        &mut self.vertices
    }

    pub fn edge_count(&self) -> usize {
        if self.closed {
            self.len()
        } else {
            self.len() - 1
        }
    }

    /// Vertex indices of edge `e`.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        (e, (e + 1) % self.len())
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let (a, b) = self.edge(e);
        dist(self.vertex(a), self.vertex(b))
    }

    pub fn total_length(&self) -> f64 {
        (0..self.edge_count()).map(|e| self.edge_length(e)).sum()
    }

    pub fn min_edge(&self) -> f64 {
        (0..self.edge_count()).map(|e| self.edge_length(e)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_edge(&self) -> f64 {
        (0..self.edge_count()).map(|e| self.edge_length(e)).fold(0.0, f64::max)
    }

    /// Whether vertex `i` is an endpoint of an open polyline.
    pub fn is_boundary(&self, i: usize) -> bool {
        !self.closed && (i == 0 || i + 1 == self.len())
    }

    /// Discrete curvature vector `2 (tau_next - tau_prev) / (|e_next| + |e_prev|)`
    /// at an interior vertex.
    pub fn curvature_vector(&self, i: usize) -> Result<Vec<f64>> {
        if self.is_boundary(i) {
            return Err(Error::BoundarySample(i));
        }
        let m = self.len();
        let prev = self.vertex((i + m - 1) % m);
        let here = self.vertex(i);
        let next = self.vertex((i + 1) % m);
        Ok(turning_vector(prev, here, next))
    }

    /// `|A|` at vertex `i`: the norm of the discrete curvature vector.
    pub fn second_fundamental(&self, i: usize) -> Result<f64> {
        Ok(norm(&self.curvature_vector(i)?))
    }

    /// Edge-midpoint quadrature; total weight equals total length exactly.
    pub fn to_sampled(&self) -> SampledSurface {
        let d = self.dim;
        let mut points = Vec::with_capacity(self.edge_count() * d);
        let mut weights = Vec::with_capacity(self.edge_count());
        let mut frames = Vec::with_capacity(self.edge_count() * d);
        let mut spacing: f64 = 0.0;
        for e in 0..self.edge_count() {
            let (a, b) = self.edge(e);
            let (pa, pb) = (self.vertex(a), self.vertex(b));
            let len = dist(pa, pb);
            points.extend(pa.iter().zip(pb).map(|(x, y)| 0.5 * (x + y)));
            frames.extend(pa.iter().zip(pb).map(|(x, y)| (y - x) / len));
            weights.push(len);
            spacing = spacing.max(len);
        }
        SampledSurface::from_parts_unchecked(self.dims(), points, weights, Some(frames), spacing)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let m = self.len() as f64;
        (0..self.dim).map(|a| self.vertices.iter().skip(a).step_by(self.dim).sum::<f64>() / m).collect()
    }

    /// Mean vertex distance to the vertex centroid.
    pub fn mean_radius(&self) -> f64 {
        let c = self.centroid();
        self.vertices.chunks(self.dim).map(|p| dist(p, &c)).sum::<f64>() / self.len() as f64
    }

    /// Radius of the centroid-centred ball containing every vertex; an upper
    /// bound for the minimal enclosing radius.
    pub fn enclosing_radius(&self) -> f64 {
        let c = self.centroid();
        self.vertices.chunks(self.dim).map(|p| dist(p, &c)).fold(0.0, f64::max)
    }

    /// Splits edges longer than `2 h_min` at their midpoint and collapses
    /// edges shorter than `h_min / 2`. Fixed endpoints never move. Returns
    /// whether the vertex set changed.
    pub fn remesh(&mut self, h_min: f64) -> bool {
        let mut changed = false;
        // collapse passes; a merged vertex is not re-examined within a pass
        loop {
            let mut collapsed = false;
            let mut e = 0;
            while e < self.edge_count() && self.len() > if self.closed { 3 } else { 2 } {
                if self.edge_length(e) >= 0.5 * h_min {
                    e += 1;
                    continue;
                }
                let (a, b) = self.edge(e);
                let d = self.dim;
                if self.is_boundary(a) && self.is_boundary(b) {
                    e += 1;
                    continue;
                } else if self.is_boundary(a) {
                    self.vertices.drain(b * d..(b + 1) * d);
                } else if self.is_boundary(b) {
                    self.vertices.drain(a * d..(a + 1) * d);
                } else {
                    let mid: Vec<f64> = self.vertex(a).iter().zip(self.vertex(b)).map(|(x, y)| 0.5 * (x + y)).collect();
                    self.vertices[a * d..(a + 1) * d].copy_from_slice(&mid);
                    self.vertices.drain(b * d..(b + 1) * d);
                }
                collapsed = true;
                e += 1;
            }
            if !collapsed {
                break;
            }
            changed = true;
        }
        // split pass
        let mut e = 0;
        while e < self.edge_count() {
            if self.edge_length(e) <= 2.0 * h_min {
                e += 1;
                continue;
            }
            let (a, b) = self.edge(e);
            let mid: Vec<f64> = self.vertex(a).iter().zip(self.vertex(b)).map(|(x, y)| 0.5 * (x + y)).collect();
            let at = if b == 0 { self.len() } else { b };
            let d = self.dim;
            self.vertices.splice(at * d..at * d, mid);
            changed = true;
            // re-check the first half of the split edge
        }
        changed
    }

    /// Proper intersection of two non-adjacent edges (planar curves only;
    /// always `false` for space curves, where crossings are non-generic).
    pub fn self_intersects(&self) -> bool {
        if self.dim != 2 {
            return false;
        }
        let m = self.edge_count();
        for e in 0..m {
            let (a, b) = self.edge(e);
            for f in e + 2..m {
                if self.closed && e == 0 && f == m - 1 {
                    continue;
                }
                let (c, d) = self.edge(f);
                if segments_cross(self.vertex(a), self.vertex(b), self.vertex(c), self.vertex(d)) {
                    return true;
                }
            }
        }
        false
    }
}

pub(crate) fn turning_vector(prev: &[f64], here: &[f64], next: &[f64]) -> Vec<f64> {
    let lp = dist(prev, here);
    let ln = dist(here, next);
    let s = 2.0 / (lp + ln);
    (0..here.len()).map(|a| s * ((next[a] - here[a]) / ln - (here[a] - prev[a]) / lp)).collect()
}

fn segments_cross(p1: &[f64], p2: &[f64], q1: &[f64], q2: &[f64]) -> bool {
    let orient = |a: &[f64], b: &[f64], c: &[f64]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line_is_flat() {
        let s = Polyline::segment(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0], 10);
        for i in 1..10 {
            assert!(s.second_fundamental(i).unwrap() < 1e-12);
        }
        assert_eq!(s.second_fundamental(0), Err(Error::BoundarySample(0)));
    }

    #[test]
    fn regular_polygon_curvature_converges_to_one() {
        for m in [16, 32, 64, 128] {
            let c = Polyline::circle(&[0.0, 0.0], 1.0, m);
            for i in 0..m {
                let k = c.second_fundamental(i).unwrap();
                assert!((k - 1.0).abs() <= 1.0 / (m * m) as f64, "m = {m}: {k}");
            }
        }
    }

    #[test]
    fn sampled_weight_equals_length() {
        let c = Polyline::circle(&[1.0, 2.0], 3.0, 97);
        let s = c.to_sampled();
        assert!((s.total_weight() - c.total_length()).abs() < 1e-12);
        assert_eq!(s.len(), 97);
    }

    #[test]
    fn remesh_respects_thresholds_and_fixed_ends() {
        let mut s = Polyline::segment(&[0.0, 0.0], &[1.0, 0.0], 3);
        s.remesh(0.1);
        assert_eq!(s.vertex(0), &[0.0, 0.0]);
        assert_eq!(s.vertex(s.len() - 1), &[1.0, 0.0]);
        assert!(s.max_edge() <= 0.2 + 1e-12);
        let mut c = Polyline::circle(&[0.0, 0.0], 0.1, 400);
        assert!(c.remesh(0.01));
        assert!(c.min_edge() >= 0.005);
        assert!(c.max_edge() <= 0.02);
    }

    #[test]
    fn detects_figure_eight() {
        let v = vec![0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        let p = Polyline::new(2, v, true, false).unwrap();
        assert!(p.self_intersects());
        assert!(!Polyline::circle(&[0.0, 0.0], 1.0, 50).self_intersects());
    }

    #[test]
    fn rejects_repeated_vertices() {
        assert!(Polyline::new(2, vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0], false, true).is_err());
    }
}
