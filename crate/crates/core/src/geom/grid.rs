use nalgebra::{DMatrix, DVector};

use super::vec::orthonormalize;
use super::{Dims, SampledSurface};
use crate::error::{Error, Result};

/// Graph of `u: box -> R^k` sampled on a uniform grid of spacing `h`.
/// Node values on the box boundary are the fixed Dirichlet trace.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGraph {
    dims: Dims,
    lo: Vec<f64>,
    cells: Vec<usize>,
    h: f64,
    /// `k` values per node; axis 0 varies fastest.
    values: Vec<f64>,
}

impl GridGraph {
    /// Grid over `[lo, hi]` with `cells[0]` cells along axis 0; the other
    /// axes must be covered exactly by the same spacing.
    pub fn from_fn(
        dims: Dims,
        lo: &[f64],
        hi: &[f64],
        cells0: usize,
        mut f: impl FnMut(&[f64]) -> Vec<f64>,
    ) -> Result<Self> {
        let n = dims.n;
        if lo.len() != n || hi.len() != n || cells0 == 0 {
            return Err(Error::InvalidSurface("grid domain has wrong dimension".into()));
        }
        let h = (hi[0] - lo[0]) / cells0 as f64;
        if !(h > 0.0) {
            return Err(Error::InvalidSurface("empty grid domain".into()));
        }
        let mut cells = vec![cells0];
        for a in 1..n {
            let c = (hi[a] - lo[a]) / h;
            let rounded = c.round();
            if rounded < 1.0 || (c - rounded).abs() > 1e-9 * rounded.max(1.0) {
                return Err(Error::InvalidSurface(format!(
                    "axis {a} of the domain is not an integer number of cells of size {h}"
                )));
            }
            cells.push(rounded as usize);
        }
        let mut grid = GridGraph { dims, lo: lo.to_vec(), cells, h, values: Vec::new() };
        let count = grid.node_count();
        let mut values = Vec::with_capacity(count * dims.k);
        for node in 0..count {
            let x = grid.node_position(node);
            let v = f(&x);
            if v.len() != dims.k || v.iter().any(|y| !y.is_finite()) {
                return Err(Error::InvalidSurface(format!("u is not a finite R^{} value at {x:?}", dims.k)));
            }
            values.extend(v);
        }
        grid.values = values;
        Ok(grid)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.cells).map(|(l, c)| l + *c as f64 * self.h).collect()
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn node_count(&self) -> usize {
        self.cells.iter().map(|c| c + 1).product()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn value(&self, node: usize) -> &[f64] {
        let k = self.dims.k;
        &self.values[node * k..(node + 1) * k]
    }

    /// Stride of axis `a` in node numbering.
    pub fn stride(&self, a: usize) -> usize {
        self.cells[..a].iter().map(|c| c + 1).product()
    }

    pub fn node_index(&self, node: usize) -> Vec<usize> {
        let mut rest = node;
        self.cells
            .iter()
            .map(|c| {
                let i = rest % (c + 1);
                rest /= c + 1;
                i
            })
            .collect()
    }

    pub fn node_position(&self, node: usize) -> Vec<f64> {
        self.node_index(node).iter().zip(&self.lo).map(|(&i, l)| l + i as f64 * self.h).collect()
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.node_index(node).iter().zip(&self.cells).any(|(&i, &c)| i == 0 || i == c)
    }

    /// Embedded point `(x, u(x))` of a node.
    pub fn node_point(&self, node: usize) -> Vec<f64> {
        let mut p = self.node_position(node);
        p.extend_from_slice(self.value(node));
        p
    }

    /// Central-difference first derivatives (`k x n`) and second
    /// derivatives (`[i][j]` -> `k` values) at an interior node.
    pub fn derivatives(&self, node: usize) -> (DMatrix<f64>, Vec<Vec<DVector<f64>>>) {
        let (n, k, h) = (self.dims.n, self.dims.k, self.h);
        let at = |idx: usize, c: usize| self.values[idx * k + c];
        let mut du = DMatrix::zeros(k, n);
        let mut d2 = vec![vec![DVector::zeros(k); n]; n];
        for a in 0..n {
            let sa = self.stride(a);
            for c in 0..k {
                du[(c, a)] = (at(node + sa, c) - at(node - sa, c)) / (2.0 * h);
                d2[a][a][c] = (at(node + sa, c) - 2.0 * at(node, c) + at(node - sa, c)) / (h * h);
            }
            for b in a + 1..n {
                let sb = self.stride(b);
                for c in 0..k {
                    let v = (at(node + sa + sb, c) - at(node + sa - sb, c) - at(node - sa + sb, c)
                        + at(node - sa - sb, c))
                        / (4.0 * h * h);
                    d2[a][b][c] = v;
                    d2[b][a][c] = v;
                }
            }
        }
        (du, d2)
    }

    /// Frobenius norm of the graphical second fundamental form at an
    /// interior node.
    pub fn second_fundamental(&self, node: usize) -> Result<f64> {
        if node >= self.node_count() || self.is_boundary(node) {
            return Err(Error::BoundarySample(node));
        }
        let (du, d2) = self.derivatives(node);
        Ok(graph_second_fundamental(self.dims, &du, &d2))
    }

    /// Cell-centre quadrature with area factor `sqrt(det(I + Du^T Du)) h^n`.
    pub fn to_sampled(&self) -> SampledSurface {
        let (n, k, h) = (self.dims.n, self.dims.k, self.h);
        let d = n + k;
        let corners = 1usize << n;
        let cell_count: usize = self.cells.iter().product();
        let mut points = Vec::with_capacity(cell_count * d);
        let mut weights = Vec::with_capacity(cell_count);
        let mut frames = Vec::with_capacity(cell_count * n * d);
        let mut spacing: f64 = 0.0;
        let mut cidx = vec![0usize; n];
        for _ in 0..cell_count {
            let base: usize = (0..n).map(|a| cidx[a] * self.stride(a)).sum();
            let mut mean = vec![0.0; k];
            let mut du = DMatrix::<f64>::zeros(k, n);
            for corner in 0..corners {
                let mut node = base;
                for a in 0..n {
                    if corner >> a & 1 == 1 {
                        node += self.stride(a);
                    }
                }
                for c in 0..k {
                    let v = self.values[node * k + c];
                    mean[c] += v / corners as f64;
                    for a in 0..n {
                        let sign = if corner >> a & 1 == 1 { 1.0 } else { -1.0 };
                        du[(c, a)] += sign * v / (h * (corners / 2) as f64);
                    }
                }
            }
            for a in 0..n {
                points.push(self.lo[a] + (cidx[a] as f64 + 0.5) * h);
            }
            points.extend(mean);
            let mut tangents = vec![0.0; n * d];
            for a in 0..n {
                tangents[a * d + a] = 1.0;
                for c in 0..k {
                    tangents[a * d + n + c] = du[(c, a)];
                }
            }
            frames.extend(orthonormalize(&tangents, n, d).expect("graph tangents are independent"));
            let metric = DMatrix::identity(n, n) + du.transpose() * &du;
            let area = metric.determinant().sqrt();
            weights.push(area * h.powi(n as i32));
            spacing = spacing.max(h * metric.diagonal().max().sqrt());
            for a in 0..n {
                cidx[a] += 1;
                if cidx[a] < self.cells[a] {
                    break;
                }
                cidx[a] = 0;
            }
        }
        SampledSurface::from_parts_unchecked(self.dims, points, weights, Some(frames), spacing)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `|A|` of a graph from its first (`k x n`) and second derivatives: the
/// normal projection of `(0, u_ij)` contracted with the inverse induced
/// metric.
pub(crate) fn graph_second_fundamental(dims: Dims, du: &DMatrix<f64>, d2: &[Vec<DVector<f64>>]) -> f64 {
    let (n, k) = (dims.n, dims.k);
    let d = n + k;
    // tangent vectors as columns: T_a = (e_a, du[:, a])
    let mut t = DMatrix::<f64>::zeros(d, n);
    for a in 0..n {
        t[(a, a)] = 1.0;
        for c in 0..k {
            t[(n + c, a)] = du[(c, a)];
        }
    }
    let g = t.transpose() * &t;
    let ginv = g.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(n, n));
    let proj = &t * &ginv * t.transpose();
    let mut normal = vec![vec![DVector::<f64>::zeros(d); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut v = DVector::<f64>::zeros(d);
            for c in 0..k {
                v[n + c] = d2[i][j][c];
            }
            normal[i][j] = &v - &proj * &v;
        }
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            for p in 0..n {
                for q in 0..n {
                    sum += ginv[(i, p)] * ginv[(j, q)] * normal[i][j].dot(&normal[p][q]);
                }
            }
        }
    }
    sum.max(0.0).sqrt()
}
