use super::vec::{dot, gram_defect, orthonormalize};
use super::{Dims, SampledSurface};
use crate::error::{Error, Result};

/// Affine n-plane in `R^{n+k}`: a base point and an orthonormal n-frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneN {
    dims: Dims,
    base: Vec<f64>,
    /// Row-major, `n` rows of length `n + k`.
    frame: Vec<f64>,
}

impl PlaneN {
    pub fn new(dims: Dims, base: Vec<f64>, frame: Vec<f64>) -> Result<Self> {
        let d = dims.ambient();
        if base.len() != d || frame.len() != dims.n * d {
            return Err(Error::InvalidArgument("plane base/frame has wrong length".into()));
        }
        if gram_defect(&frame, dims.n, d) > 1e-12 {
            return Err(Error::InvalidArgument("plane frame is not orthonormal".into()));
        }
        Ok(PlaneN { dims, base, frame })
    }

    /// Plane spanned by arbitrary independent vectors (Gram-Schmidt).
    pub fn spanned_by(dims: Dims, base: Vec<f64>, vectors: &[f64]) -> Result<Self> {
        let frame = orthonormalize(vectors, dims.n, dims.ambient())
            .ok_or_else(|| Error::InvalidArgument("plane spanning vectors are dependent".into()))?;
        PlaneN::new(dims, base, frame)
    }

    /// Plane through `base` spanned by the first `n` coordinate axes.
    pub fn coordinate(dims: Dims, base: &[f64]) -> Self {
        let d = dims.ambient();
        let mut frame = vec![0.0; dims.n * d];
        for i in 0..dims.n {
            frame[i * d + i] = 1.0;
        }
        PlaneN { dims, base: base.to_vec(), frame }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn frame(&self) -> &[f64] {
        &self.frame
    }

    pub fn frame_vector(&self, i: usize) -> &[f64] {
        let d = self.dims.ambient();
        &self.frame[i * d..(i + 1) * d]
    }

    /// Splits `q - base` into its squared tangential and normal lengths.
    pub fn decompose2(&self, q: &[f64]) -> (f64, f64) {
        let v: Vec<f64> = q.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        let total = dot(&v, &v);
        let tangential: f64 = (0..self.dims.n)
            .map(|i| {
                let c = dot(&v, self.frame_vector(i));
                c * c
            })
            .sum();
        (tangential, (total - tangential).max(0.0))
    }

    /// Exact distance from `q` to the flat disk `base + frame * B_R^n`.
    pub fn distance_to_disk(&self, q: &[f64], radius: f64) -> f64 {
        let (t2, n2) = self.decompose2(q);
        let t = t2.sqrt();
        if t <= radius {
            n2.sqrt()
        } else {
            ((t - radius).powi(2) + n2).sqrt()
        }
    }
}

/// Lattice quadrature of the disk `P.base + frame * B_R^n`: points
/// `base + h * sum_a i_a e_a` for integer multi-indices with `|i| h <= R`,
/// each of weight `h^n`. The base point is itself a sample.
pub fn sample_plane_disk(plane: &PlaneN, radius: f64, h: f64) -> Result<SampledSurface> {
    if !(radius > 0.0) || !(h > 0.0) || h >= radius {
        return Err(Error::InvalidArgument(format!("plane disk needs 0 < h < R (got h = {h}, R = {radius})")));
    }
    let dims = plane.dims;
    let (n, d) = (dims.n, dims.ambient());
    let m = (radius / h).floor() as i64;
    let r2 = (radius / h) * (radius / h);
    let mut points = Vec::new();
    let mut idx = vec![-m; n];
    loop {
        let norm2: f64 = idx.iter().map(|&i| (i * i) as f64).sum();
        if norm2 <= r2 {
            for a in 0..d {
                let mut x = plane.base[a];
                for (i, &c) in idx.iter().enumerate() {
                    x += h * c as f64 * plane.frame[i * d + a];
                }
                points.push(x);
            }
        }
        let mut a = 0;
        loop {
            if a == n {
                let count = points.len() / d;
                let weights = vec![h.powi(n as i32); count];
                let frames = (0..count).flat_map(|_| plane.frame.iter().copied()).collect();
                return Ok(SampledSurface::from_parts_unchecked(dims, points, weights, Some(frames), h));
            }
            if idx[a] < m {
                idx[a] += 1;
                break;
            }
            idx[a] = -m;
            a += 1;
        }
    }
}
