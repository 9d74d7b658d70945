use super::vec::{dist2, gram_defect};
use super::{Dims, Similarity};
use crate::error::{Error, Result};

/// Quadrature representation of an n-dimensional surface: sample points
/// with positive area weights (H^n per cell), optional tangent frames and
/// a characteristic sample spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSurface {
    dims: Dims,
    points: Vec<f64>,
    weights: Vec<f64>,
    frames: Option<Vec<f64>>,
    spacing: f64,
}

impl SampledSurface {
    pub fn new(dims: Dims, points: Vec<f64>, weights: Vec<f64>, spacing: f64) -> Result<Self> {
        let d = dims.ambient();
        if points.len() != weights.len() * d {
            return Err(Error::InvalidSurface(format!(
                "{} coordinates for {} weights in ambient dimension {d}",
                points.len(),
                weights.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidSurface(format!("weight {} at sample {i} is not positive", weights[i])));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSurface("non-finite coordinate".into()));
        }
        if !(spacing > 0.0) {
            return Err(Error::InvalidSurface(format!("spacing {spacing} must be positive")));
        }
        Ok(SampledSurface { dims, points, weights, frames: None, spacing })
    }

    /// Attaches one orthonormal n-frame (row-major, `n * (n+k)` values) per
    /// sample.
    pub fn with_frames(mut self, frames: Vec<f64>) -> Result<Self> {
        let (n, d) = (self.dims.n, self.dims.ambient());
        if frames.len() != self.len() * n * d {
            return Err(Error::InvalidSurface("frame buffer has wrong length".into()));
        }
        for chunk in frames.chunks(n * d) {
            if gram_defect(chunk, n, d) > 1e-12 {
                return Err(Error::InvalidSurface("frame is not orthonormal".into()));
            }
        }
        self.frames = Some(frames);
        Ok(self)
    }

    pub(crate) fn from_parts_unchecked(
        dims: Dims,
        points: Vec<f64>,
        weights: Vec<f64>,
        frames: Option<Vec<f64>>,
        spacing: f64,
    ) -> Self {
        SampledSurface { dims, points, weights, frames, spacing }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn ambient(&self) -> usize {
        self.dims.ambient()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.ambient();
        &self.points[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn frame(&self, i: usize) -> Option<&[f64]> {
        let m = self.dims.n * self.ambient();
        self.frames.as_ref().map(|f| &f[i * m..(i + 1) * m])
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points.chunks(self.ambient()).zip(self.weights.iter().copied())
    }

    /// Keeps exactly the samples inside the closed ball `B_R(center)`.
    pub fn restrict_ball(&self, center: &[f64], radius: f64) -> SampledSurface {
        let r2 = radius * radius;
        self.filter(|p| dist2(p, center) <= r2)
    }

    pub fn filter(&self, mut keep: impl FnMut(&[f64]) -> bool) -> SampledSurface {
        let d = self.ambient();
        let m = self.dims.n * d;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut frames = self.frames.as_ref().map(|_| Vec::new());
        for (i, (p, w)) in self.iter().enumerate() {
            if keep(p) {
                points.extend_from_slice(p);
                weights.push(w);
                if let (Some(out), Some(src)) = (frames.as_mut(), self.frames.as_ref()) {
                    out.extend_from_slice(&src[i * m..(i + 1) * m]);
                }
            }
        }
        SampledSurface { dims: self.dims, points, weights, frames, spacing: self.spacing }
    }

    /// Disjoint union of two quadrature sets of the same dimensions.
    pub fn union(&self, other: &SampledSurface) -> Result<SampledSurface> {
        if self.dims != other.dims {
            return Err(Error::InvalidArgument("union of surfaces with different dims".into()));
        }
        let frames = match (&self.frames, &other.frames) {
            (Some(a), Some(b)) => Some([a.as_slice(), b.as_slice()].concat()),
            _ => None,
        };
        Ok(SampledSurface {
            dims: self.dims,
            points: [self.points.as_slice(), other.points.as_slice()].concat(),
            weights: [self.weights.as_slice(), other.weights.as_slice()].concat(),
            frames,
            spacing: self.spacing.max(other.spacing),
        })
    }

    /// Image under `x -> scale * Q x + y`; weights scale by `scale^n`.
    pub fn transformed(&self, sim: &Similarity) -> SampledSurface {
        let d = self.ambient();
        let n = self.dims.n;
        let points = self.points.chunks(d).flat_map(|p| sim.apply(p)).collect();
        let wscale = sim.scale.powi(n as i32);
        let weights = self.weights.iter().map(|w| w * wscale).collect();
        let frames = self.frames.as_ref().map(|f| f.chunks(d).flat_map(|v| sim.rotate(v)).collect());
        SampledSurface { dims: self.dims, points, weights, frames, spacing: self.spacing * sim.scale }
    }

    /// Axis-aligned bounding box as `(lo, hi)`; `None` when empty.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.is_empty() {
            return None;
        }
        let d = self.ambient();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in self.points.chunks(d) {
            for a in 0..d {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        Some((lo, hi))
    }

    /// Diameter of the bounding box.
    pub fn extent(&self) -> f64 {
        self.bounding_box().map(|(lo, hi)| dist2(&lo, &hi).sqrt()).unwrap_or(0.0)
    }

    /// Total weight inside any ball is bounded by the polynomial growth law
    /// implied by an entropy bound `lambda`; returns the worst ratio
    /// `mass / (lambda (4 pi)^{n/2} e^{1/4} R^n)` over balls centred at the
    /// samples with the given radii.
    pub fn volume_growth_ratio(&self, lambda: f64, radii: &[f64]) -> f64 {
        let n = self.dims.n as i32;
        let c = (4.0 * std::f64::consts::PI).powf(n as f64 / 2.0) * 0.25f64.exp();
        let mut worst: f64 = 0.0;
        for p in self.points.chunks(self.ambient()) {
            for &r in radii {
                let mass = self.restrict_ball(p, r).total_weight();
                worst = worst.max(mass / (lambda * c * r.powi(n)));
            }
        }
        worst
    }
}
