use super::vec::{dot, normalize};
use super::Dims;
use crate::error::{Error, Result};

/// Scale-invariant cone `{rho w : rho >= 0, w in link}` given by unit link
/// directions with positive (n-1)-measure weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeApprox {
    dims: Dims,
    link: Vec<f64>,
    weights: Vec<f64>,
}

impl ConeApprox {
    /// Normalizes the given directions; zero directions are rejected.
    pub fn new(dims: Dims, directions: &[f64], weights: Vec<f64>) -> Result<Self> {
        let d = dims.ambient();
        if directions.len() != weights.len() * d || weights.is_empty() {
            return Err(Error::InvalidArgument("cone link and weights disagree".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidArgument("cone link weights must be positive".into()));
        }
        let mut link = directions.to_vec();
        for w in link.chunks_mut(d) {
            if normalize(w) < 1e-300 {
                return Err(Error::InvalidArgument("zero link direction".into()));
            }
        }
        Ok(ConeApprox { dims, link, weights })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        let d = self.dims.ambient();
        &self.link[i * d..(i + 1) * d]
    }

    pub fn directions(&self) -> impl Iterator<Item = &[f64]> {
        self.link.chunks(self.dims.ambient())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `rho * C` has the same link.
    pub fn scaled(&self, rho: f64) -> ConeApprox {
        assert!(rho > 0.0);
        self.clone()
    }

    /// Point samples of `C ∩ closed B_R(0)`: the apex plus `s w` along every
    /// link direction at radial steps of `spacing`.
    pub fn sample_ball(&self, radius: f64, spacing: f64) -> Vec<f64> {
        let d = self.dims.ambient();
        let steps = (radius / spacing).ceil() as usize;
        let mut out = vec![0.0; d];
        for w in self.directions() {
            for j in 1..=steps {
                let s = (j as f64 * spacing).min(radius);
                out.extend(w.iter().map(|x| s * x));
            }
        }
        out
    }

    /// Quadrature of `C ∩ B_rho(y)`: radial midpoint cells of width
    /// `spacing` along each link direction, weight `w_j s^{n-1} spacing`.
    pub fn quadrature_near(&self, y: &[f64], rho: f64, spacing: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.dims.n as i32;
        let ynorm = dot(y, y).sqrt();
        let s_max = ynorm + rho;
        let cells = (s_max / spacing).ceil() as usize;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (w, lw) in self.directions().zip(&self.weights) {
            for j in 0..cells {
                let s = (j as f64 + 0.5) * spacing;
                let p: Vec<f64> = w.iter().map(|x| s * x).collect();
                let d2: f64 = p.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                if d2 <= rho * rho {
                    points.extend(p);
                    weights.push(lw * s.powi(n - 1) * spacing);
                }
            }
        }
        (points, weights)
    }

    /// Distance from `p` to the cone (exact over the sampled link).
    pub fn distance(&self, p: &[f64]) -> f64 {
        let pp = dot(p, p);
        self.directions()
            .map(|w| {
                let s = dot(p, w).max(0.0);
                (pp - s * s).max(0.0).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Hausdorff distance between the two links measured in angle.
    pub fn angular_distance(&self, other: &ConeApprox) -> f64 {
        let directed = |a: &ConeApprox, b: &ConeApprox| {
            a.directions()
                .map(|u| b.directions().map(|v| dot(u, v).clamp(-1.0, 1.0).acos()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        directed(self, other).max(directed(other, self))
    }
}
