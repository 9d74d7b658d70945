//! Surface representations and the geometric primitives shared by every
//! other module: quadrature export, Hausdorff distance and discrete
//! second fundamental forms.
//!
//! Points are stored as flat `f64` buffers with the ambient dimension
//! carried alongside; the supported ambient dimensions are at most 4.

mod cone;
mod grid;
mod hausdorff;
mod plane;
mod polyline;
mod profile;
mod similarity;
mod surface;

pub(crate) mod vec;

pub use cone::ConeApprox;
pub use grid::GridGraph;
pub use hausdorff::{directed_hausdorff, hausdorff_distance, hausdorff_distance_brute, PointIndex};
pub use plane::{sample_plane_disk, PlaneN};
pub use polyline::Polyline;
pub use profile::ProfileSurface;
pub use similarity::Similarity;
pub use surface::SampledSurface;

use crate::error::{Error, Result};

/// Maximum ambient dimension handled anywhere in the crate.
pub const MAX_AMBIENT: usize = 4;

/// Intrinsic dimension `n` and codimension `k` of a submanifold of `R^{n+k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub n: usize,
    pub k: usize,
}

impl Dims {
    /// Checked constructor; only `(1,1)`, `(1,2)`, `(2,1)` and `(3,1)` are
    /// supported.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        match (n, k) {
            (1, 1) | (1, 2) | (2, 1) | (3, 1) => Ok(Dims { n, k }),
            _ => Err(Error::UnsupportedDims { n, k }),
        }
    }

    pub fn ambient(&self) -> usize {
        self.n + self.k
    }
}

/// Volume of the unit ball in `R^n`, `pi^{n/2} / Gamma(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    // omega_0 = 1, omega_1 = 2, omega_n = 2 pi / n * omega_{n-2}
    let mut omega = if n.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut m = if n.is_multiple_of(2) { 2 } else { 3 };
    while m <= n {
        omega *= 2.0 * PI / m as f64;
        m += 2;
    }
    omega
}

/// Surface area of the unit sphere `S^m` in `R^{m+1}`.
pub fn unit_sphere_area(m: usize) -> f64 {
    (m + 1) as f64 * unit_ball_volume(m + 1)
}

/// A built surface of any class.
#[derive(Debug, Clone, PartialEq)]
pub enum Surface {
    Polyline(Polyline),
    Graph(GridGraph),
    Profile(ProfileSurface),
    Sampled(SampledSurface),
}

impl Surface {
    pub fn kind(&self) -> &'static str {
        match self {
            Surface::Polyline(_) => "polyline",
            Surface::Graph(_) => "graph",
            Surface::Profile(_) => "profile",
            Surface::Sampled(_) => "sampled",
        }
    }

    pub fn dims(&self) -> Dims {
        match self {
            Surface::Polyline(p) => p.dims(),
            Surface::Graph(g) => g.dims(),
            Surface::Profile(p) => p.dims(),
            Surface::Sampled(s) => s.dims(),
        }
    }

    pub fn to_sampled(&self) -> SampledSurface {
        match self {
            Surface::Polyline(p) => p.to_sampled(),
            Surface::Graph(g) => g.to_sampled(),
            Surface::Profile(p) => p.to_sampled(),
            Surface::Sampled(s) => s.clone(),
        }
    }
}
