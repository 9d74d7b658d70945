//! Rotationally symmetric hypersurfaces in `R^{n+1}` generated by a
//! profile curve `(r, z)`. The rotation axis is the last coordinate; a
//! profile point `(r, z)` sweeps `{(r w, z) : w in S^{n-1}}`.

use std::f64::consts::PI;

use super::polyline::turning_vector;
use super::vec::dist;
use super::{unit_sphere_area, Dims, SampledSurface};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSurface {
    n: usize,
    /// `(r, z)` pairs.
    profile: Vec<[f64; 2]>,
}

impl ProfileSurface {
    pub fn new(n: usize, profile: Vec<[f64; 2]>) -> Result<Self> {
        Dims::new(n, 1)?;
        if n < 2 {
            return Err(Error::InvalidSurface("profile surfaces need n >= 2".into()));
        }
        if profile.len() < 2 {
            return Err(Error::InvalidSurface("profile needs at least two samples".into()));
        }
        let last = profile.len() - 1;
        for (i, p) in profile.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() || p[0] < 0.0 {
                return Err(Error::InvalidSurface(format!("profile sample {i} has r < 0")));
            }
            if p[0] == 0.0 && i != 0 && i != last {
                return Err(Error::InvalidSurface(format!("interior profile sample {i} touches the axis")));
            }
        }
        for w in profile.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidSurface("repeated profile sample".into()));
            }
        }
        Ok(ProfileSurface { n, profile })
    }

    /// Round sphere of radius `radius`: the half circle from the north to
    /// the south pole, with arc-length steps close to `spacing`.
    pub fn sphere(n: usize, radius: f64, spacing: f64) -> Result<Self> {
        let m = ((PI * radius / spacing).ceil() as usize).max(4);
        let profile = (0..=m)
            .map(|i| {
                let theta = PI * i as f64 / m as f64;
                let r = if i == 0 || i == m { 0.0 } else { radius * theta.sin() };
                [r, radius * theta.cos()]
            })
            .collect();
        ProfileSurface::new(n, profile)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> Dims {
        Dims { n: self.n, k: 1 }
    }

    pub fn profile(&self) -> &[[f64; 2]] {
        &self.profile
    }

    pub(crate) fn profile_mut(&mut self) -> &mut Vec<[f64; 2]> {
        &mut self.profile
    }

    pub fn len(&self) -> usize {
        self.profile.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profile.is_empty()
    }

    pub fn on_axis(&self, i: usize) -> bool {
        self.profile[i][0] == 0.0
    }

    /// Open ends that do not touch the axis are surface boundary.
    pub fn is_boundary(&self, i: usize) -> bool {
        (i == 0 || i + 1 == self.len()) && !self.on_axis(i)
    }

    /// Neighbours of vertex `i`, reflecting across the axis at an axis end.
    fn stencil(&self, i: usize) -> Result<([f64; 2], [f64; 2], [f64; 2])> {
        let last = self.len() - 1;
        let here = self.profile[i];
        let (prev, next) = if i == 0 {
            if !self.on_axis(0) {
                return Err(Error::BoundarySample(i));
            }
            let nb = self.profile[1];
            ([-nb[0], nb[1]], nb)
        } else if i == last {
            if !self.on_axis(last) {
                return Err(Error::BoundarySample(i));
            }
            let nb = self.profile[last - 1];
            (nb, [-nb[0], nb[1]])
        } else {
            (self.profile[i - 1], self.profile[i + 1])
        };
        Ok((prev, here, next))
    }

    /// Discrete curvature vector of the profile curve at vertex `i`.
    pub fn profile_curvature(&self, i: usize) -> Result<[f64; 2]> {
        let (p, h, q) = self.stencil(i)?;
        let v = turning_vector(&p, &h, &q);
        Ok([v[0], v[1]])
    }

    /// Unit normal of the profile at vertex `i` (perpendicular to the
    /// averaged edge directions).
    pub fn profile_normal(&self, i: usize) -> Result<[f64; 2]> {
        let (p, h, q) = self.stencil(i)?;
        let lp = dist(&p, &h);
        let lq = dist(&h, &q);
        let t = [(h[0] - p[0]) / lp + (q[0] - h[0]) / lq, (h[1] - p[1]) / lp + (q[1] - h[1]) / lq];
        let len = (t[0] * t[0] + t[1] * t[1]).sqrt();
        Ok([-t[1] / len, t[0] / len])
    }

    /// Rotational principal curvature `|nu_r| / r`; at an axis end it equals
    /// the profile curvature by symmetry.
    pub fn rotational_curvature(&self, i: usize) -> Result<f64> {
        if self.on_axis(i) {
            let k = self.profile_curvature(i)?;
            return Ok((k[0] * k[0] + k[1] * k[1]).sqrt());
        }
        let nu = self.profile_normal(i)?;
        Ok(nu[0].abs() / self.profile[i][0])
    }

    /// `|A|` at vertex `i`: the largest of the profile and rotational
    /// principal curvatures.
    pub fn second_fundamental(&self, i: usize) -> Result<f64> {
        let k = self.profile_curvature(i)?;
        let kp = (k[0] * k[0] + k[1] * k[1]).sqrt();
        Ok(kp.max(self.rotational_curvature(i)?))
    }

    /// Mean curvature vector in the `(r, z)` half-plane:
    /// `kappa - (n-1) (nu_r / r) nu`, with the axis limit `n kappa`.
    pub fn mean_curvature_vector(&self, i: usize) -> Result<[f64; 2]> {
        let k = self.profile_curvature(i)?;
        if self.on_axis(i) {
            return Ok([0.0, self.n as f64 * k[1]]);
        }
        let nu = self.profile_normal(i)?;
        let c = (self.n - 1) as f64 * nu[0] / self.profile[i][0];
        Ok([k[0] - c * nu[0], k[1] - c * nu[1]])
    }

    fn segments(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.profile.windows(2).map(|w| {
            let mid = [0.5 * (w[0][0] + w[1][0]), 0.5 * (w[0][1] + w[1][1])];
            (mid, dist(&w[0], &w[1]))
        })
    }

    pub fn max_segment(&self) -> f64 {
        self.segments().map(|(_, ds)| ds).fold(0.0, f64::max)
    }

    pub fn min_segment(&self) -> f64 {
        self.segments().map(|(_, ds)| ds).fold(f64::INFINITY, f64::min)
    }

    /// Total area `sum |S^{n-1}| r^{n-1} ds` over profile segments.
    pub fn area(&self) -> f64 {
        let c = unit_sphere_area(self.n - 1);
        self.segments().map(|(m, ds)| c * m[0].powi(self.n as i32 - 1) * ds).sum()
    }

    /// One quadrature point per profile segment, placed in the meridian
    /// half-plane, carrying the whole rotational weight
    /// `|S^{n-1}| r^{n-1} ds`. Exact for rotation-invariant integrands
    /// such as Gaussians centred on the axis.
    pub fn to_sampled_meridian(&self) -> SampledSurface {
        let n = self.n;
        let c = unit_sphere_area(n - 1);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (m, ds) in self.segments() {
            let w = c * m[0].powi(n as i32 - 1) * ds;
            if w > 0.0 {
                let mut p = vec![0.0; n + 1];
                p[0] = m[0];
                p[n] = m[1];
                points.extend(p);
                weights.push(w);
            }
        }
        SampledSurface::from_parts_unchecked(self.dims(), points, weights, None, self.max_segment())
    }

    /// Full quadrature: every profile segment is swept around the axis with
    /// angular cells of arc length close to `ds` at the widest radius.
    /// Supports `n = 2` (circles) and `n = 3` (latitude bands on `S^2`).
    pub fn to_sampled(&self) -> SampledSurface {
        let n = self.n;
        let ds_ref = self.max_segment();
        let r_max = self.profile.iter().map(|p| p[0]).fold(0.0, f64::max);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut spacing = ds_ref;
        for (m, ds) in self.segments() {
            if m[0] <= 0.0 {
                continue;
            }
            match n {
                2 => {
                    let count = ((2.0 * PI * r_max / ds_ref).ceil() as usize).clamp(8, 8192);
                    let w = 2.0 * PI * m[0] * ds / count as f64;
                    for j in 0..count {
                        let phi = 2.0 * PI * (j as f64 + 0.5) / count as f64;
                        points.extend([m[0] * phi.cos(), m[0] * phi.sin(), m[1]]);
                        weights.push(w);
                    }
                    spacing = spacing.max(2.0 * PI * m[0] / count as f64);
                }
                _ => {
                    let bands = ((PI * r_max / ds_ref).ceil() as usize).clamp(4, 64);
                    for b in 0..bands {
                        let (ta, tb) = (PI * b as f64 / bands as f64, PI * (b + 1) as f64 / bands as f64);
                        let tm = 0.5 * (ta + tb);
                        let ring = ((2.0 * bands as f64 * tm.sin()).round() as usize).max(3);
                        let band_area = 2.0 * PI * (ta.cos() - tb.cos());
                        let w = m[0] * m[0] * ds * band_area / ring as f64;
                        for j in 0..ring {
                            let phi = 2.0 * PI * (j as f64 + 0.5) / ring as f64;
                            points.extend([
                                m[0] * tm.sin() * phi.cos(),
                                m[0] * tm.sin() * phi.sin(),
                                m[0] * tm.cos(),
                                m[1],
                            ]);
                            weights.push(w);
                        }
                    }
                    spacing = spacing.max(PI * m[0] / bands as f64);
                }
            }
        }
        SampledSurface::from_parts_unchecked(self.dims(), points, weights, None, spacing)
    }

    /// Centre on the axis midway between the profile ends and the radius of
    /// the ball around it containing the profile.
    pub fn enclosing_radius(&self) -> f64 {
        let zc = 0.5 * (self.profile[0][1] + self.profile[self.len() - 1][1]);
        self.profile.iter().map(|p| (p[0] * p[0] + (p[1] - zc) * (p[1] - zc)).sqrt()).fold(0.0, f64::max)
    }

    /// Remeshing with the polyline thresholds; the ends stay on the axis (or
    /// fixed when they are boundary).
    pub fn remesh(&mut self, h_min: f64) -> bool {
        let mut changed = false;
        loop {
            let mut collapsed = false;
            let mut i = 0;
            while i + 1 < self.profile.len() && self.profile.len() > 3 {
                if dist(&self.profile[i], &self.profile[i + 1]) >= 0.5 * h_min {
                    i += 1;
                    continue;
                }
                let last = self.profile.len() - 1;
                if i == 0 {
                    self.profile.remove(1);
                } else if i + 1 == last {
                    self.profile.remove(i);
                } else {
                    let a = self.profile[i];
                    let b = self.profile[i + 1];
                    self.profile[i] = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                    self.profile.remove(i + 1);
                }
                collapsed = true;
                i += 1;
            }
            if !collapsed {
                break;
            }
            changed = true;
        }
        let mut i = 0;
        while i + 1 < self.profile.len() {
            let (a, b) = (self.profile[i], self.profile[i + 1]);
            if dist(&a, &b) <= 2.0 * h_min {
                i += 1;
                continue;
            }
            self.profile.insert(i + 1, [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
            changed = true;
        }
        changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_area_and_curvature() {
        let s = ProfileSurface::sphere(2, 2.0, 0.01).unwrap();
        assert!((s.area() - 16.0 * PI).abs() / (16.0 * PI) < 1e-4);
        let full = s.to_sampled();
        assert!((full.total_weight() - s.area()).abs() < 1e-9 * s.area());
        for i in [0, 10, s.len() / 2, s.len() - 1] {
            assert!((s.second_fundamental(i).unwrap() - 0.5).abs() < 1e-4);
            let h = s.mean_curvature_vector(i).unwrap();
            let p = s.profile()[i];
            // H = -n x / R^2 for the round sphere
            assert!((h[0] + 2.0 * p[0] / 4.0).abs() < 1e-3, "{i}: {h:?}");
            assert!((h[1] + 2.0 * p[1] / 4.0).abs() < 1e-3, "{i}: {h:?}");
        }
    }

    #[test]
    fn three_sphere_quadrature() {
        let s = ProfileSurface::sphere(3, 1.0, 0.02).unwrap();
        let exact = 2.0 * PI * PI;
        assert!((s.area() - exact).abs() / exact < 1e-3);
        assert!((s.to_sampled().total_weight() - s.area()).abs() < 1e-9);
    }

    #[test]
    fn rejects_interior_axis_touch() {
        let p = vec![[0.0, 1.0], [0.0, 0.0], [1.0, 0.0]];
        assert!(ProfileSurface::new(2, p).is_err());
        assert!(ProfileSurface::new(2, vec![[1.0, 0.0], [-1.0, 1.0]]).is_err());
    }

    #[test]
    fn open_end_is_boundary() {
        let p = ProfileSurface::new(2, vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap();
        assert_eq!(p.second_fundamental(2), Err(Error::BoundarySample(2)));
        assert_eq!(p.second_fundamental(0).unwrap(), 0.0);
        assert_eq!(p.second_fundamental(1).unwrap(), 0.0);
    }
}
