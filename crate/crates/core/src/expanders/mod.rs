//! Graphical self-expanders, their asymptotic cones and the rate at which
//! `sqrt(t) Σ` approaches the cone.

mod curve;
mod ode;
mod profile;

pub use curve::{solve_expander_curve, solve_expander_curve_for_slope, ExpanderCurve};
pub use profile::{solve_expander_profile, ExpanderProfile};

use crate::error::{Error, Result};
use crate::geom::vec::{dot, norm};
use crate::geom::{
    directed_hausdorff, hausdorff_distance, sample_plane_disk, unit_ball_volume, ConeApprox, Dims, PlaneN, PointIndex,
    SampledSurface,
};
use rayon::prelude::*;
use std::collections::HashMap;

/// Angular tolerance for merging link directions.
pub const LINK_MERGE_TOL: f64 = 1e-3;

/// A surface whose parabolic rescalings `sqrt(t) Σ` can be sampled.
pub trait ScaledFamily: Sync {
    fn dims(&self) -> Dims;
    /// Samples of `sqrt(t) Σ ∩ closed B_R(0)` spaced about `spacing` apart.
    fn scaled_ball(&self, t: f64, radius: f64, spacing: f64) -> SampledSurface;
}

impl ScaledFamily for PlaneN {
    fn dims(&self) -> Dims {
        PlaneN::dims(self)
    }

    fn scaled_ball(&self, t: f64, radius: f64, spacing: f64) -> SampledSurface {
        let dims = PlaneN::dims(self);
        let d = dims.ambient();
        let root = t.sqrt();
        let base: Vec<f64> = self.base().iter().map(|x| root * x).collect();
        // foot of the perpendicular from the origin
        let mut foot = base.clone();
        for i in 0..dims.n {
            let f = self.frame_vector(i);
            let c = dot(&base, f);
            foot.iter_mut().zip(f).for_each(|(x, e)| *x -= c * e);
        }
        let rest2 = radius * radius - dot(&foot, &foot);
        let empty = || SampledSurface::new(dims, Vec::new(), Vec::new(), spacing).expect("empty sample set");
        if rest2 <= spacing * spacing {
            return empty();
        }
        let plane = PlaneN::new(dims, foot, self.frame().to_vec()).expect("orthonormal frame");
        match sample_plane_disk(&plane, rest2.sqrt(), spacing) {
            Ok(s) => s.restrict_ball(&vec![0.0; d], radius),
            Err(_) => empty(),
        }
    }
}

fn check_times(t_list: &[f64], min_len: usize) -> Result<()> {
    if t_list.len() < min_len {
        return Err(Error::InvalidArgument(format!("need at least {min_len} times, got {}", t_list.len())));
    }
    if t_list.iter().any(|t| !(*t > 0.0)) || t_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("times must be positive and strictly decreasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeExtraction {
    pub cone: ConeApprox,
    /// Hausdorff distances between consecutive rescalings.
    pub steps: Vec<f64>,
}

/// Link of the cone approached by `sqrt(t) Σ` as `t` decreases along
/// `t_list`: the last rescaling's samples in the shell `R/2 <= |x| <= R`,
/// normalized and merged within `LINK_MERGE_TOL`.
pub fn cone_extract(sigma: &impl ScaledFamily, t_list: &[f64], radius: f64, spacing: f64) -> Result<ConeExtraction> {
    check_times(t_list, 4)?;
    let dims = sigma.dims();
    let d = dims.ambient();
    let sets: Vec<SampledSurface> = t_list.par_iter().map(|&t| sigma.scaled_ball(t, radius, spacing)).collect();
    let steps =
        sets.windows(2).map(|w| hausdorff_distance(w[0].points(), w[1].points(), d)).collect::<Result<Vec<f64>>>()?;
    let floor = 3.0 * spacing;
    let increases = steps.windows(2).filter(|w| w[1] > w[0] && w[1] > floor).count();
    if increases >= 2 {
        return Err(Error::NotCauchy(format!("consecutive distances increased {increases} times: {steps:?}")));
    }
    let last = sets.last().expect("checked length");
    let shell = (radius.powi(dims.n as i32) - (0.5 * radius).powi(dims.n as i32)) / dims.n as f64;
    let cos_tol = LINK_MERGE_TOL.cos();
    // representatives bucketed by direction cells of width LINK_MERGE_TOL;
    // the lowest matching index wins, as in a linear scan
    let cell = |u: &[f64]| -> Vec<i64> { u.iter().map(|x| (x / LINK_MERGE_TOL).floor() as i64).collect() };
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut reps: Vec<Vec<f64>> = Vec::new();
    let mut sums: Vec<Vec<f64>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (p, w) in last.iter() {
        let r = norm(p);
        if r < 0.5 * radius || r > radius {
            continue;
        }
        let u: Vec<f64> = p.iter().map(|x| x / r).collect();
        let key = cell(&u);
        let mut found: Option<usize> = None;
        for offset in 0..3usize.pow(d as u32) {
            let mut k = key.clone();
            let mut o = offset;
            for c in k.iter_mut() {
                *c += (o % 3) as i64 - 1;
                o /= 3;
            }
            if let Some(list) = buckets.get(&k) {
                for &j in list {
                    if dot(&reps[j], &u) >= cos_tol && found.is_none_or(|f| j < f) {
                        found = Some(j);
                    }
                }
            }
        }
        match found {
            Some(j) => {
                sums[j].iter_mut().zip(&u).for_each(|(a, b)| *a += w * b);
                weights[j] += w / shell;
            }
            None => {
                buckets.entry(key).or_default().push(reps.len());
                sums.push(u.iter().map(|x| w * x).collect());
                reps.push(u);
                weights.push(w / shell);
            }
        }
    }
    if weights.is_empty() {
        return Err(Error::NoSurfaceInBall);
    }
    let dirs: Vec<f64> = sums.concat();
    Ok(ConeExtraction { cone: ConeApprox::new(dims, &dirs, weights)?, steps })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    /// `(t_i, d_i)` in the given order.
    pub samples: Vec<(f64, f64)>,
    /// Whether each sample sits above the resolution floor.
    pub kept: Vec<bool>,
    /// `3 * spacing`.
    pub floor: f64,
    /// Fitted `p` in `d = C t^p`; `None` when every sample is at the floor.
    pub exponent: Option<f64>,
    pub coefficient: Option<f64>,
    /// Every distance is below the floor: `sqrt(t) Σ` already is the cone.
    pub exact: bool,
}

/// Distances `dist_H(sqrt(t) Σ ∩ B_R, C ∩ B_R)` and a least-squares fit of
/// `log d` against `log t`, dropping samples below three spacings.
pub fn convergence_rate_fit(
    sigma: &impl ScaledFamily,
    cone: &ConeApprox,
    radius: f64,
    t_list: &[f64],
    spacing: f64,
) -> Result<RateFit> {
    check_times(t_list, 6)?;
    if t_list[0] > 1.0 {
        return Err(Error::InvalidArgument("times must lie in (0, 1]".into()));
    }
    let d = sigma.dims().ambient();
    let cone_pts = cone.sample_ball(radius, spacing);
    let dists = t_list
        .par_iter()
        .map(|&t| hausdorff_distance(sigma.scaled_ball(t, radius, spacing).points(), &cone_pts, d))
        .collect::<Result<Vec<f64>>>()?;
    let floor = 3.0 * spacing;
    let kept: Vec<bool> = dists.iter().map(|&x| x >= floor).collect();
    let survivors = kept.iter().filter(|&&k| k).count();
    let samples: Vec<(f64, f64)> = t_list.iter().copied().zip(dists).collect();
    if survivors == 0 {
        return Ok(RateFit { samples, kept, floor, exponent: None, coefficient: None, exact: true });
    }
    if survivors < 4 {
        return Err(Error::ResolutionFloor { survivors, total: t_list.len() });
    }
    let pts: Vec<(f64, f64)> =
        samples.iter().zip(&kept).filter(|(_, &k)| k).map(|((t, d), _)| (t.ln(), d.ln())).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx).powi(2), b + (x - mx) * (y - my)));
    let p = sxy / sxx;
    let c = (my - p * mx).exp();
    Ok(RateFit { samples, kept, floor, exponent: Some(p), coefficient: Some(c), exact: false })
}

/// `dist_H(sqrt(t1) Σ ∩ B_R, sqrt(t2) Σ ∩ B_R) / sqrt(t1 - t2)`.
pub fn scaling_step_probe(sigma: &impl ScaledFamily, t1: f64, t2: f64, radius: f64, spacing: f64) -> Result<f64> {
    if !(t1 > t2 && t2 > 0.0 && t1 <= 1.0) {
        return Err(Error::InvalidArgument("need 1 >= t1 > t2 > 0".into()));
    }
    let d = sigma.dims().ambient();
    let a = sigma.scaled_ball(t1, radius, spacing);
    let b = sigma.scaled_ball(t2, radius, spacing);
    Ok(hausdorff_distance(a.points(), b.points(), d)? / (t1 - t2).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaRatio {
    pub t: f64,
    /// `H^n(B_{gamma sqrt t}(y) ∩ C) / (omega_n (gamma^2 t)^{n/2})`.
    pub ratio: f64,
}

/// Normalized cone mass in shrinking balls about `y`, measured with radial
/// cells of width `gamma sqrt(t_min) / 100`.
pub fn area_ratio_probe(cone: &ConeApprox, y: &[f64], gamma: f64, t_list: &[f64]) -> Result<Vec<AreaRatio>> {
    check_times(t_list, 1)?;
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument("gamma must be positive".into()));
    }
    let dims = cone.dims();
    let n = dims.n;
    let rho_min = gamma * t_list.last().expect("checked").sqrt();
    let spacing = rho_min / 100.0;
    if cone.distance(y) > 1e-6 * (1.0 + norm(y)) {
        return Err(Error::InvalidArgument("probe point is not on the cone".into()));
    }
    if n >= 2 {
        // neighbouring link directions must resolve the smallest ball
        let mut gap: f64 = 0.0;
        for (i, u) in cone.directions().enumerate() {
            let nearest = cone
                .directions()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| dot(u, v).clamp(-1.0, 1.0).acos())
                .fold(f64::INFINITY, f64::min);
            gap = gap.max(nearest);
        }
        if (norm(y) + rho_min) * gap > 0.25 * rho_min {
            return Err(Error::InsufficientResolution(format!(
                "link directions {gap:.3e} rad apart cannot resolve balls of radius {rho_min:.3e}; refine the link sampling"
            )));
        }
    }
    let omega = unit_ball_volume(n);
    Ok(t_list
        .iter()
        .map(|&t| {
            let rho = gamma * t.sqrt();
            let (_, w) = cone.quadrature_near(y, rho, spacing);
            AreaRatio { t, ratio: w.iter().sum::<f64>() / (omega * rho.powi(n as i32)) }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportCheck {
    /// `2 C_fit sqrt(t)`.
    pub tolerance: f64,
    /// Largest distance from a cone sample to `sqrt(t) Σ`.
    pub cone_to_surface: f64,
    /// Largest distance from a `sqrt(t) Σ` sample to the cone samples.
    pub surface_to_cone: f64,
    pub holds: bool,
}

/// Two-sided check that `sqrt(t) Σ` and the cone lie within
/// `2 C_fit sqrt(t)` of each other inside `B_R`.
pub fn support_check(
    sigma: &impl ScaledFamily,
    cone: &ConeApprox,
    t: f64,
    radius: f64,
    c_fit: f64,
    spacing: f64,
) -> Result<SupportCheck> {
    let d = sigma.dims().ambient();
    let tolerance = 2.0 * c_fit * t.sqrt();
    let surface = sigma.scaled_ball(t, radius, spacing);
    let cone_pts = cone.sample_ball(radius, spacing);
    let cone_to_surface = directed_hausdorff(&cone_pts, surface.points(), d)?;
    let surface_to_cone = directed_hausdorff(surface.points(), &cone_pts, d)?;
    let holds = cone_to_surface <= tolerance && surface_to_cone <= tolerance;
    Ok(SupportCheck { tolerance, cone_to_surface, surface_to_cone, holds })
}

/// Distance from `x` to the cone and to the nearest sample of
/// `sqrt(t) Σ ∩ B_R`.
pub fn off_cone_clearance(
    sigma: &impl ScaledFamily,
    cone: &ConeApprox,
    x: &[f64],
    t: f64,
    radius: f64,
    spacing: f64,
) -> (f64, f64) {
    let d = sigma.dims().ambient();
    let surface = sigma.scaled_ball(t, radius, spacing);
    let index = PointIndex::new(surface.points(), d);
    (cone.distance(x), index.nearest_dist2(x).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> PlaneN {
        PlaneN::spanned_by(Dims::new(1, 1).unwrap(), vec![0.0, 0.0], &[1.0, 0.5]).unwrap()
    }

    #[test]
    fn plane_cone_is_itself() {
        let t: Vec<f64> = (0..6).map(|i| 0.5f64.powi(i)).collect();
        let ex = cone_extract(&line(), &t, 2.0, 0.01).unwrap();
        assert_eq!(ex.cone.len(), 2);
        let u = ex.cone.direction(0);
        let v = ex.cone.direction(1);
        assert!((dot(u, v) + 1.0).abs() < 1e-12);
        assert!((u[1] / u[0] - 0.5).abs() < 1e-9);
        for w in ex.cone.weights() {
            assert!((w - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn plane_rate_fit_is_exact() {
        let t: Vec<f64> = (0..6).map(|i| 0.1f64.powf(i as f64 / 2.0 + 1.0)).collect();
        let ex = cone_extract(&line(), &t, 2.0, 0.01).unwrap();
        let fit = convergence_rate_fit(&line(), &ex.cone, 2.0, &t, 0.01).unwrap();
        assert!(fit.exact);
        assert_eq!(fit.exponent, None);
        assert_eq!(scaling_step_probe(&line(), 0.5, 0.25, 2.0, 0.01).unwrap(), 0.0);
        let sc = support_check(&line(), &ex.cone, 1e-4, 2.0, 0.0, 0.01).unwrap();
        assert!(sc.cone_to_surface <= 0.01 && sc.surface_to_cone <= 0.01);
    }

    #[test]
    fn line_area_ratios() {
        let dims = Dims::new(1, 1).unwrap();
        let t = [0.1, 0.01, 1e-3];
        for dirs in [[1.0, 0.0, -1.0, 0.0], [1.0, 1.0, -1.0, 1.0]] {
            let cone = ConeApprox::new(dims, &dirs, vec![1.0, 1.0]).unwrap();
            for r in area_ratio_probe(&cone, &[0.0, 0.0], 1.0, &t).unwrap() {
                assert!((r.ratio - 1.0).abs() <= 0.05, "{}", r.ratio);
            }
        }
        let cone = ConeApprox::new(dims, &[1.0, 0.0, -1.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(area_ratio_probe(&cone, &[0.0, 1.0], 1.0, &t).is_err());
    }

    #[test]
    fn rejects_bad_time_lists() {
        assert!(cone_extract(&line(), &[0.1, 0.2, 0.05, 0.01], 1.0, 0.01).is_err());
        assert!(cone_extract(&line(), &[0.1, 0.05], 1.0, 0.01).is_err());
    }
}
