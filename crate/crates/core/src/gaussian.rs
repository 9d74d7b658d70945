//! Gaussian surface area, entropy, Gaussian density ratios along flows and
//! the truncation radius for Gaussian quadrature.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::vec::dist2;
use crate::geom::{Dims, SampledSurface, Similarity};
use crate::mcf::FlowTrack;

/// Centre `x0` and scale `t0 > 0` of a backward heat kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianCenter {
    pub x0: Vec<f64>,
    pub t0: f64,
}

impl GaussianCenter {
    pub fn new(x0: Vec<f64>, t0: f64) -> Result<Self> {
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::InvalidArgument(format!("Gaussian scale t0 must be positive, got {t0}")));
        }
        Ok(GaussianCenter { x0, t0 })
    }
}

fn kernel_sum(s: &SampledSurface, x0: &[f64], t0: f64, mut cutoff: impl FnMut(f64) -> f64) -> f64 {
    let n = s.dims().n as f64;
    let norm = (4.0 * PI * t0).powf(-n / 2.0);
    let inv = 1.0 / (4.0 * t0);
    let mut sum = 0.0;
    for (p, w) in s.iter() {
        let r2 = dist2(p, x0);
        let c = cutoff(r2);
        if c > 0.0 {
            sum += c * w * (-r2 * inv).exp();
        }
    }
    norm * sum
}

fn check_center(s: &SampledSurface, c: &GaussianCenter) -> Result<()> {
    if !(c.t0 > 0.0) {
        return Err(Error::InvalidArgument(format!("Gaussian scale t0 must be positive, got {}", c.t0)));
    }
    if c.x0.len() != s.ambient() {
        return Err(Error::InvalidArgument("Gaussian centre has wrong dimension".into()));
    }
    Ok(())
}

/// `F[S] = sum_i w_i (4 pi t0)^{-n/2} exp(-|p_i - x0|^2 / 4 t0)`.
pub fn f_functional(s: &SampledSurface, c: &GaussianCenter) -> Result<f64> {
    check_center(s, c)?;
    Ok(kernel_sum(s, &c.x0, c.t0, |_| 1.0))
}

/// The part of `F` carried by samples outside the closed ball of radius
/// `radius * sqrt(t0)` about `x0`.
pub fn gaussian_tail(s: &SampledSurface, c: &GaussianCenter, radius: f64) -> Result<f64> {
    check_center(s, c)?;
    let cut2 = radius * radius * c.t0;
    Ok(kernel_sum(s, &c.x0, c.t0, |r2| if r2 > cut2 { 1.0 } else { 0.0 }))
}

/// Right-hand side of the polynomial-growth tail estimate at radius `r`
/// (in units of `sqrt(t0)`):
/// `e^{1/4} N lambda r^n sum_{i>=0} 2^{(i-1)n} exp(-4^i r^2 / 16)` with
/// `N = 12^{n+k}`.
pub fn tail_bound(dims: Dims, lambda: f64, r: f64) -> f64 {
    let n = dims.n as i32;
    let covering = 12f64.powi((dims.n + dims.k) as i32);
    let mut series = 0.0;
    for i in 0..64 {
        let term = 2f64.powi((i - 1) * n) * (-(4f64.powi(i)) * r * r / 16.0).exp();
        series += term;
        if term < 1e-300 {
            break;
        }
    }
    0.25f64.exp() * covering * lambda * r.powi(n) * series
}

/// Smallest `R = 1.1, 1.2, ...` whose tail bound is at most `eps`.
pub fn truncation_radius(dims: Dims, lambda_bound: f64, eps: f64) -> Result<f64> {
    if !(lambda_bound >= 1.0) {
        return Err(Error::InvalidArgument("entropy bound must be at least 1".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument("tail tolerance must lie in (0, 1)".into()));
    }
    let mut j = 1u32;
    loop {
        let r = f64::from(10 + j) / 10.0;
        if tail_bound(dims, lambda_bound, r) <= eps {
            return Ok(r);
        }
        j += 1;
    }
}

/// Radial cutoff about a centre: `1` on `|x| <= R/2`, `0` beyond `R` and a
/// quintic smoothstep in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffProfile {
    pub radius: f64,
}

impl CutoffProfile {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("cutoff radius must be positive".into()));
        }
        Ok(CutoffProfile { radius })
    }

    /// Value at distance `s` from the centre.
    pub fn value(&self, s: f64) -> f64 {
        let half = 0.5 * self.radius;
        if s <= half {
            1.0
        } else if s >= self.radius {
            0.0
        } else {
            let u = (s - half) / half;
            1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
        }
    }
}

/// Search domain for the entropy supremum: `x0` ranges over a box spanned by
/// orthonormal `axes` about `center`, `t0` over a log-spaced range.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub center: Vec<f64>,
    /// Row-major, one axis per row.
    pub axes: Vec<f64>,
    pub half_widths: Vec<f64>,
    pub points_per_axis: Vec<usize>,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Grid points per non-degenerate axis; defaults to 21 in the plane and
    /// 11 in higher ambient dimensions.
    pub points_per_axis: Option<usize>,
    pub t_count: usize,
    pub refine: bool,
    pub max_sweeps: usize,
    /// Declares the surface complete and noncompact; the reported value is
    /// then at least `1 - eps`.
    pub noncompact_eps: Option<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { points_per_axis: None, t_count: 24, refine: true, max_sweeps: 400, noncompact_eps: None }
    }
}

impl SearchGrid {
    /// Bounding box inflated by 2 about its centre, `t0` from
    /// `(2 spacing)^2` to `10 diam^2`.
    pub fn for_surface(s: &SampledSurface, cfg: &SearchConfig) -> Result<Self> {
        let (lo, hi) = s.bounding_box().ok_or_else(|| Error::Degenerate("empty surface".into()))?;
        let diam = s.extent();
        if s.len() < 2 || !(diam > 0.0) {
            return Err(Error::Degenerate("entropy needs at least two distinct samples".into()));
        }
        let d = s.ambient();
        let m = cfg.points_per_axis.unwrap_or(if d <= 2 { 21 } else { 11 }).max(1);
        let mut axes = vec![0.0; d * d];
        for a in 0..d {
            axes[a * d + a] = 1.0;
        }
        let center = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut half_widths = Vec::with_capacity(d);
        let mut points_per_axis = Vec::with_capacity(d);
        for a in 0..d {
            let w = hi[a] - lo[a];
            if w <= 1e-12 * diam {
                half_widths.push(0.0);
                points_per_axis.push(1);
            } else {
                half_widths.push(w);
                points_per_axis.push(m);
            }
        }
        let t_min = (2.0 * s.spacing()).powi(2).max(1e-12 * diam * diam);
        let t_max = 10.0 * diam * diam;
        Ok(SearchGrid { center, axes, half_widths, points_per_axis, t_min, t_max, t_count: cfg.t_count.max(1) })
    }

    /// The same grid seen through `x -> scale * Q x + y`.
    pub fn transported(&self, sim: &Similarity) -> SearchGrid {
        let d = self.center.len();
        let axes = self.axes.chunks(d).flat_map(|v| sim.rotate(v)).collect();
        let s2 = sim.scale * sim.scale;
        SearchGrid {
            center: sim.apply(&self.center),
            axes,
            half_widths: self.half_widths.iter().map(|w| w * sim.scale).collect(),
            points_per_axis: self.points_per_axis.clone(),
            t_min: self.t_min * s2,
            t_max: self.t_max * s2,
            t_count: self.t_count,
        }
    }

    fn dim(&self) -> usize {
        self.center.len()
    }

    fn axis_step(&self, a: usize) -> f64 {
        let m = self.points_per_axis[a];
        if m > 1 {
            2.0 * self.half_widths[a] / (m - 1) as f64
        } else {
            0.0
        }
    }

    fn log_t_step(&self) -> f64 {
        if self.t_count > 1 {
            (self.t_max / self.t_min).ln() / (self.t_count - 1) as f64
        } else {
            0.0
        }
    }

    fn t_value(&self, j: usize) -> f64 {
        if self.t_count == 1 {
            self.t_min
        } else if j + 1 == self.t_count {
            self.t_max
        } else {
            (self.t_min.ln() + j as f64 * self.log_t_step()).exp()
        }
    }

    /// Point at grid-axis coordinates `c`.
    fn point(&self, c: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut x = self.center.clone();
        for (a, ca) in c.iter().enumerate() {
            for (xi, ei) in x.iter_mut().zip(&self.axes[a * d..(a + 1) * d]) {
                *xi += ca * ei;
            }
        }
        x
    }

    fn coords(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(
                |(a, &i)| {
                    if self.points_per_axis[a] > 1 {
                        -self.half_widths[a] + i as f64 * self.axis_step(a)
                    } else {
                        0.0
                    }
                },
            )
            .collect()
    }

    /// Every grid cell as (axis coordinates, t index).
    fn cells(&self) -> Vec<(Vec<f64>, usize)> {
        let d = self.dim();
        let mut out = Vec::new();
        let mut idx = vec![0usize; d];
        loop {
            let c = self.coords(&idx);
            for j in 0..self.t_count {
                out.push((c.clone(), j));
            }
            let mut a = 0;
            loop {
                if a == d {
                    return out;
                }
                idx[a] += 1;
                if idx[a] < self.points_per_axis[a] {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    }

    /// Cell widths per axis followed by the `ln t0` step.
    pub fn resolution(&self) -> Vec<f64> {
        let mut r: Vec<f64> = (0..self.dim()).map(|a| self.axis_step(a)).collect();
        r.push(self.log_t_step());
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyBranch {
    /// The supremum was found at a finite centre.
    Attained,
    /// The noncompact floor `1 - eps` exceeded every probed value.
    PlanarLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub value: f64,
    pub argmax: GaussianCenter,
    pub grid_resolution: Vec<f64>,
    pub refined: bool,
    pub branch: EntropyBranch,
    /// Largest F found on the grid before refinement.
    pub grid_value: f64,
    pub probes: usize,
}

/// Orders candidates: larger value first, then smaller `t0`, then
/// lexicographically smaller `x0`.
fn better(a: &(f64, GaussianCenter), b: &(f64, GaussianCenter)) -> bool {
    match a.0.partial_cmp(&b.0) {
        Some(Ordering::Greater) => return true,
        Some(Ordering::Less) => return false,
        _ => {}
    }
    match a.1.t0.partial_cmp(&b.1.t0) {
        Some(Ordering::Less) => return true,
        Some(Ordering::Greater) => return false,
        _ => {}
    }
    for (x, y) in a.1.x0.iter().zip(&b.1.x0) {
        match x.partial_cmp(y) {
            Some(Ordering::Less) => return true,
            Some(Ordering::Greater) => return false,
            _ => {}
        }
    }
    false
}

/// Entropy estimate over the default grid of `s`.
pub fn entropy_sup(s: &SampledSurface, cfg: &SearchConfig) -> Result<EntropyEstimate> {
    let grid = SearchGrid::for_surface(s, cfg)?;
    entropy_sup_on(s, &grid, cfg)
}

/// Grid maximum of `F` followed by coordinate descent in the grid axes and
/// `ln t0`, starting from the best cell.
pub fn entropy_sup_on(s: &SampledSurface, grid: &SearchGrid, cfg: &SearchConfig) -> Result<EntropyEstimate> {
    if s.len() < 2 || !(s.extent() > 0.0) {
        return Err(Error::Degenerate("entropy needs at least two distinct samples".into()));
    }
    if grid.dim() != s.ambient() || !(grid.t_min > 0.0) || !(grid.t_max >= grid.t_min) {
        return Err(Error::InvalidArgument("search grid does not fit the surface".into()));
    }
    let cells = grid.cells();
    let evaluated: Vec<(f64, GaussianCenter)> = cells
        .par_iter()
        .map(|(c, j)| {
            let x0 = grid.point(c);
            let t0 = grid.t_value(*j);
            (kernel_sum(s, &x0, t0, |_| 1.0), GaussianCenter { x0, t0 })
        })
        .collect();
    let mut probes = evaluated.len();
    let mut best_index = 0;
    for i in 1..evaluated.len() {
        if better(&evaluated[i], &evaluated[best_index]) {
            best_index = i;
        }
    }
    let grid_value = evaluated[best_index].0;
    let (start_c, start_j) = cells[best_index].clone();
    let mut best = evaluated.into_iter().nth(best_index).expect("nonempty grid");

    if cfg.refine {
        let d = grid.dim();
        let mut c = start_c;
        let mut sigma = grid.t_value(start_j).ln();
        let (sigma_lo, sigma_hi) = (grid.t_min.ln(), grid.t_max.ln());
        let root_t = best.1.t0.sqrt();
        let mut steps: Vec<f64> = (0..d)
            .map(|a| {
                let h = grid.axis_step(a);
                if h > 0.0 {
                    h
                } else {
                    0.5 * root_t
                }
            })
            .collect();
        steps.push(if grid.log_t_step() > 0.0 { grid.log_t_step() } else { 0.5 });
        let mut halvings = 0;
        for _ in 0..cfg.max_sweeps {
            let mut improved = false;
            for v in 0..=d {
                let mut winner: Option<(f64, GaussianCenter, f64)> = None;
                for sign in [1.0, -1.0] {
                    let delta = sign * steps[v];
                    let (x0, t0, coord) = if v < d {
                        let mut trial = c.clone();
                        trial[v] += delta;
                        (grid.point(&trial), sigma.exp(), trial[v])
                    } else {
                        let s2 = (sigma + delta).clamp(sigma_lo, sigma_hi);
                        (grid.point(&c), s2.exp(), s2)
                    };
                    let value = kernel_sum(s, &x0, t0, |_| 1.0);
                    probes += 1;
                    let cand = (value, GaussianCenter { x0, t0 });
                    let reference = winner.as_ref().map(|w| (w.0, w.1.clone())).unwrap_or_else(|| best.clone());
                    if better(&cand, &reference) && cand.0 > best.0 {
                        winner = Some((cand.0, cand.1, coord));
                    }
                }
                if let Some((value, center, coord)) = winner {
                    if v < d {
                        c[v] = coord;
                    } else {
                        sigma = coord;
                    }
                    best = (value, center);
                    improved = true;
                }
            }
            if !improved {
                for st in steps.iter_mut() {
                    *st *= 0.5;
                }
                halvings += 1;
                if halvings >= 40 {
                    break;
                }
            }
        }
    }

    let mut estimate = EntropyEstimate {
        value: best.0,
        argmax: best.1,
        grid_resolution: grid.resolution(),
        refined: cfg.refine,
        branch: EntropyBranch::Attained,
        grid_value,
        probes,
    };
    if let Some(eps) = cfg.noncompact_eps {
        if estimate.value < 1.0 - eps {
            estimate.value = 1.0 - eps;
            estimate.branch = EntropyBranch::PlanarLimit;
        }
    }
    Ok(estimate)
}

/// Gaussian density ratio of the track at `(x0, t)` and scale `r`: `F` of
/// the surface at time `t - r^2` centred at `(x0, r^2)`, optionally
/// multiplied by a cutoff about `x0`. Between recorded times the two
/// bracketing values are interpolated linearly.
pub fn density_ratio(track: &FlowTrack, x0: &[f64], t: f64, r: f64, cutoff: Option<&CutoffProfile>) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("density ratio scale must be positive".into()));
    }
    let tau = t - r * r;
    let (i, j, theta) = track.bracket(tau)?;
    let eval = |k: usize| -> Result<f64> {
        let s = track.sampled(k);
        if x0.len() != s.ambient() {
            return Err(Error::InvalidArgument("density ratio centre has wrong dimension".into()));
        }
        Ok(match cutoff {
            None => kernel_sum(s, x0, r * r, |_| 1.0),
            Some(phi) => kernel_sum(s, x0, r * r, |r2| phi.value(r2.sqrt())),
        })
    };
    let a = eval(i)?;
    if j == i || theta == 0.0 {
        return Ok(a);
    }
    let b = eval(j)?;
    Ok((1.0 - theta) * a + theta * b)
}
