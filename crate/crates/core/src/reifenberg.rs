//! Best-fit planes at a point and scale, and the Reifenberg planar
//! distance sampled over points and dyadic scales.

use crate::error::{Error, Result};
use crate::geom::vec::{dist2, dot};
use crate::geom::{Dims, PlaneN, PointIndex, SampledSurface};
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

/// Pattern search stops once the angular step falls below this.
const MIN_STEP: f64 = 2e-4;
const MAX_EVALS: usize = 4000;

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarScore {
    pub p: Vec<f64>,
    pub radius: f64,
    /// Plane through `p`.
    pub plane: PlaneN,
    /// Hausdorff distance between the plane and the surface inside
    /// `B_R(p)`, divided by `R`.
    pub score: f64,
    /// Score of the principal-component plane the search started from.
    pub pca_score: f64,
}

/// Disk lattice spacing on the plane side for a surface of spacing `h`.
pub fn disk_spacing(n: usize, h: f64, radius: f64) -> f64 {
    let cap = if n == 1 { 512.0 } else { 64.0 };
    h.max(radius / cap)
}

/// Offsets of the disk lattice `h Z^n ∩ B_R` in frame coordinates. No rim
/// points: surface samples stop up to a spacing short of the sphere.
fn disk_offsets(n: usize, radius: f64, h: f64) -> Vec<f64> {
    let m = (radius / h).floor() as i64;
    let mut out = Vec::new();
    match n {
        1 => {
            for i in -m..=m {
                out.push(i as f64 * h);
            }
        }
        2 => {
            for i in -m..=m {
                for j in -m..=m {
                    let (x, y) = (i as f64 * h, j as f64 * h);
                    if x * x + y * y <= radius * radius {
                        out.extend([x, y]);
                    }
                }
            }
        }
        _ => unreachable!("planes of dimension {n}"),
    }
    // rim first: far lattice points usually decide the maximum
    let mut pts: Vec<&[f64]> = out.chunks(n).collect();
    pts.sort_by(|a, b| dot(b, b).total_cmp(&dot(a, a)));
    pts.concat()
}

/// Orthonormal basis of `R^d` (rows), principal directions first.
fn pca_basis(rel: &[f64], weights: &[f64], d: usize) -> Vec<f64> {
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for (v, w) in rel.chunks(d).zip(weights) {
        for a in 0..d {
            for b in 0..d {
                cov[(a, b)] += w * v[a] * v[b];
            }
        }
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    // stable sort keeps the eigen solver's order on ties
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut basis = Vec::with_capacity(d * d);
    for &i in &order {
        let col = eig.eigenvectors.column(i);
        // sign convention: largest entry positive
        let mut big = 0;
        for a in 0..d {
            if col[a].abs() > col[big].abs() + 1e-12 {
                big = a;
            }
        }
        let s = if col[big] < 0.0 { -1.0 } else { 1.0 };
        basis.extend(col.iter().map(|x| s * x));
    }
    basis
}

/// Tangent frame after rotating tangent row `i` towards normal row `n + j`
/// by `angles[i * k + j]`.
fn rotated_frame(basis: &[f64], dims: Dims, angles: &[f64]) -> Vec<f64> {
    let (n, k, d) = (dims.n, dims.k, dims.ambient());
    let mut b = basis.to_vec();
    for i in 0..n {
        for j in 0..k {
            let (c, s) = (angles[i * k + j].cos(), angles[i * k + j].sin());
            let (ri, rj) = (i * d, (n + j) * d);
            for a in 0..d {
                let (x, y) = (b[ri + a], b[rj + a]);
                b[ri + a] = c * x + s * y;
                b[rj + a] = -s * x + c * y;
            }
        }
    }
    b.truncate(n * d);
    b
}

struct Ball<'a> {
    dims: Dims,
    radius: f64,
    rel: &'a [f64],
    norms2: Vec<f64>,
    /// Samples within one spacing of the ball, indexed for the plane side.
    halo: &'a [f64],
    /// Tangent frames of the halo samples, when the surface carries them.
    frames: Option<Vec<f64>>,
    /// Half-width of the tangent piece each framed sample stands for.
    reach: f64,
    index: PointIndex<'a>,
    offsets: Vec<f64>,
}

impl Ball<'_> {
    /// `R * score` for `frame`, or any value `>= cutoff` once the running
    /// maximum passes it.
    fn hausdorff(&self, frame: &[f64], cutoff: f64) -> f64 {
        let (n, d) = (self.dims.n, self.dims.ambient());
        let r = self.radius;
        let mut worst: f64 = 0.0;
        for (v, &v2) in self.rel.chunks(d).zip(&self.norms2) {
            let t2: f64 = frame.chunks(d).map(|f| dot(v, f).powi(2)).sum();
            let n2 = (v2 - t2).max(0.0);
            let t = t2.sqrt();
            let dd = if t <= r { n2 } else { (t - r).powi(2) + n2 };
            if dd > worst * worst {
                worst = dd.sqrt();
                if worst >= cutoff {
                    return worst;
                }
            }
        }
        let mut x = vec![0.0; d];
        for c in self.offsets.chunks(n) {
            x.iter_mut().for_each(|v| *v = 0.0);
            for (ca, f) in c.iter().zip(frame.chunks(d)) {
                x.iter_mut().zip(f).for_each(|(v, fa)| *v += ca * fa);
            }
            let dd = self.surface_dist2(&x);
            if dd > worst * worst {
                worst = dd.sqrt();
                if worst >= cutoff {
                    return worst;
                }
            }
        }
        worst
    }

    /// Squared distance to the nearest sample, or to its tangent piece.
    fn surface_dist2(&self, x: &[f64]) -> f64 {
        let (i, dd) = self.index.nearest(x);
        let Some(frames) = &self.frames else {
            return dd;
        };
        let (n, d) = (self.dims.n, self.dims.ambient());
        let v: Vec<f64> = x.iter().zip(&self.halo[i * d..(i + 1) * d]).map(|(a, b)| a - b).collect();
        let t2: f64 = frames[i * n * d..(i + 1) * n * d].chunks(d).map(|f| dot(&v, f).powi(2)).sum();
        let n2 = (dd - t2).max(0.0);
        let t = t2.sqrt();
        if t <= self.reach {
            n2
        } else {
            (t - self.reach).powi(2) + n2
        }
    }
}

/// Coordinate pattern search on rotation angles; accepts strict
/// improvements only.
fn pattern_search(ball: &Ball, basis: &[f64], start: &[f64], step0: f64, evals: &mut usize) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut fx = ball.hausdorff(&rotated_frame(basis, ball.dims, &x), f64::INFINITY);
    *evals += 1;
    let mut step = step0;
    while step >= MIN_STEP && *evals < MAX_EVALS {
        let mut improved = false;
        for a in 0..x.len() {
            for s in [1.0, -1.0] {
                let mut y = x.clone();
                y[a] += s * step;
                let fy = ball.hausdorff(&rotated_frame(basis, ball.dims, &y), fx);
                *evals += 1;
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

/// Best plane through `p` at scale `R`: principal components of the
/// weighted surface samples in `B_R(p)`, refined by local search over
/// small rotations with three restarts.
pub fn best_plane(s: &SampledSurface, p: &[f64], radius: f64) -> Result<PlanarScore> {
    let dims = s.dims();
    let (n, k, d) = (dims.n, dims.k, dims.ambient());
    if p.len() != d {
        return Err(Error::InvalidArgument("point has wrong dimension".into()));
    }
    if n > 2 {
        return Err(Error::UnsupportedDims { n, k });
    }
    if !(radius >= 4.0 * s.spacing()) {
        return Err(Error::InsufficientResolution(format!(
            "scale {radius} below four sample spacings ({})",
            s.spacing()
        )));
    }
    let r2 = radius * radius;
    let outer2 = (radius + s.spacing()).powi(2);
    let mut rel = Vec::new();
    let mut weights = Vec::new();
    let mut halo = Vec::new();
    let mut frames = Vec::new();
    for (i, (q, w)) in s.iter().enumerate() {
        let q2 = dist2(q, p);
        if q2 > outer2 {
            continue;
        }
        let v = q.iter().zip(p).map(|(a, b)| a - b);
        if q2 <= r2 {
            rel.extend(v.clone());
            weights.push(w);
        }
        halo.extend(v);
        if let Some(f) = s.frame(i) {
            frames.extend_from_slice(f);
        }
    }
    let frames = (frames.len() == halo.len() * n).then_some(frames);
    if weights.is_empty() {
        return Err(Error::NoSurfaceInBall);
    }
    let basis = pca_basis(&rel, &weights, d);
    let ball = Ball {
        dims,
        radius,
        rel: &rel,
        norms2: rel.chunks(d).map(|v| dot(v, v)).collect(),
        halo: &halo,
        frames,
        reach: 0.5 * (n as f64).sqrt() * s.spacing(),
        index: PointIndex::new(&halo, d),
        offsets: disk_offsets(n, radius, disk_spacing(n, s.spacing(), radius)),
    };
    let m = n * k;
    let zero = vec![0.0; m];
    let pca = ball.hausdorff(&rotated_frame(&basis, dims, &zero), f64::INFINITY);
    // coarse scan of rotation angles, then local search from the three best
    let g: usize = if m == 1 { 32 } else { 12 };
    let cell = std::f64::consts::PI / g as f64;
    let mut coarse: Vec<(f64, Vec<f64>)> = Vec::new();
    // only the three best matter, so later cells may stop early
    let mut podium = [f64::INFINITY; 3];
    for flat in 0..g.pow(m as u32) {
        let angles: Vec<f64> =
            (0..m).map(|a| (flat / g.pow(a as u32) % g) as f64 * cell - 0.5 * std::f64::consts::PI).collect();
        let f = ball.hausdorff(&rotated_frame(&basis, dims, &angles), podium[2]);
        if f < podium[2] {
            podium[2] = f;
            podium.sort_by(f64::total_cmp);
        }
        coarse.push((f, angles));
    }
    // stable: ties keep scan order
    coarse.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut evals = 0;
    let (mut bx, mut bf) = (zero, pca);
    for (_, start) in coarse.iter().take(3) {
        let (x, f) = pattern_search(&ball, &basis, start, 0.5 * cell, &mut evals);
        if f < bf {
            bx = x;
            bf = f;
        }
    }
    let plane = PlaneN::new(dims, p.to_vec(), rotated_frame(&basis, dims, &bx))
        .or_else(|_| PlaneN::spanned_by(dims, p.to_vec(), &rotated_frame(&basis, dims, &bx)))?;
    Ok(PlanarScore { p: p.to_vec(), radius, plane, score: bf / radius, pca_score: pca / radius })
}

/// Dyadic scales `R_max / 2^j` down to four sample spacings, increasing.
pub fn dyadic_radii(spacing: f64, r_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = r_max;
    while r >= 4.0 * spacing {
        out.push(r);
        r *= 0.5;
    }
    out.reverse();
    out
}

/// Every `stride`-th sample index.
pub fn default_p_samples(s: &SampledSurface, stride: usize) -> Vec<usize> {
    (0..s.len()).step_by(stride.max(1)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarDistance {
    pub estimate: f64,
    pub worst: PlanarScore,
    /// One score per admissible `(p, R)`, `p`-major in the given order.
    pub scores: Vec<PlanarScore>,
    /// Cells that failed, with the reason.
    pub skipped: Vec<(usize, f64, Error)>,
}

/// Largest best-plane score over the sampled points and scales. Failing
/// cells are skipped; the result is an error only when all of them fail.
pub fn planar_distance(s: &SampledSurface, p_samples: &[usize], radii: &[f64]) -> Result<PlanarDistance> {
    if p_samples.is_empty() || radii.is_empty() {
        return Err(Error::InvalidArgument("planar distance needs points and scales".into()));
    }
    if let Some(&i) = p_samples.iter().find(|&&i| i >= s.len()) {
        return Err(Error::InvalidArgument(format!("sample index {i} out of range")));
    }
    let cells: Vec<(usize, f64)> = p_samples.iter().flat_map(|&i| radii.iter().map(move |&r| (i, r))).collect();
    let results: Vec<Result<PlanarScore>> = cells.par_iter().map(|&(i, r)| best_plane(s, s.point(i), r)).collect();
    let mut scores = Vec::new();
    let mut skipped = Vec::new();
    for ((i, r), res) in cells.into_iter().zip(results) {
        match res {
            Ok(sc) => scores.push(sc),
            Err(e) => skipped.push((i, r, e)),
        }
    }
    let mut worst: Option<&PlanarScore> = None;
    for sc in &scores {
        if worst.is_none_or(|w| sc.score > w.score) {
            worst = Some(sc);
        }
    }
    let Some(worst) = worst.cloned() else {
        return Err(skipped.swap_remove(0).2);
    };
    Ok(PlanarDistance { estimate: worst.score, worst, scores, skipped })
}
