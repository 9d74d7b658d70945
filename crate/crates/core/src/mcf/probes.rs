use super::FlowTrack;
use crate::error::{Error, Result};
use crate::gaussian::density_ratio;
use crate::geom::vec::dist2;
use crate::geom::{unit_ball_volume, PointIndex, SampledSurface, Surface};

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    /// `(r, Theta(r))` in increasing `r`.
    pub rows: Vec<(f64, f64)>,
    /// Largest `Theta(r1) - Theta(r2)` over `r1 < r2`, or 0.
    pub max_violation: f64,
    /// Radii with `t0 - r^2` outside the track.
    pub skipped: Vec<f64>,
}

/// Gaussian density ratios at `(x0, t0)` for every admissible radius.
pub fn monotonicity_probe(track: &FlowTrack, x0: &[f64], t0: f64, radii: &[f64]) -> Result<MonotonicityReport> {
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for r in sorted {
        match density_ratio(track, x0, t0, r, None) {
            Ok(theta) => rows.push((r, theta)),
            Err(Error::BeforeInitialTime { .. }) | Err(Error::AfterFinalTime(_)) => skipped.push(r),
            Err(e) => return Err(e),
        }
    }
    let mut max_violation: f64 = 0.0;
    let mut running_max = f64::NEG_INFINITY;
    for &(_, theta) in &rows {
        max_violation = max_violation.max(running_max - theta);
        running_max = running_max.max(theta);
    }
    Ok(MonotonicityReport { rows, max_violation, skipped })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearingOut {
    /// Mass of `B_r(x0)` one parabolic step `r^2` before `t0`.
    pub mass_minus: f64,
    /// Mass of `B_r(x0)` one parabolic step after `t0`.
    pub mass_plus: f64,
    /// `min(mass_minus, mass_plus) / r^n`.
    pub ratio: f64,
}

fn mass_at(track: &FlowTrack, x0: &[f64], t: f64, r: f64) -> Result<f64> {
    let (i, j, theta) = track.bracket(t)?;
    let m = |k: usize| track.sampled(k).restrict_ball(x0, r).total_weight();
    let a = m(i);
    Ok(if i == j { a } else { (1.0 - theta) * a + theta * m(j) })
}

/// Surface mass in `B_r(x0)` at times `t0 - r^2` and `t0 + r^2`.
pub fn clearing_out_probe(track: &FlowTrack, x0: &[f64], t0: f64, r: f64) -> Result<ClearingOut> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("clearing-out radius must be positive".into()));
    }
    if x0.len() != track.dims().ambient() {
        return Err(Error::InvalidArgument("probe centre has wrong dimension".into()));
    }
    let mass_minus = mass_at(track, x0, t0 - r * r, r)?;
    let mass_plus = mass_at(track, x0, t0 + r * r, r)?;
    let ratio = mass_minus.min(mass_plus) / r.powi(track.dims().n as i32);
    Ok(ClearingOut { mass_minus, mass_plus, ratio })
}

/// Normalized clearing-out threshold `omega_n / 2`.
pub fn clearing_out_floor(n: usize) -> f64 {
    0.5 * unit_ball_volume(n)
}

/// Largest discrete `|A|` over interior samples within the closed ball.
pub fn max_curvature_in_ball(surface: &Surface, center: &[f64], radius: f64) -> Result<f64> {
    let r2 = radius * radius;
    let mut best: f64 = 0.0;
    match surface {
        Surface::Polyline(p) => {
            for i in 0..p.len() {
                if !p.is_boundary(i) && dist2(p.vertex(i), center) <= r2 {
                    best = best.max(p.second_fundamental(i)?);
                }
            }
        }
        Surface::Graph(g) => {
            for node in 0..g.node_count() {
                if !g.is_boundary(node) && dist2(&g.node_point(node), center) <= r2 {
                    best = best.max(g.second_fundamental(node)?);
                }
            }
        }
        Surface::Profile(p) => {
            let n = p.n();
            for (i, q) in p.profile().iter().enumerate() {
                let mut x = vec![0.0; n + 1];
                x[0] = q[0];
                x[n] = q[1];
                if !p.is_boundary(i) && dist2(&x, center) <= r2 {
                    best = best.max(p.second_fundamental(i)?);
                }
            }
        }
        Surface::Sampled(_) => {
            return Err(Error::InvalidArgument("point samples carry no curvature".into()));
        }
    }
    Ok(best)
}

/// `|A|` at the interior node nearest to each sample, `NaN` when the
/// surface has no interior nodes. Profile samples are matched in the
/// meridian half-plane `(|x'|, x_{n+1})`.
pub fn curvature_at_samples(surface: &Surface, samples: &SampledSurface) -> Result<Vec<f64>> {
    let mut nodes: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let dim = match surface {
        Surface::Polyline(p) => {
            for i in (0..p.len()).filter(|&i| !p.is_boundary(i)) {
                nodes.extend_from_slice(p.vertex(i));
                values.push(p.second_fundamental(i)?);
            }
            p.dim()
        }
        Surface::Graph(g) => {
            for node in (0..g.node_count()).filter(|&i| !g.is_boundary(i)) {
                nodes.extend(g.node_point(node));
                values.push(g.second_fundamental(node)?);
            }
            g.dims().ambient()
        }
        Surface::Profile(p) => {
            for (i, q) in p.profile().iter().enumerate() {
                if !p.is_boundary(i) {
                    if let Ok(a) = p.second_fundamental(i) {
                        nodes.extend(q);
                        values.push(a);
                    }
                }
            }
            2
        }
        Surface::Sampled(_) => {
            return Err(Error::InvalidArgument("point samples carry no curvature".into()));
        }
    };
    if values.is_empty() {
        return Ok(vec![f64::NAN; samples.len()]);
    }
    let index = PointIndex::new(&nodes, dim);
    let meridian = matches!(surface, Surface::Profile(_));
    Ok((0..samples.len())
        .map(|i| {
            let p = samples.point(i);
            let q = if meridian {
                let (last, rest) = p.split_last().expect("nonempty sample");
                vec![rest.iter().map(|x| x * x).sum::<f64>().sqrt(), *last]
            } else {
                p.to_vec()
            };
            values[index.nearest(&q).0]
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureBound {
    /// `(t, sup |A|, sqrt(t) sup |A|)` per probed recorded time.
    pub rows: Vec<(f64, f64, f64)>,
    /// Largest `sqrt(t) sup |A|`.
    pub empirical_c: f64,
}

/// `sup |A|` inside the ball at the recorded times closest to `times`.
pub fn curvature_bound_probe(track: &FlowTrack, center: &[f64], radius: f64, times: &[f64]) -> Result<CurvatureBound> {
    let mut rows = Vec::with_capacity(times.len());
    let mut empirical_c: f64 = 0.0;
    for &t in times {
        let i = track.nearest_index(t);
        let ti = track.times()[i];
        let a = max_curvature_in_ball(track.state(i), center, radius)?;
        let c = (ti - track.start_time()).max(0.0).sqrt() * a;
        empirical_c = empirical_c.max(c);
        rows.push((ti, a, c));
    }
    Ok(CurvatureBound { rows, empirical_c })
}
