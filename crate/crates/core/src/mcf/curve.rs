use super::{drive, FlowConfig, FlowTrack, StopReason};
use crate::error::{Error, Result};
use crate::geom::{Polyline, Surface};

/// Curve shortening flow: each vertex moves with its discrete curvature
/// vector; fixed ends stay put; the curve is remeshed after every step.
pub fn flow_polyline_csf(init: &Polyline, cfg: &FlowConfig) -> Result<FlowTrack> {
    cfg.validate()?;
    if !init.closed() && !init.boundary_fixed() {
        return Err(Error::InvalidArgument("open polylines need fixed ends to flow".into()));
    }
    let h_min = cfg.h_min.unwrap_or_else(|| init.total_length() / init.edge_count() as f64);
    // edges may shrink to h_min / 2 before they are collapsed
    let dt = cfg.step(cfg.dt_safety * (0.5 * h_min).powi(2))?;
    let boundary = (!init.closed()).then(|| [init.vertex(0), init.vertex(init.len() - 1)].concat());
    let mut track = FlowTrack::new(Surface::Polyline(init.clone()), h_min, boundary);
    let mut state = init.clone();
    state.remesh(h_min);
    let mut velocity: Vec<f64> = Vec::new();
    let kappa_max = 1.0 / (5.0 * h_min);
    drive(
        &mut state,
        cfg,
        dt,
        &mut track,
        |s| Surface::Polyline(s.clone()),
        |s, dt| {
            let k_max = curvature_velocity(s, &mut velocity);
            for (x, v) in s.vertices_mut().iter_mut().zip(&velocity) {
                *x += dt * v;
            }
            s.remesh(h_min);
            let radius = s.enclosing_radius();
            if s.closed() && (radius < 3.0 * h_min || s.len() <= 3) {
                return Ok(Some(StopReason::Extinction));
            }
            if k_max > kappa_max && radius >= 10.0 * h_min {
                return Ok(Some(StopReason::Singularity));
            }
            Ok(None)
        },
        |s, t, events| {
            if events.self_intersection.is_none() && s.self_intersects() {
                events.self_intersection = Some(t);
            }
        },
    )?;
    Ok(track)
}

/// Fills `out` with the curvature vector of every vertex (zero at fixed
/// ends) and returns the largest curvature.
fn curvature_velocity(s: &Polyline, out: &mut Vec<f64>) -> f64 {
    let d = s.dim();
    let m = s.len();
    let v = s.vertices();
    out.clear();
    out.resize(m * d, 0.0);
    let mut k_max: f64 = 0.0;
    for i in 0..m {
        if s.is_boundary(i) {
            continue;
        }
        let ip = (i + m - 1) % m;
        let iq = (i + 1) % m;
        let (p, h, q) = (&v[ip * d..ip * d + d], &v[i * d..i * d + d], &v[iq * d..iq * d + d]);
        let mut lp = 0.0;
        let mut lq = 0.0;
        for a in 0..d {
            lp += (h[a] - p[a]) * (h[a] - p[a]);
            lq += (q[a] - h[a]) * (q[a] - h[a]);
        }
        let (lp, lq) = (lp.sqrt(), lq.sqrt());
        let c = 2.0 / (lp + lq);
        let mut k2 = 0.0;
        for a in 0..d {
            let k = c * ((q[a] - h[a]) / lq - (h[a] - p[a]) / lp);
            out[i * d + a] = k;
            k2 += k * k;
        }
        k_max = k_max.max(k2.sqrt());
    }
    k_max
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_segment_is_stationary() {
        let seg = Polyline::segment(&[0.0, 0.0], &[1.0, 0.5], 50);
        let track = flow_polyline_csf(&seg, &FlowConfig::new(0.01, 0.005)).unwrap();
        let Surface::Polyline(last) = track.states().last().unwrap() else { panic!() };
        for (a, b) in last.vertices().iter().zip(seg.vertices()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn open_free_curve_is_rejected() {
        let p = Polyline::new(2, vec![0.0, 0.0, 1.0, 0.0, 2.0, 1.0], false, false).unwrap();
        assert!(flow_polyline_csf(&p, &FlowConfig::new(0.1, 0.1)).is_err());
    }
}
