use super::{drive, FlowConfig, FlowTrack, StopReason};
use crate::error::{Error, Result};
use crate::geom::{ProfileSurface, Surface};

/// Rotationally symmetric mean curvature flow: profile vertices move with
/// the mean curvature vector `kappa - (n-1) (nu_r / r) nu`; axis ends move
/// along the axis with `n kappa`, open ends off the axis are fixed.
pub fn flow_profile_mcf(init: &ProfileSurface, cfg: &FlowConfig) -> Result<FlowTrack> {
    cfg.validate()?;
    let n = init.n();
    let segments = init.len() - 1;
    let h_min = cfg.h_min.unwrap_or_else(|| {
        init.profile().windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum::<f64>() / segments as f64
    });
    let dt = cfg.step(cfg.dt_safety * (0.5 * h_min).powi(2) / n as f64)?;
    let last = init.len() - 1;
    let boundary: Vec<f64> =
        [0, last].iter().filter(|&&i| init.is_boundary(i)).flat_map(|&i| init.profile()[i]).collect();
    let boundary = (!boundary.is_empty()).then_some(boundary);
    let mut track = FlowTrack::new(Surface::Profile(init.clone()), h_min, boundary);
    let mut state = init.clone();
    state.remesh(h_min);
    let kappa_max = 1.0 / (5.0 * h_min);
    let neck = 0.25 * h_min;
    let mut velocity: Vec<[f64; 2]> = Vec::new();
    drive(
        &mut state,
        cfg,
        dt,
        &mut track,
        |s| Surface::Profile(s.clone()),
        |s, dt| {
            velocity.clear();
            let mut k_max: f64 = 0.0;
            for i in 0..s.len() {
                if s.is_boundary(i) {
                    velocity.push([0.0, 0.0]);
                    continue;
                }
                velocity.push(s.mean_curvature_vector(i)?);
                k_max = k_max.max(s.second_fundamental(i)?);
            }
            let m = s.len();
            let mut pinched = false;
            for (i, (p, v)) in s.profile_mut().iter_mut().zip(&velocity).enumerate() {
                p[0] += dt * v[0];
                p[1] += dt * v[1];
                if i != 0 && i + 1 != m && p[0] < neck {
                    pinched = true;
                    p[0] = p[0].max(0.01 * h_min);
                }
            }
            if pinched {
                return Ok(Some(StopReason::Singularity));
            }
            s.remesh(h_min);
            let radius = s.enclosing_radius();
            if radius < 3.0 * h_min || s.len() <= 3 {
                return Ok(Some(StopReason::Extinction));
            }
            if k_max > kappa_max && radius >= 10.0 * h_min {
                return Ok(Some(StopReason::Singularity));
            }
            Ok(None)
        },
        |_, _, _| {},
    )
    .map_err(|e| match e {
        Error::BoundarySample(i) => Error::Degenerate(format!("profile sample {i} left the axis stencil")),
        other => other,
    })?;
    Ok(track)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_extinction_time() {
        // r(t)^2 = r0^2 - 2 n t
        let s = ProfileSurface::sphere(2, 2.0, 0.04).unwrap();
        let track = flow_profile_mcf(&s, &FlowConfig::new(1.2, 0.05)).unwrap();
        let ext = track.events().extinction.expect("sphere goes extinct");
        assert!((ext - 1.0).abs() < 5e-3, "{ext}");
        let i = track.nearest_index(0.5);
        let Surface::Profile(p) = track.state(i) else { panic!() };
        let r = p.enclosing_radius();
        assert!((r - 2.0f64.sqrt()).abs() / 2.0f64.sqrt() < 2e-3, "{r}");
    }

    #[test]
    fn dumbbell_pinches_before_sphere_extinction() {
        // two unit balls joined by a thin neck; enclosing radius 2.5
        let mut pts = Vec::new();
        let m = 400;
        for i in 0..=m {
            let z = 2.5 - 5.0 * i as f64 / m as f64;
            let a = z.abs();
            let r = if i == 0 || i == m {
                0.0
            } else if a >= 1.5 {
                (1.0 - (a - 1.5).powi(2)).max(0.0).sqrt()
            } else {
                let s = a / 1.5;
                0.25 + 0.75 * s.powi(6)
            };
            pts.push([r, z]);
        }
        let p = ProfileSurface::new(2, pts).unwrap();
        let track = flow_profile_mcf(&p, &FlowConfig::new(2.0, 0.01)).unwrap();
        let sing = track.events().singularity.expect("neck pinches");
        assert!(sing < 2.5f64.powi(2) / 4.0);
        assert_eq!(track.events().stop, StopReason::Singularity);
    }
}
