use super::{drive, FlowConfig, FlowTrack};
use crate::error::{Error, Result};
use crate::geom::{GridGraph, Surface};

const GRADIENT_LIMIT: f64 = 1e3;

/// Graphical mean curvature flow
/// `u_t = sum_ij (delta_ij - u_i u_j / (1 + |Du|^2)) u_ij` with central
/// differences and the boundary trace held fixed.
pub fn flow_graph_mcf(init: &GridGraph, cfg: &FlowConfig) -> Result<FlowTrack> {
    cfg.validate()?;
    let dims = init.dims();
    if dims.k != 1 {
        return Err(Error::InvalidArgument("graph flow needs codimension 1".into()));
    }
    let n = dims.n;
    let h = init.spacing();
    let dt = cfg.step(cfg.dt_safety * h * h / (2.0 * n as f64))?;
    let count = init.node_count();
    let interior: Vec<usize> = (0..count).filter(|&i| !init.is_boundary(i)).collect();
    let boundary: Vec<f64> = (0..count).filter(|&i| init.is_boundary(i)).flat_map(|i| init.node_point(i)).collect();
    let strides: Vec<usize> = (0..n).map(|a| init.stride(a)).collect();
    let mut track = FlowTrack::new(Surface::Graph(init.clone()), cfg.h_min.unwrap_or(h), Some(boundary));
    let mut state = init.clone();
    let mut rate = vec![0.0; interior.len()];
    let mut t = 0.0;
    drive(
        &mut state,
        cfg,
        dt,
        &mut track,
        |s| Surface::Graph(s.clone()),
        |s, dt| {
            let u = s.values();
            let mut grad = [0.0f64; 3];
            let mut hess = [[0.0f64; 3]; 3];
            for (r, &node) in rate.iter_mut().zip(&interior) {
                let mut g2 = 0.0;
                for a in 0..n {
                    let sa = strides[a];
                    grad[a] = (u[node + sa] - u[node - sa]) / (2.0 * h);
                    hess[a][a] = (u[node + sa] - 2.0 * u[node] + u[node - sa]) / (h * h);
                    g2 += grad[a] * grad[a];
                    for b in a + 1..n {
                        let sb = strides[b];
                        let v = (u[node + sa + sb] - u[node + sa - sb] - u[node - sa + sb] + u[node - sa - sb])
                            / (4.0 * h * h);
                        hess[a][b] = v;
                        hess[b][a] = v;
                    }
                }
                if !(g2.sqrt() <= GRADIENT_LIMIT) {
                    return Err(Error::GradientBlowUp { grad: g2.sqrt(), time: t });
                }
                let mut v = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        let delta = if a == b { 1.0 } else { 0.0 };
                        v += (delta - grad[a] * grad[b] / (1.0 + g2)) * hess[a][b];
                    }
                }
                *r = v;
            }
            let values = s.values_mut();
            for (&node, r) in interior.iter().zip(&rate) {
                values[node] += dt * r;
            }
            t += dt;
            Ok(None)
        },
        |_, _, _| {},
    )?;
    Ok(track)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Dims;

    fn graph(f: impl Fn(f64) -> f64, lo: f64, hi: f64, cells: usize) -> GridGraph {
        GridGraph::from_fn(Dims::new(1, 1).unwrap(), &[lo], &[hi], cells, |x| vec![f(x[0])]).unwrap()
    }

    #[test]
    fn affine_graph_is_static() {
        let g = graph(|x| 0.3 * x - 0.1, -1.0, 1.0, 40);
        let track = flow_graph_mcf(&g, &FlowConfig::new(0.05, 0.01)).unwrap();
        let Surface::Graph(last) = track.states().last().unwrap() else { panic!() };
        for (a, b) in last.values().iter().zip(g.values()) {
            assert!((a - b).abs() <= 1e-10);
        }
        let g2 =
            GridGraph::from_fn(Dims::new(2, 1).unwrap(), &[0.0, 0.0], &[1.0, 1.0], 10, |x| vec![x[0] - 2.0 * x[1]])
                .unwrap();
        let track = flow_graph_mcf(&g2, &FlowConfig::new(0.01, 0.01)).unwrap();
        let Surface::Graph(last) = track.states().last().unwrap() else { panic!() };
        for (a, b) in last.values().iter().zip(g2.values()) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn cosine_decays_monotonically() {
        use std::f64::consts::FRAC_PI_2;
        let g = graph(|x| 0.1 * x.cos(), -FRAC_PI_2, FRAC_PI_2, 80);
        let track = flow_graph_mcf(&g, &FlowConfig::new(0.5, 0.05)).unwrap();
        let sups: Vec<f64> = track
            .states()
            .iter()
            .map(|s| match s {
                Surface::Graph(g) => g.max_abs_value(),
                _ => unreachable!(),
            })
            .collect();
        assert!(sups.windows(2).all(|w| w[1] < w[0]));
        // heat-like decay e^{-t} for small amplitude
        assert!((sups.last().unwrap() / 0.1 - (-0.5f64).exp()).abs() < 5e-3);
    }

    #[test]
    fn steep_graph_blows_up() {
        let g = graph(|x| if x > 0.0 { 100.0 } else { 0.0 }, -1.0, 1.0, 400);
        let err = flow_graph_mcf(&g, &FlowConfig::new(0.01, 0.01)).unwrap_err();
        assert!(matches!(err, Error::GradientBlowUp { .. }));
    }
}
