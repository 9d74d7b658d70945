use lowent::gaussian::density_ratio;
use lowent::geom::{Dims, GridGraph, Polyline, ProfileSurface, Surface};
use lowent::mcf::{
    clearing_out_floor, clearing_out_probe, curvature_bound_probe, flow_graph_mcf, flow_polyline_csf, flow_profile_mcf,
    monotonicity_probe, FlowConfig, StopReason,
};

fn circle_track(h: f64) -> lowent::mcf::FlowTrack {
    let m = (2.0 * std::f64::consts::PI / h).round() as usize;
    let c = Polyline::circle(&[0.0, 0.0], 1.0, m);
    flow_polyline_csf(&c, &FlowConfig::new(0.6, 0.002)).unwrap()
}

#[test]
fn shrinking_circle_follows_radius_law() {
    let track = circle_track(0.01);
    let h = track.h_min();
    assert_eq!(track.events().stop, StopReason::Extinction);
    let ext = track.events().extinction.unwrap();
    assert!((ext - 0.5).abs() <= 2e-3, "extinction at {ext}");
    let mut worst: f64 = 0.0;
    for (t, s) in track.times().iter().zip(track.states()) {
        let Surface::Polyline(p) = s else { unreachable!() };
        let exact = (1.0 - 2.0 * t).max(0.0).sqrt();
        if exact < 5.0 * h {
            break;
        }
        worst = worst.max((p.mean_radius() - exact).abs() / exact);
    }
    assert!(worst <= 1e-3, "relative radius error {worst}");
}

#[test]
fn huisken_monotonicity_on_shrinking_circle() {
    let track = circle_track(0.01);
    let radii: Vec<f64> = (2..=12).map(|i| (0.04 * i as f64).sqrt()).collect();
    let rep = monotonicity_probe(&track, &[0.0, 0.0], 0.5, &radii).unwrap();
    assert!(rep.skipped.is_empty());
    assert!(rep.max_violation <= 1e-4, "violation {}", rep.max_violation);
    let limit = (2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt();
    for (_, th) in &rep.rows {
        assert!(*th <= limit + 1e-3);
        assert!(*th >= limit - 1e-2);
    }
}

#[test]
fn density_ratio_refuses_times_before_start() {
    let track = circle_track(0.05);
    let err = density_ratio(&track, &[0.0, 0.0], 0.1, 0.5, None).unwrap_err();
    assert!(err.to_string().contains("density ratio undefined before initial time"));
}

#[test]
fn nested_circles_never_cross() {
    let outer = flow_polyline_csf(&Polyline::circle(&[0.0, 0.0], 1.0, 400), &FlowConfig::new(0.1, 0.01)).unwrap();
    let inner = flow_polyline_csf(&Polyline::circle(&[0.1, 0.0], 0.6, 240), &FlowConfig::new(0.1, 0.01)).unwrap();
    for (a, b) in outer.states().iter().zip(inner.states()) {
        let (Surface::Polyline(a), Surface::Polyline(b)) = (a, b) else { unreachable!() };
        let d = lowent::geom::directed_hausdorff(b.vertices(), a.vertices(), 2).unwrap();
        let c = a.centroid();
        let inside = b.vertices().chunks(2).all(|p| ((p[0] - c[0]).hypot(p[1] - c[1])) < a.mean_radius());
        assert!(d > 0.0 && inside);
    }
}

#[test]
fn curve_length_decreases() {
    let track = circle_track(0.02);
    let lengths: Vec<f64> = track
        .states()
        .iter()
        .map(|s| match s {
            Surface::Polyline(p) => p.total_length(),
            _ => unreachable!(),
        })
        .collect();
    assert!(lengths.windows(2).all(|w| w[1] <= w[0] + 1e-6));
}

fn bump(a: f64, half: f64, h: f64) -> GridGraph {
    let cells = (2.0 * half / h).round() as usize;
    GridGraph::from_fn(Dims::new(1, 1).unwrap(), &[-half], &[half], cells, |x| vec![a * (-x[0] * x[0]).exp()]).unwrap()
}

#[test]
fn graph_flow_boundary_is_fixed_and_monotone() {
    let g = bump(0.5, 8.0, 0.02);
    let track = flow_graph_mcf(&g, &FlowConfig::new(1.0, 0.01)).unwrap();
    let first = track.states().first().unwrap();
    for s in track.states() {
        let (Surface::Graph(a), Surface::Graph(b)) = (first, s) else { unreachable!() };
        let last = a.node_count() - 1;
        assert_eq!(a.value(0)[0].to_bits(), b.value(0)[0].to_bits());
        assert_eq!(a.value(last)[0].to_bits(), b.value(last)[0].to_bits());
    }
    let radii: Vec<f64> = (1..=9).map(|i| 0.1 * i as f64).collect();
    let rep = monotonicity_probe(&track, &[0.0, 0.3], 1.0, &radii).unwrap();
    assert!(rep.max_violation <= 1e-4, "violation {}", rep.max_violation);
    let areas: Vec<f64> = (0..track.len()).map(|i| track.sampled(i).total_weight()).collect();
    assert!(areas.windows(2).all(|w| w[1] <= w[0] + 1e-6));
}

#[test]
fn clearing_out_on_flows() {
    let track = circle_track(0.01);
    let floor = clearing_out_floor(1);
    for (t0, r) in [(0.1, 0.1), (0.2, 0.2), (0.3, 0.1)] {
        let Surface::Polyline(p) = track.state(track.nearest_index(t0)) else { unreachable!() };
        let x0 = p.vertex(0).to_vec();
        let c = clearing_out_probe(&track, &x0, t0, r).unwrap();
        assert!(c.ratio >= floor, "{t0} {r}: {}", c.ratio);
    }
}

#[test]
fn curvature_constant_shrinks_with_amplitude() {
    use std::f64::consts::FRAC_PI_2;
    let mut prev = f64::INFINITY;
    for a in [0.4, 0.2, 0.1, 0.05] {
        let g =
            GridGraph::from_fn(Dims::new(1, 1).unwrap(), &[-FRAC_PI_2], &[FRAC_PI_2], 100, |x| vec![a * x[0].cos()])
                .unwrap();
        let track = flow_graph_mcf(&g, &FlowConfig::new(1.0, 0.02)).unwrap();
        let times: Vec<f64> = track.times().to_vec();
        let cb = curvature_bound_probe(&track, &[0.0, 0.0], 10.0, &times).unwrap();
        assert!(cb.empirical_c < prev);
        prev = cb.empirical_c;
    }
}

#[test]
fn three_sphere_extinction() {
    let s = ProfileSurface::sphere(3, 6f64.sqrt(), 0.04).unwrap();
    let track = flow_profile_mcf(&s, &FlowConfig::new(1.2, 0.05)).unwrap();
    let ext = track.events().extinction.unwrap();
    assert!((ext - 1.0).abs() <= 5e-3, "{ext}");
}
