use lowent::geom::{
    hausdorff_distance_brute, sample_plane_disk, Dims, GridGraph, PlaneN, Polyline, SampledSurface, Similarity,
};
use lowent::reifenberg::{best_plane, default_p_samples, dyadic_radii, planar_distance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn circle(m: usize) -> SampledSurface {
    Polyline::circle(&[0.0, 0.0], 1.0, m).to_sampled()
}

/// Brute-force score over lines through `p` at angle resolution `step`.
fn line_sweep_oracle(s: &SampledSurface, p: &[f64], r: f64, step: f64) -> f64 {
    let ball = s.restrict_ball(p, r);
    let dims = Dims::new(1, 1).unwrap();
    let count = (std::f64::consts::PI / step).ceil() as usize;
    (0..count)
        .map(|i| {
            let a = i as f64 * step;
            let plane = PlaneN::new(dims, p.to_vec(), vec![a.cos(), a.sin()]).unwrap();
            let disk = sample_plane_disk(&plane, r, s.spacing()).unwrap();
            hausdorff_distance_brute(disk.points(), ball.points(), 2).unwrap() / r
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn small_scale_circle_is_flat() {
    let c = circle(1257);
    let p = c.point(0).to_vec();
    let sc = best_plane(&c, &p, 0.2).unwrap();
    let oracle = line_sweep_oracle(&c, &p, 0.2, 1e-3);
    // a line through p leaves the arc at the ball boundary: sagitta R^2/2
    assert!((sc.score - 0.1).abs() <= 2e-3, "{}", sc.score);
    // the oracle samples the disk, so it can only overestimate by a spacing
    assert!(sc.score <= oracle + 1e-3, "{} vs {oracle}", sc.score);
}

#[test]
fn large_scale_circle_is_not_flat() {
    let c = circle(628);
    let p = c.point(3).to_vec();
    let sc = best_plane(&c, &p, 100.0).unwrap();
    // the circle sits in B_2(p) while the line fills B_100(p)
    let plane = &sc.plane;
    let disk = sample_plane_disk(plane, 100.0, 0.05).unwrap();
    let direct = hausdorff_distance_brute(disk.points(), c.points(), 2).unwrap() / 100.0;
    assert!(sc.score >= 0.9);
    assert!((sc.score - direct).abs() < 1e-3, "{} vs {direct}", sc.score);
}

#[test]
fn sampled_plane_has_small_planar_distance() {
    let dims = Dims::new(2, 1).unwrap();
    let plane = PlaneN::spanned_by(dims, vec![0.0, 0.0, 0.5], &[1.0, 0.0, 0.3, 0.0, 1.0, -0.2]).unwrap();
    let disk = sample_plane_disk(&plane, 2.0, 0.05).unwrap();
    let near = |q: &[f64]| q.iter().zip(plane.base()).map(|(a, b)| (a - b).powi(2)).sum::<f64>() <= 1.0;
    let inner: Vec<usize> = (0..disk.len()).filter(|&i| near(disk.point(i))).step_by(25).collect();
    let pd = planar_distance(&disk, &inner, &dyadic_radii(disk.spacing(), 0.5)).unwrap();
    assert!(pd.estimate <= 0.02, "{}", pd.estimate);
}

#[test]
fn unit_circle_fails_flatness_at_large_scales() {
    let c = circle(628);
    let pd = planar_distance(&c, &default_p_samples(&c, 5), &dyadic_radii(c.spacing(), 200.0)).unwrap();
    assert!(pd.estimate >= 0.9);
    assert_eq!(pd.worst.radius, 200.0);
}

fn sine_graph(a: f64) -> SampledSurface {
    use std::f64::consts::PI;
    GridGraph::from_fn(Dims::new(1, 1).unwrap(), &[-PI], &[PI], 314, |x| vec![a * x[0].sin()]).unwrap().to_sampled()
}

#[test]
fn gentle_sine_graph_is_nearly_flat() {
    let mut prev = f64::INFINITY;
    for a in [0.2, 0.1, 0.05] {
        let g = sine_graph(a);
        let ps: Vec<usize> = (0..g.len()).filter(|&i| g.point(i)[0].abs() <= 2.0).step_by(5).collect();
        let pd = planar_distance(&g, &ps, &dyadic_radii(g.spacing(), 1.0)).unwrap();
        assert!(pd.estimate < prev);
        prev = pd.estimate;
        // brute-force line sweep at three fixed cells
        for (i, r) in [(157usize, 1.0), (100, 0.5), (200, 0.25)] {
            let sc = best_plane(&g, g.point(i), r).unwrap();
            let oracle = line_sweep_oracle(&g, g.point(i), r, 2e-3);
            assert!(sc.score <= oracle + 2e-3, "{a} {i} {r}: {} vs {oracle}", sc.score);
        }
    }
    assert!(prev <= 0.1);
}

#[test]
fn planar_distance_is_similarity_equivariant() {
    let g = sine_graph(0.2);
    let ps: Vec<usize> = (0..g.len()).filter(|&i| g.point(i)[0].abs() <= 2.0).step_by(10).collect();
    let radii = dyadic_radii(g.spacing(), 1.0);
    let base = planar_distance(&g, &ps, &radii).unwrap().estimate;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3 {
        let sim = Similarity::random(&mut rng, 2, 5.0, 0.5, 2.0);
        let moved = g.transformed(&sim);
        let scaled: Vec<f64> = radii.iter().map(|r| r * sim.scale).collect();
        let est = planar_distance(&moved, &ps, &scaled).unwrap().estimate;
        assert!((est - base).abs() <= 1e-3, "{est} vs {base}");
    }
}

#[test]
fn more_scales_never_lower_the_estimate() {
    let c = circle(400);
    let ps = default_p_samples(&c, 20);
    let mut prev = 0.0;
    for r_max in [0.1, 0.4, 1.6, 6.4] {
        let est = planar_distance(&c, &ps, &dyadic_radii(c.spacing(), r_max)).unwrap().estimate;
        assert!(est >= prev);
        prev = est;
    }
}
