use lowent::expanders::*;
use lowent::gaussian::{entropy_sup, SearchConfig};
use lowent::geom::{ConeApprox, Dims};

fn log_times(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| hi * (lo / hi).powf(i as f64 / (n - 1) as f64)).collect()
}

fn unit_curve() -> ExpanderCurve {
    solve_expander_curve(1.0, 20.0, 1e-3).unwrap()
}

#[test]
fn unit_height_rate_is_one_half() {
    let c = unit_curve();
    let t = log_times(1e-1, 1e-4, 10);
    let ex = cone_extract(&c, &t, 5.0, 5e-4).unwrap();
    assert_eq!(ex.cone.len(), 2);
    let fit = convergence_rate_fit(&c, &ex.cone, 5.0, &t, 5e-4).unwrap();
    let p = fit.exponent.unwrap();
    println!("p = {p}, C = {:?}", fit.coefficient);
    assert!((p - 0.5).abs() <= 0.05);
    assert!(!fit.exact && fit.kept.iter().all(|&k| k));

    let fine = convergence_rate_fit(&c, &ex.cone, 5.0, &t, 2.5e-4).unwrap();
    let (a, b) = (fit.coefficient.unwrap(), fine.coefficient.unwrap());
    assert!((a - b).abs() <= 0.1 * a, "{a} vs {b}");
}

#[test]
fn cone_matches_asymptotic_slopes() {
    let c = unit_curve();
    let (_, m) = c.asymptotic_slopes();
    let t = log_times(1e-2, 1e-4, 5);
    let ex = cone_extract(&c, &t, 5.0, 5e-4).unwrap();
    let expected = ConeApprox::new(Dims::new(1, 1).unwrap(), &[1.0, m, -1.0, m], vec![1.0, 1.0]).unwrap();
    assert!(ex.cone.angular_distance(&expected) <= 1e-3);
    for w in ex.cone.weights() {
        assert!((w - 1.0).abs() <= 1e-3);
    }
    // steps shrink with sqrt(t)
    assert!(ex.steps.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn links_are_dilation_invariant() {
    let c = unit_curve();
    let t = log_times(1e-2, 1e-4, 5);
    let a = cone_extract(&c, &t, 5.0, 5e-4).unwrap().cone;
    let b = cone_extract(&c.dilate(2.0), &t, 5.0, 5e-4).unwrap().cone;
    let four_t: Vec<f64> = t.iter().map(|x| 4.0 * x).collect();
    let d = cone_extract(&c, &four_t, 5.0, 5e-4).unwrap().cone;
    println!("{} {}", a.angular_distance(&b), a.angular_distance(&d));
    assert!(a.angular_distance(&b) <= 1e-3);
    assert!(a.angular_distance(&d) <= 1e-3);
}

#[test]
fn scaling_steps_stay_bounded() {
    let c = unit_curve();
    for (t1, t2) in [(0.1, 0.05), (0.01, 0.005), (1e-3, 5e-4)] {
        let q = scaling_step_probe(&c, t1, t2, 5.0, 5e-4).unwrap();
        assert!(q > 0.0 && q < 5.0, "{q}");
    }
}

#[test]
fn support_holds_at_twice_the_fitted_constant() {
    let c = unit_curve();
    let t = log_times(1e-1, 1e-4, 8);
    let ex = cone_extract(&c, &t, 5.0, 5e-4).unwrap();
    let fit = convergence_rate_fit(&c, &ex.cone, 5.0, &t, 5e-4).unwrap();
    let cf = fit.coefficient.unwrap();
    for &ti in &t {
        let sc = support_check(&c, &ex.cone, ti, 5.0, cf, 5e-4).unwrap();
        assert!(sc.holds, "{ti}: {sc:?}");
    }
    // away from the cone the rescaled curve stays away too
    let (to_cone, to_surface) = off_cone_clearance(&c, &ex.cone, &[0.0, 1.0], 1e-4, 5.0, 5e-4);
    assert!(to_cone > 0.5 && to_surface >= to_cone - 0.02);
}

#[test]
fn area_ratios_of_simple_cones() {
    let dims = Dims::new(1, 1).unwrap();
    let t = log_times(1e-1, 1e-3, 3);
    let right = ConeApprox::new(dims, &[1.0, 1.0, -1.0, 1.0], vec![1.0, 1.0]).unwrap();
    for r in area_ratio_probe(&right, &[0.0, 0.0], 1.0, &t).unwrap() {
        assert!((r.ratio - 1.0).abs() <= 1e-2);
    }
    // a point on a ray sees a single segment
    for r in area_ratio_probe(&right, &[0.5, 0.5], 0.1, &t).unwrap() {
        assert!((r.ratio - 1.0).abs() <= 1e-2);
    }
    let c = unit_curve();
    let cone = cone_extract(&c, &log_times(1e-2, 1e-4, 5), 5.0, 5e-4).unwrap().cone;
    let rs = area_ratio_probe(&cone, &[0.0, 0.0], 1.0, &t).unwrap();
    assert!(rs.iter().all(|r| r.ratio >= 0.4));
}

#[test]
fn plane_area_ratio_in_three_space() {
    let dims = Dims::new(2, 1).unwrap();
    let m = 4000;
    let dirs: Vec<f64> = (0..m)
        .flat_map(|i| {
            let a = std::f64::consts::TAU * i as f64 / m as f64;
            [a.cos(), a.sin(), 0.0]
        })
        .collect();
    let w = vec![std::f64::consts::TAU / m as f64; m];
    let plane = ConeApprox::new(dims, &dirs, w).unwrap();
    for r in area_ratio_probe(&plane, &[0.0, 0.0, 0.0], 1.0, &[0.1, 0.01]).unwrap() {
        assert!((r.ratio - 1.0).abs() <= 2e-2, "{}", r.ratio);
    }
    let coarse: Vec<f64> = dirs.chunks(3).step_by(400).flatten().copied().collect();
    let sparse = ConeApprox::new(dims, &coarse, vec![std::f64::consts::TAU / 10.0; 10]).unwrap();
    assert!(area_ratio_probe(&sparse, &[1.0, 0.0, 0.0], 1.0, &[1e-4]).is_err());
}

#[test]
fn expander_entropy_decreases_with_height() {
    let cfg = SearchConfig { noncompact_eps: Some(1e-6), ..SearchConfig::default() };
    let mut prev = f64::INFINITY;
    for b in [1.0, 0.5, 0.25] {
        let c = solve_expander_curve(b, 10.0, 1e-3).unwrap();
        let e = entropy_sup(&c.to_polyline(20).to_sampled(), &cfg).unwrap().value;
        println!("b = {b}: entropy {e}");
        assert!(e < 1.3 && e > 1.0 && e < prev);
        prev = e;
    }
}

#[test]
fn steeper_cones_need_taller_profiles() {
    let mut prev = 0.0;
    for slope in [0.25, 0.5, 1.0] {
        let p = solve_expander_profile(2, slope, 10.0, 1e-3).unwrap();
        assert!((p.achieved_slope() - slope).abs() <= 1e-4);
        assert!(p.height() > prev);
        prev = p.height();
    }
}

#[test]
fn profile_rate_is_one_half() {
    let p = solve_expander_profile(2, 1.0, 10.0, 1e-3).unwrap();
    let t = log_times(1e-1, 1e-3, 6);
    let ex = cone_extract(&p, &t, 2.0, 0.01).unwrap();
    println!("link {} dirs", ex.cone.len());
    let fit = convergence_rate_fit(&p, &ex.cone, 2.0, &t, 0.01).unwrap();
    println!("{fit:?}");
    assert!((fit.exponent.unwrap() - 0.5).abs() <= 0.05);
}
