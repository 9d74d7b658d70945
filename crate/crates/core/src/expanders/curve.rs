use super::ode::{integrate, HalfGraph};
use super::ScaledFamily;
use crate::error::{Error, Result};
use crate::geom::{Dims, Polyline, SampledSurface};

/// Graphical expanding curve `y = u(x)`, even in `x`, solved on `[0, L]` and
/// mirrored. Dilations keep the data of the solved curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpanderCurve {
    graph: HalfGraph,
    b: f64,
    /// Dilation factor applied to the solved curve.
    scale: f64,
}

/// `u'' = (1 + u'^2)(u - x u') / 2` from `u(0) = b`, `u'(0) = 0`.
pub fn solve_expander_curve(b: f64, length: f64, h: f64) -> Result<ExpanderCurve> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("expander height must be nonnegative, got {b}")));
    }
    let rhs = |x: f64, u: f64, v: f64| (1.0 + v * v) * (u - x * v) / 2.0;
    let graph = integrate(b, 0.0, length, h, b / 2.0, rhs)?;
    Ok(ExpanderCurve { graph, b, scale: 1.0 })
}

/// Shoots on the height `b` so that the asymptotic slope `u'(L)` matches
/// `slope` within `1e-9`, bisecting over `[0, 1e3]`.
pub fn solve_expander_curve_for_slope(slope: f64, length: f64, h: f64) -> Result<ExpanderCurve> {
    if !(slope >= 0.0) || !slope.is_finite() {
        return Err(Error::InvalidArgument(format!("cone slope must be nonnegative, got {slope}")));
    }
    let end_slope = |b: f64| match solve_expander_curve(b, length, h) {
        Ok(c) => Ok((c.asymptotic_slopes().1, Some(c))),
        Err(Error::SlopeBlowUp { .. }) => Ok((f64::INFINITY, None)),
        Err(e) => Err(e),
    };
    if slope == 0.0 {
        return solve_expander_curve(0.0, length, h);
    }
    let (mut lo, mut hi) = (0.0, 1e3);
    if end_slope(hi)?.0 < slope {
        return Err(Error::NoExpanderInBracket);
    }
    let mut best: Option<(f64, ExpanderCurve)> = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (s, c) = end_slope(mid)?;
        if let Some(c) = c {
            let gap = (s - slope).abs();
            if best.as_ref().is_none_or(|(d, _)| gap < *d) {
                best = Some((gap, c));
            }
            if gap <= 1e-9 {
                break;
            }
        }
        if s < slope {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    match best {
        Some((gap, c)) if gap <= 1e-4 => Ok(c),
        _ => Err(Error::NoExpanderInBracket),
    }
}

impl ExpanderCurve {
    pub fn height(&self) -> f64 {
        self.scale * self.b
    }

    /// Half-length of the solved interval.
    pub fn half_length(&self) -> f64 {
        self.scale * self.graph.len()
    }

    pub fn step(&self) -> f64 {
        self.scale * self.graph.h
    }

    pub fn node_count(&self) -> usize {
        2 * self.graph.u.len() - 1
    }

    /// `(u'(-L), u'(L))`.
    pub fn asymptotic_slopes(&self) -> (f64, f64) {
        let m = *self.graph.du.last().expect("solved graph");
        (-m, m)
    }

    /// `|u'(L) - u'(L/2)|`.
    pub fn slope_drift(&self) -> f64 {
        let last = self.graph.u.len() - 1;
        (self.graph.du[last] - self.graph.du[last / 2]).abs()
    }

    /// `(u(x), u'(x))` with straight continuation beyond `±L`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let (u, du) = self.graph.eval(x / self.scale);
        (self.scale * u, du)
    }

    /// Largest `|u''/(1 + u'^2) - (u - x u')/2|` over the interior nodes of
    /// the solved (undilated) curve, `u''` from a fourth-order stencil.
    pub fn residual(&self) -> f64 {
        let g = &self.graph;
        let last = g.u.len() - 1;
        let mut worst: f64 = 0.0;
        for i in 0..last.saturating_sub(1) {
            let x = i as f64 * g.h;
            let (u, v) = (g.u[i], g.du[i]);
            let r = g.second_derivative(i) / (1.0 + v * v) - (u - x * v) / 2.0;
            worst = worst.max(r.abs());
        }
        worst
    }

    /// The dilated curve `rho * Σ`.
    pub fn dilate(&self, rho: f64) -> ExpanderCurve {
        assert!(rho > 0.0);
        ExpanderCurve { scale: self.scale * rho, ..self.clone() }
    }

    /// Nodes on `[-L, L]` taking every `stride`-th sample.
    pub fn to_polyline(&self, stride: usize) -> Polyline {
        let g = &self.graph;
        let last = g.u.len() - 1;
        let mut idx: Vec<usize> = (0..=last).step_by(stride.max(1)).chain(std::iter::once(last)).collect();
        idx.dedup();
        let mut vertices = Vec::with_capacity(4 * idx.len());
        for &i in idx.iter().rev() {
            vertices.extend([-(i as f64) * g.h * self.scale, g.u[i] * self.scale]);
        }
        for &i in idx.iter().skip_while(|&&i| i == 0) {
            vertices.extend([i as f64 * g.h * self.scale, g.u[i] * self.scale]);
        }
        Polyline::new(2, vertices, false, true).expect("distinct nodes")
    }
}

impl ScaledFamily for ExpanderCurve {
    fn dims(&self) -> Dims {
        Dims { n: 1, k: 1 }
    }

    /// `x`-grid with steps chosen so that scaled arc steps stay below
    /// `spacing`; weights are scaled arc lengths.
    fn scaled_ball(&self, t: f64, radius: f64, spacing: f64) -> SampledSurface {
        let root = t.sqrt();
        let x_max = radius / root;
        let steep = self.graph.du.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dx = spacing / (root * (1.0 + steep * steep).sqrt());
        let count = (x_max / dx).ceil() as usize;
        let dx = x_max / count.max(1) as f64;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut frames = Vec::new();
        for i in -(count as i64)..=count as i64 {
            let x = i as f64 * dx;
            let (u, du) = self.eval(x);
            let p = [root * x, root * u];
            if p[0] * p[0] + p[1] * p[1] > radius * radius {
                continue;
            }
            let arc = (1.0 + du * du).sqrt();
            points.extend(p);
            weights.push(root * dx * arc);
            frames.extend([1.0 / arc, du / arc]);
        }
        let s = SampledSurface::new(Dims { n: 1, k: 1 }, points, weights, spacing).expect("finite samples");
        s.with_frames(frames).expect("unit tangents")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_height_is_the_line() {
        let c = solve_expander_curve(0.0, 5.0, 0.01).unwrap();
        assert_eq!(c.asymptotic_slopes(), (0.0, 0.0));
        assert_eq!(c.eval(3.0), (0.0, 0.0));
        assert_eq!(c.residual(), 0.0);
    }

    #[test]
    fn unit_height_residual_and_slopes() {
        let c = solve_expander_curve(1.0, 20.0, 1e-3).unwrap();
        assert!(c.residual() <= 1e-8, "{}", c.residual());
        let (lo, hi) = c.asymptotic_slopes();
        assert!(hi > 0.0 && lo == -hi);
        assert!(c.slope_drift() <= 1e-3);
    }

    #[test]
    fn slope_shooting_inverts_height() {
        let c = solve_expander_curve(1.0, 20.0, 1e-3).unwrap();
        let m = c.asymptotic_slopes().1;
        let back = solve_expander_curve_for_slope(m, 20.0, 1e-3).unwrap();
        assert!((back.height() - 1.0).abs() < 1e-6, "{}", back.height());
        let steeper = solve_expander_curve_for_slope(1.0, 20.0, 1e-3).unwrap();
        assert!(steeper.height() > 1.0);
        assert!((steeper.asymptotic_slopes().1 - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn rejects_negative_height() {
        assert!(solve_expander_curve(-1.0, 5.0, 0.01).is_err());
    }

    #[test]
    fn polyline_is_symmetric() {
        let c = solve_expander_curve(0.5, 2.0, 0.1).unwrap();
        let p = c.to_polyline(3);
        let v = p.vertices();
        let m = p.len();
        for i in 0..m {
            let j = m - 1 - i;
            assert!((v[2 * i] + v[2 * j]).abs() < 1e-12);
            assert_eq!(v[2 * i + 1], v[2 * j + 1]);
        }
    }
}
