use super::ode::{integrate, HalfGraph};
use super::ScaledFamily;
use crate::error::{Error, Result};
use crate::geom::{Dims, ProfileSurface, SampledSurface};

const MAX_BISECTIONS: usize = 100;
const BRACKET: (f64, f64) = (1e-3, 1e3);

/// Rotationally symmetric expanding graph `x_{n+1} = f(|x|)` over `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpanderProfile {
    n: usize,
    graph: HalfGraph,
    height: f64,
    target_slope: f64,
    iterations: usize,
}

fn shoot(n: usize, height: f64, length: f64, h: f64) -> Result<HalfGraph> {
    let m = (n - 1) as f64;
    let rhs = move |r: f64, f: f64, v: f64| (1.0 + v * v) * ((f - r * v) / 2.0 - m * v / r);
    integrate(height, 0.0, length, h, height / (2.0 * n as f64), rhs)
}

/// Slope at `L` of the solution launched at height `b`; slope blow-up
/// counts as infinitely steep.
fn slope_at(n: usize, height: f64, length: f64, h: f64) -> Result<(f64, Option<HalfGraph>)> {
    match shoot(n, height, length, h) {
        Ok(g) => Ok((*g.du.last().expect("solved graph"), Some(g))),
        Err(Error::SlopeBlowUp { .. }) => Ok((f64::INFINITY, None)),
        Err(e) => Err(e),
    }
}

/// Shoots on the height `f(0)` (with `f'(0) = 0`) so that `f'(L)` matches
/// `cone_slope` within `1e-4`, bisecting over `[1e-3, 1e3]`.
///
/// The profile ODE is
/// `f'' = (1 + f'^2) ((f - r f')/2 - (n-1) f'/r)`, with `f''(0) = f(0)/(2n)`.
pub fn solve_expander_profile(n: usize, cone_slope: f64, length: f64, h: f64) -> Result<ExpanderProfile> {
    if n < 2 {
        return Err(Error::InvalidArgument("profile expanders need n >= 2".into()));
    }
    if !(cone_slope >= 0.0) || !cone_slope.is_finite() {
        return Err(Error::InvalidArgument(format!("cone slope must be nonnegative, got {cone_slope}")));
    }
    if cone_slope == 0.0 {
        let graph = shoot(n, 0.0, length, h)?;
        return Ok(ExpanderProfile { n, graph, height: 0.0, target_slope: 0.0, iterations: 0 });
    }
    let (mut lo, mut hi) = BRACKET;
    let (s_lo, _) = slope_at(n, lo, length, h)?;
    let (s_hi, _) = slope_at(n, hi, length, h)?;
    if !(s_lo <= cone_slope && cone_slope <= s_hi) {
        return Err(Error::NoExpanderInBracket);
    }
    let mut best: Option<(f64, HalfGraph)> = None;
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS {
        iterations += 1;
        let mid = (lo * hi).sqrt();
        let (s, g) = slope_at(n, mid, length, h)?;
        if let Some(g) = g {
            if (s - cone_slope).abs() <= 1e-4 && best.as_ref().is_none_or(|(d, _)| (s - cone_slope).abs() < *d) {
                best = Some(((s - cone_slope).abs(), g));
                if (s - cone_slope).abs() <= 1e-9 {
                    break;
                }
            }
        }
        if s < cone_slope {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    let (_, graph) = best.ok_or(Error::NoExpanderInBracket)?;
    let height = graph.u[0];
    Ok(ExpanderProfile { n, graph, height, target_slope: cone_slope, iterations })
}

impl ExpanderProfile {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `f(0)` found by the shooting.
    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn target_slope(&self) -> f64 {
        self.target_slope
    }

    pub fn achieved_slope(&self) -> f64 {
        *self.graph.du.last().expect("solved graph")
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn eval(&self, r: f64) -> (f64, f64) {
        self.graph.eval(r)
    }

    /// Largest ODE defect over nodes `0 < r < L`, `f''` from a fourth-order
    /// stencil.
    pub fn residual(&self) -> f64 {
        let g = &self.graph;
        let m = (self.n - 1) as f64;
        let last = g.u.len() - 1;
        let mut worst: f64 = 0.0;
        for i in 1..last.saturating_sub(1) {
            let r = i as f64 * g.h;
            let (f, v) = (g.u[i], g.du[i]);
            let defect = g.second_derivative(i) / (1.0 + v * v) + m * v / r - (f - r * v) / 2.0;
            worst = worst.max(defect.abs());
        }
        worst
    }

    /// Profile curve `(r, f(r))` for `0 <= r <= r_max` at the given step.
    pub fn to_profile(&self, r_max: f64, step: f64) -> ProfileSurface {
        let count = (r_max / step).ceil().max(2.0) as usize;
        let pts = (0..=count)
            .map(|i| {
                let r = r_max * i as f64 / count as f64;
                [r, self.eval(r).0]
            })
            .collect();
        ProfileSurface::new(self.n, pts).expect("graph profile")
    }
}

impl ScaledFamily for ExpanderProfile {
    fn dims(&self) -> Dims {
        Dims { n: self.n, k: 1 }
    }

    /// Rotated profile of `sqrt(t) Σ` restricted to the ball. Beyond the
    /// solved radius the graph continues along its last tangent.
    fn scaled_ball(&self, t: f64, radius: f64, spacing: f64) -> SampledSurface {
        let root = t.sqrt();
        let steep = self.achieved_slope().abs().max(1.0);
        let r_max = radius / root;
        let profile = self.to_profile(r_max, spacing / (root * steep));
        let scaled: Vec<[f64; 2]> = profile.profile().iter().map(|p| [root * p[0], root * p[1]]).collect();
        let surface = ProfileSurface::new(self.n, scaled).expect("scaled profile").to_sampled();
        surface.restrict_ball(&vec![0.0; self.n + 1], radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_profile_for_zero_slope() {
        let p = solve_expander_profile(2, 0.0, 10.0, 0.01).unwrap();
        assert_eq!(p.height(), 0.0);
        assert_eq!(p.achieved_slope(), 0.0);
        assert!(p.residual() <= 1e-8);
    }

    #[test]
    fn unit_slope_shooting_converges() {
        let p = solve_expander_profile(2, 1.0, 20.0, 1e-3).unwrap();
        assert!((p.achieved_slope() - 1.0).abs() <= 1e-4);
        assert!(p.residual() <= 1e-8, "{}", p.residual());
        assert!(p.iterations() <= 100);
    }

    #[test]
    fn unreachable_slope_is_reported() {
        assert_eq!(solve_expander_profile(2, 1e6, 5.0, 1e-2).unwrap_err(), Error::NoExpanderInBracket);
    }
}
