use crate::error::{Error, Result};

/// Largest slope magnitude treated as finite while integrating.
const SLOPE_LIMIT: f64 = 1e8;

/// Even function sampled on `x = i h`, `i = 0..=N`, with values and first
/// derivatives. Evaluation is cubic Hermite inside `[0, L]` and continues
/// along the last tangent line beyond `L`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct HalfGraph {
    pub h: f64,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

impl HalfGraph {
    pub fn len(&self) -> f64 {
        self.h * (self.u.len() - 1) as f64
    }

    /// `(u(x), u'(x))` using `u(-x) = u(x)`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let s = if x < 0.0 { -1.0 } else { 1.0 };
        let a = x.abs();
        let last = self.u.len() - 1;
        if a >= self.len() {
            let (ul, dl) = (self.u[last], self.du[last]);
            return (ul + dl * (a - self.len()), s * dl);
        }
        let i = ((a / self.h) as usize).min(last - 1);
        let tau = (a - i as f64 * self.h) / self.h;
        let (u0, u1, d0, d1) = (self.u[i], self.u[i + 1], self.du[i] * self.h, self.du[i + 1] * self.h);
        let t2 = tau * tau;
        let t3 = t2 * tau;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * u0
            + (t3 - 2.0 * t2 + tau) * d0
            + (-2.0 * t3 + 3.0 * t2) * u1
            + (t3 - t2) * d1;
        let slope = ((6.0 * t2 - 6.0 * tau) * u0
            + (3.0 * t2 - 4.0 * tau + 1.0) * d0
            + (-6.0 * t2 + 6.0 * tau) * u1
            + (3.0 * t2 - 2.0 * tau) * d1)
            / self.h;
        (value, s * slope)
    }

    /// `u'' ` at interior nodes from the five-point stencil on `u'`; the
    /// mirror image supplies the nodes left of zero.
    pub fn second_derivative(&self, i: usize) -> f64 {
        let du = |j: i64| -> f64 {
            if j < 0 {
                -self.du[(-j) as usize]
            } else {
                self.du[j as usize]
            }
        };
        let j = i as i64;
        (-du(j + 2) + 8.0 * du(j + 1) - 8.0 * du(j - 1) + du(j - 2)) / (12.0 * self.h)
    }
}

/// Classical RK4 for `u'' = rhs(x, u, u')` from `x = 0` with the given
/// initial data; `rhs0` replaces `rhs` at `x = 0` where it may be singular.
pub(crate) fn integrate(
    u0: f64,
    du0: f64,
    length: f64,
    h: f64,
    rhs0: f64,
    rhs: impl Fn(f64, f64, f64) -> f64,
) -> Result<HalfGraph> {
    if !(length > 0.0) || !(h > 0.0) || h > length {
        return Err(Error::InvalidArgument(format!("need 0 < h <= L (got h = {h}, L = {length})")));
    }
    let steps = (length / h).ceil() as usize;
    let h = length / steps as f64;
    let f = |x: f64, u: f64, v: f64| if x == 0.0 { rhs0 } else { rhs(x, u, v) };
    let mut u = Vec::with_capacity(steps + 1);
    let mut du = Vec::with_capacity(steps + 1);
    let (mut y, mut v) = (u0, du0);
    u.push(y);
    du.push(v);
    for i in 0..steps {
        let x = i as f64 * h;
        let (k1y, k1v) = (v, f(x, y, v));
        let (k2y, k2v) = (v + 0.5 * h * k1v, f(x + 0.5 * h, y + 0.5 * h * k1y, v + 0.5 * h * k1v));
        let (k3y, k3v) = (v + 0.5 * h * k2v, f(x + 0.5 * h, y + 0.5 * h * k2y, v + 0.5 * h * k2v));
        let (k4y, k4v) = (v + h * k3v, f(x + h, y + h * k3y, v + h * k3v));
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !(v.abs() <= SLOPE_LIMIT) || !y.is_finite() {
            return Err(Error::SlopeBlowUp { max_x: x });
        }
        u.push(y);
        du.push(v);
    }
    Ok(HalfGraph { h, u, du })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_reproduces_cosh() {
        // u'' = u, u(0) = 1: u = cosh x
        let g = integrate(1.0, 0.0, 2.0, 0.01, 1.0, |_, u, _| u).unwrap();
        for (i, v) in g.u.iter().enumerate() {
            let x = i as f64 * g.h;
            assert!((v - x.cosh()).abs() < 1e-9);
        }
        let (v, d) = g.eval(-1.234);
        assert!((v - 1.234f64.cosh()).abs() < 1e-9);
        assert!((d + 1.234f64.sinh()).abs() < 1e-7);
        assert!((g.second_derivative(50) - 0.5f64.cosh()).abs() < 1e-8);
    }

    #[test]
    fn linear_continuation() {
        let g = integrate(0.0, 1.0, 1.0, 0.1, 0.0, |_, _, _| 0.0).unwrap();
        assert_eq!(g.eval(3.0), (3.0, 1.0));
        assert_eq!(g.eval(-3.0), (3.0, -1.0));
    }

    #[test]
    fn blow_up_reports_position() {
        // u'' = 1 + u'^2 gives u' = tan x
        let err = integrate(0.0, 0.0, 3.0, 1e-3, 1.0, |_, _, v| 1.0 + v * v).unwrap_err();
        let Error::SlopeBlowUp { max_x } = err else { panic!("{err}") };
        assert!((max_x - std::f64::consts::FRAC_PI_2).abs() < 1e-2);
    }
}
