use nalgebra::DMatrix;
use rand::Rng;

/// Similarity transform `x -> scale * Q x + translation` with `Q` orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    /// Row-major `d x d` rotation.
    pub rotation: Vec<f64>,
    pub translation: Vec<f64>,
}

impl Similarity {
    pub fn identity(d: usize) -> Self {
        let mut rotation = vec![0.0; d * d];
        for i in 0..d {
            rotation[i * d + i] = 1.0;
        }
        Similarity { scale: 1.0, rotation, translation: vec![0.0; d] }
    }

    pub fn scaling(d: usize, scale: f64) -> Self {
        Similarity { scale, ..Self::identity(d) }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn rotate(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.rotation[i * d + j] * v[j]).sum()).collect()
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        self.rotate(p).into_iter().zip(&self.translation).map(|(x, t)| self.scale * x + t).collect()
    }

    /// Random proper rotation (QR of a Gaussian matrix, sign-fixed so the
    /// distribution is Haar), random translation in `[-shift, shift]^d` and
    /// dilation in `[lo, hi]`.
    pub fn random<R: Rng>(rng: &mut R, d: usize, shift: f64, lo: f64, hi: f64) -> Self {
        let gauss = |rng: &mut R| {
            let u: f64 = rng.random_range(f64::EPSILON..1.0);
            let v: f64 = rng.random();
            (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
        };
        let m = DMatrix::from_fn(d, d, |_, _| gauss(rng));
        let qr = m.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..d {
            if r[(j, j)] < 0.0 {
                for i in 0..d {
                    q[(i, j)] = -q[(i, j)];
                }
            }
        }
        if q.determinant() < 0.0 {
            for i in 0..d {
                q[(i, 0)] = -q[(i, 0)];
            }
        }
        let rotation = (0..d * d).map(|idx| q[(idx / d, idx % d)]).collect();
        let translation = (0..d).map(|_| rng.random_range(-shift..=shift)).collect();
        let scale = rng.random_range(lo..=hi);
        Similarity { scale, rotation, translation }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn random_rotation_is_orthogonal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for d in 2..=4 {
            let s = Similarity::random(&mut rng, d, 1.0, 0.5, 2.0);
            let gram = crate::geom::vec::gram_defect(&s.rotation, d, d);
            assert!(gram < 1e-12);
        }
    }
}
