//! Small helpers over `&[f64]` coordinate slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// Normalizes in place and returns the original length.
pub fn normalize(a: &mut [f64]) -> f64 {
    let len = norm(a);
    if len > 0.0 {
        a.iter_mut().for_each(|x| *x /= len);
    }
    len
}

/// Gram-Schmidt orthonormalization of `count` vectors of length `dim`
/// stored row-major. Returns `None` when the rows are linearly dependent.
pub fn orthonormalize(rows: &[f64], count: usize, dim: usize) -> Option<Vec<f64>> {
    let mut out: Vec<f64> = Vec::with_capacity(count * dim);
    for i in 0..count {
        let mut v = rows[i * dim..(i + 1) * dim].to_vec();
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for j in 0..i {
                let u = &out[j * dim..(j + 1) * dim];
                let c = dot(&v, u);
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
            }
        }
        if normalize(&mut v) < 1e-12 {
            return None;
        }
        out.extend_from_slice(&v);
    }
    Some(out)
}

/// Largest deviation of the Gram matrix of `count` row vectors from the
/// identity.
pub fn gram_defect(rows: &[f64], count: usize, dim: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..count {
        for j in 0..count {
            let g = dot(&rows[i * dim..(i + 1) * dim], &rows[j * dim..(j + 1) * dim]);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}
