//! Determinants, interpolation and polynomial roots.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};

use crate::Rational;

/// Exact determinant by Gaussian elimination over the rationals.
pub fn det_rational(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            for k in col..n {
                let delta = &factor * &m[col][k];
                m[r][k] -= delta;
            }
        }
    }
    det
}

/// Determinant by LU with partial pivoting.
pub fn det_f64(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    if n == 0 {
        return 1.0;
    }
    DMatrix::from_fn(n, n, |r, c| rows[r][c]).lu().determinant()
}

/// Coefficients (lowest first) of the polynomial of degree `< xs.len()`
/// through the points, by exact Newton divided differences.
pub fn interpolate_rational(xs: &[Rational], ys: &[Rational]) -> Vec<Rational> {
    let n = xs.len();
    let mut dd: Vec<Rational> = ys.to_vec();
    for level in 1..n {
        for k in (level..n).rev() {
            dd[k] = (&dd[k] - &dd[k - 1]) / (&xs[k] - &xs[k - level]);
        }
    }
    // expand the Newton form by Horner from the top
    let mut coeffs = vec![Rational::zero(); n];
    for k in (0..n).rev() {
        // coeffs := coeffs * (x - xs[k]) + dd[k]
        let mut next = vec![Rational::zero(); n];
        for (d, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if d + 1 < n {
                next[d + 1] += c;
            }
            next[d] -= c * &xs[k];
        }
        next[0] += &dd[k];
        coeffs = next;
    }
    coeffs
}

/// Vandermonde solve in floating point.
pub fn interpolate_f64(xs: &[f64], ys: &[f64]) -> Option<Vec<f64>> {
    let n = xs.len();
    let v = DMatrix::from_fn(n, n, |r, c| xs[r].powi(c as i32));
    v.lu().solve(&DVector::from_column_slice(ys)).map(|s| s.iter().copied().collect())
}

/// Sample abscissae 0, 1, −1, 2, −2, …
pub fn sample_points(count: usize) -> Vec<i64> {
    (0..count as i64).map(|k| if k % 2 == 1 { (k + 1) / 2 } else { -(k / 2) }).collect()
}

/// Complex roots of `Σ c_k x^k` (lowest first) as `(re, im)`. Leading and
/// trailing zero coefficients are handled: each trailing zero is a root at 0.
pub fn roots(coeffs: &[f64]) -> Vec<(f64, f64)> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let mut out = Vec::new();
    while c.len() > 1 && c[0] == 0.0 {
        out.push((0.0, 0.0));
        c.remove(0);
    }
    let d = c.len().saturating_sub(1);
    if d == 0 {
        return out;
    }
    let lead = c[d];
    let companion = DMatrix::from_fn(d, d, |r, col| {
        if col == d - 1 {
            -c[r] / lead
        } else if r == col + 1 {
            1.0
        } else {
            0.0
        }
    });
    out.extend(companion.complex_eigenvalues().iter().map(|z| (z.re, z.im)));
    out
}
