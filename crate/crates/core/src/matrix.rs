//! Small dense nonnegative matrices.

use serde::Serialize;

use crate::error::{Error, Result};

/// Number of squarings used by [`Mat::log_spectral_radius`].
pub const SQUARINGS: u32 = 60;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from rows, rejecting ragged input and negative entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                if !(x >= 0.0) {
                    return Err(Error::NegativeEntry { row: i, col: j });
                }
            }
        }
        Ok(Mat {
            n,
            data: rows.concat(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let mut out = Mat::zeros(self.n);
        mul_into(self, other, &mut out);
        out
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Operator norm induced by the vector 1-norm: the largest column sum.
    pub fn norm_op1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Operator norm induced by the max-norm: the largest row sum.
    pub fn norm_opinf(&self) -> f64 {
        self.data
            .chunks(self.n)
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `log rho(self)` for a nonnegative matrix, `-inf` when the iteration
    /// collapses to zero.
    ///
    /// With `B_0 = A`, `c_s = |B_s|_1`, `B_{s+1} = (B_s / c_s)^2` one has
    /// `log |A^(2^S)|^(2^-S) = sum_s log(c_s) 2^-s + log|B_S| 2^-S`. Once the
    /// normalized iterate is a fixed point the tail of that series is summed
    /// in closed form.
    pub fn log_spectral_radius(&self) -> f64 {
        let n = self.n;
        let mut b = self.clone();
        let mut next = Mat::zeros(n);
        let mut acc = 0.0;
        let mut weight = 1.0;
        for _ in 0..SQUARINGS {
            let c = b.norm_op1();
            if c == 0.0 || !c.is_finite() {
                return if c == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    f64::NAN
                };
            }
            acc += c.ln() * weight;
            b.scale(1.0 / c);
            mul_into(&b, &b, &mut next);
            let settled = next
                .data
                .iter()
                .zip(&b.data)
                .all(|(x, y)| (x - y * c).abs() <= 4.0 * f64::EPSILON * c);
            if settled {
                // every later c_s equals c, and the weights 2^-s sum to `weight`
                return acc + c.ln() * weight;
            }
            std::mem::swap(&mut b, &mut next);
            weight *= 0.5;
        }
        let last = b.norm_op1();
        if last == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc + last.ln() * weight
    }

    pub fn spectral_radius_unchecked(&self) -> f64 {
        self.log_spectral_radius().exp()
    }
}

/// `out = a * b`.
#[inline]
pub fn mul_into(a: &Mat, b: &Mat, out: &mut Mat) {
    let n = a.n;
    debug_assert!(b.n == n && out.n == n);
    out.data.iter_mut().for_each(|x| *x = 0.0);
    for i in 0..n {
        let ar = &a.data[i * n..(i + 1) * n];
        let or = &mut out.data[i * n..(i + 1) * n];
        for (k, &aik) in ar.iter().enumerate() {
            if aik == 0.0 {
                continue;
            }
            let br = &b.data[k * n..(k + 1) * n];
            for (o, &bkj) in or.iter_mut().zip(br) {
                *o += aik * bkj;
            }
        }
    }
}

/// Spectral radius of a nonnegative square matrix given by rows.
pub fn spectral_radius(rows: &[Vec<f64>]) -> Result<f64> {
    if rows.len() > 64 {
        return Err(Error::InvalidArgument("matrix larger than 64 x 64".into()));
    }
    Ok(Mat::from_rows(rows)?.spectral_radius_unchecked())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_zero() {
        assert!((Mat::identity(3).spectral_radius_unchecked() - 1.0).abs() < 1e-15);
        assert_eq!(Mat::zeros(3).spectral_radius_unchecked(), 0.0);
        let nil = Mat::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(nil.spectral_radius_unchecked(), 0.0);
    }

    #[test]
    fn two_by_two_block() {
        let a = Mat::from_rows(&[
            vec![4.0 / 16.0, 1.0 / 16.0, 0.0],
            vec![1.0 / 16.0, 4.0 / 16.0, 0.0],
            vec![0.0, 6.0 / 16.0, 0.0],
        ])
        .unwrap();
        assert!((a.spectral_radius_unchecked() - 5.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn matches_the_characteristic_polynomial() {
        // [[1,1],[1,0]] has Perron root (1 + sqrt 5) / 2
        let g = spectral_radius(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((g - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-13);
        // a Jordan block converges slowly under plain power iteration
        let j = spectral_radius(&[vec![0.5, 1.0], vec![0.0, 0.5]]).unwrap();
        assert!((j - 0.5).abs() < 1e-9);
        // cyclic permutation: the normalized iterate never settles
        let c = spectral_radius(&[
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 2.0],
            vec![2.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!((c - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(spectral_radius(&[vec![1.0, 0.0]]), Err(Error::NotSquare));
        assert_eq!(
            spectral_radius(&[vec![1.0, -0.5], vec![0.0, 1.0]]),
            Err(Error::NegativeEntry { row: 0, col: 1 })
        );
    }

    #[test]
    fn norms() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 0.5]]).unwrap();
        assert_eq!(a.norm_op1(), 4.0);
        assert_eq!(a.norm_opinf(), 3.5);
        assert_eq!(a.max_entry(), 3.0);
        let p = a.mul(&Mat::identity(2));
        assert_eq!(p, a);
    }
}
