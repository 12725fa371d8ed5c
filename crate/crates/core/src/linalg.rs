//! Small dense square matrices. Alphabets here have a handful of symbols, so
//! row-major storage with naive products is all that is needed.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul};

use num_complex::Complex64;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq)]
pub struct Square<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Copy + Zero> Square<T> {
    pub fn zeros(dim: usize) -> Self {
        Square {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }
}

impl<T: Copy> Square<T> {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Square { dim, data }
    }

    /// Builds a matrix from rows. Returns `None` unless the rows form a
    /// square array.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Option<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return None;
            }
            data.extend_from_slice(row);
        }
        Some(Square { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn map<U: Copy>(&self, mut f: impl FnMut(T) -> U) -> Square<U> {
        Square {
            dim: self.dim,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T> Index<(usize, usize)> for Square<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Square<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Copy + Zero + Add<Output = T> + Mul<Output = T>> Square<T> {
    pub fn matmul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                for j in 0..d {
                    out.data[i * d + j] = out.data[i * d + j] + a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `out = self * v`.
    pub fn apply_into(&self, v: &[T], out: &mut [T]) {
        let d = self.dim;
        for (i, o) in out.iter_mut().enumerate().take(d) {
            let row = &self.data[i * d..(i + 1) * d];
            let mut acc = T::zero();
            for (a, x) in row.iter().zip(v) {
                acc = acc + *a * *x;
            }
            *o = acc;
        }
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        self.apply_into(v, &mut out);
        out
    }

    /// Row vector times matrix, `u * self`.
    pub fn apply_left(&self, u: &[T]) -> Vec<T> {
        let d = self.dim;
        let mut out = vec![T::zero(); d];
        for (i, &ui) in u.iter().enumerate().take(d) {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + ui * *a;
            }
        }
        out
    }
}

impl Square<bool> {
    pub fn bool_matmul(&self, other: &Self) -> Self {
        let d = self.dim;
        Square::from_fn(d, |i, j| (0..d).any(|k| self[(i, k)] && other[(k, j)]))
    }
}

impl Square<Complex64> {
    /// Maximum absolute row sum, the operator norm induced by the max norm.
    pub fn max_row_norm(&self) -> f64 {
        self.rows()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm. Exact along powers of normal matrices, so it does not
    /// oscillate for rotating peripheral spectra the way row norms do.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, s: f64) {
        for z in &mut self.data {
            *z = *z * s;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

pub fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Bilinear pairing `sum_i u_i v_i` (no conjugation).
pub fn pair(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn weighted_sum(w: &[f64], v: &[Complex64]) -> Complex64 {
    w.iter().zip(v).map(|(a, b)| b * *a).sum()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting. Returns
/// `None` for a numerically singular system.
pub fn solve(mut a: Square<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let d = a.dim();
    for col in 0..d {
        let pivot = (col..d).max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))?;
        if a[(pivot, col)].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for j in 0..d {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            b.swap(col, pivot);
        }
        for i in col + 1..d {
            let factor = a[(i, col)] / a[(col, col)];
            if factor == 0.0 {
                continue;
            }
            for j in col..d {
                a[(i, j)] -= factor * a[(col, j)];
            }
            b[i] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let mut acc = b[i];
        for j in i + 1..d {
            acc -= a[(i, j)] * x[j];
        }
        x[i] = acc / a[(i, i)];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let a = Square::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        let x = solve(a, vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15);
        assert!((x[1] - 1.4).abs() < 1e-15);
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows: [&[f64]; 2] = [&[1.0, 2.0], &[3.0]];
        assert!(Square::from_rows(&rows).is_none());
    }

    #[test]
    fn left_and_right_products_agree_with_transpose() {
        let m = Square::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(m.apply(&[1.0, 1.0]), vec![3.0, 7.0]);
        assert_eq!(m.apply_left(&[1.0, 1.0]), vec![4.0, 6.0]);
    }
}
