//! Small dense row-major matrices.
//!
//! Dimensions in this crate are tiny (a handful of coordinates), so plain
//! Gauss-Jordan elimination with partial pivoting is enough.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn scalar(v: T) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![v],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data_iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    /// Block `rows × cols` as a new matrix.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r, c) = (rows.len(), cols.len());
        let mut data = Vec::with_capacity(r * c);
        for i in rows {
            data.extend_from_slice(&self.data[i * self.cols + cols.start..i * self.cols + cols.end]);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| crate::scalar::dot(self.row(i), x))
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == T::zero())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == T::zero()))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol * T::one().max(self[(i, j)].abs()))
            })
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
    }

    /// Quadratic form `xᵀ M x`.
    pub fn quad_form(&self, x: &[T]) -> T {
        crate::scalar::dot(x, &self.mul_vec(x))
    }

    /// Inverse via Gauss-Jordan with partial pivoting; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let eps = T::epsilon() * T::lit(64.0) * T::one().max(self.max_abs());
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| {
                a[(i, col)].abs().partial_cmp(&a[(j, col)].abs()).unwrap()
            })?;
            if a[(piv, col)].abs() <= eps {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] / p;
                inv[(col, j)] = inv[(col, j)] / p;
            }
            for i in 0..n {
                if i != col {
                    let f = a[(i, col)];
                    if f != T::zero() {
                        for j in 0..n {
                            a[(i, j)] = a[(i, j)] - f * a[(col, j)];
                            inv[(i, j)] = inv[(i, j)] - f * inv[(col, j)];
                        }
                    }
                }
            }
        }
        Some(inv)
    }

    /// Solve `M x = b` for square nonsingular `M`.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        self.inverse().map(|inv| inv.mul_vec(b))
    }

    /// A solution of `M x = b` for square, possibly singular `M`, with free
    /// variables set to zero. `None` when the system is inconsistent.
    pub fn solve_consistent(&self, b: &[T]) -> Option<Vec<T>> {
        let n = self.rows;
        if !self.is_square() || b.len() != n {
            return None;
        }
        let mut a = self.clone();
        let mut r = b.to_vec();
        let scale = T::one().max(self.max_abs());
        let eps = T::epsilon() * T::lit(1024.0) * scale;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row == n {
                break;
            }
            let piv = (row..n)
                .max_by(|&i, &j| a[(i, col)].abs().partial_cmp(&a[(j, col)].abs()).unwrap())
                .unwrap();
            if a[(piv, col)].abs() <= eps {
                continue;
            }
            for j in 0..n {
                a.data.swap(piv * n + j, row * n + j);
            }
            r.swap(piv, row);
            let p = a[(row, col)];
            for j in 0..n {
                a[(row, j)] = a[(row, j)] / p;
            }
            r[row] = r[row] / p;
            for i in 0..n {
                if i != row {
                    let f = a[(i, col)];
                    if f != T::zero() {
                        for j in 0..n {
                            a[(i, j)] = a[(i, j)] - f * a[(row, j)];
                        }
                        r[i] = r[i] - f * r[row];
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        let rscale = T::one().max(b.iter().fold(T::zero(), |m, v| m.max(v.abs())));
        if r[row..].iter().any(|v| v.abs() > eps * rscale) {
            return None;
        }
        let mut x = vec![T::zero(); n];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = r[i];
        }
        Some(x)
    }

    /// Symmetric positive semidefiniteness and definiteness via pivoted
    /// LDLᵀ. Returns `(psd, rank)`.
    pub fn psd_rank(&self, tol: T) -> (bool, usize) {
        if !self.is_square() {
            return (false, 0);
        }
        let n = self.rows;
        let mut a = self.clone();
        let scale = T::one().max(self.max_abs());
        let mut active: Vec<usize> = (0..n).collect();
        let mut rank = 0;
        while !active.is_empty() {
            let (pos, &k) = active
                .iter()
                .enumerate()
                .max_by(|x, y| a[(*x.1, *x.1)].partial_cmp(&a[(*y.1, *y.1)]).unwrap())
                .unwrap();
            let d = a[(k, k)];
            if d <= tol * scale {
                // remaining Schur complement must vanish
                let ok = active.iter().all(|&i| {
                    active.iter().all(|&j| a[(i, j)].abs() <= tol * scale)
                });
                return (ok, rank);
            }
            active.remove(pos);
            for &i in &active {
                for &j in &active {
                    a[(i, j)] = a[(i, j)] - a[(i, k)] * a[(k, j)] / d;
                }
            }
            rank += 1;
        }
        (true, rank)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_systems() {
        let m = Matrix::from_rows(&[vec![1.0f64, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(m.solve_consistent(&[2.0, 2.0]), Some(vec![2.0, 0.0]));
        assert_eq!(m.solve_consistent(&[1.0, 2.0]), None);
        assert_eq!(Matrix::<f64>::zeros(2, 2).solve_consistent(&[0.0, 0.0]), Some(vec![0.0, 0.0]));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_rows(&[vec![2.0f64, 1.0], vec![1.0, 3.0]]).unwrap();
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - e).abs() < 1e-14);
            }
        }
        let sing = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn psd_detection() {
        let pd = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(pd.psd_rank(1e-12), (true, 2));
        let psd = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(psd.psd_rank(1e-12), (true, 1));
        let indef = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(!indef.psd_rank(1e-12).0);
        let neg = Matrix::from_rows(&[vec![0.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(!neg.psd_rank(1e-12).0);
        assert_eq!(Matrix::<f64>::zeros(3, 3).psd_rank(1e-12), (true, 0));
    }
}
