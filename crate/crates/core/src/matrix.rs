//! Dense row-major matrices over a [`Scalar`] backend.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimensions(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidDimensions(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidDimensions("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(rows > 0 && cols > 0, "matrix must be non-empty");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(l, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    /// Columns `cols` (in the given order) as a new matrix.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Determinant by Gaussian elimination with largest-magnitude pivoting.
    pub fn det(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch {
                op: "det",
                left: self.shape(),
                right: self.shape(),
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = T::one();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .abs()
                        .partial_cmp(&a[s * n + col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a[piv * n + col].is_zero() {
                return Ok(T::zero());
            }
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                }
                det = -det;
            }
            let p = a[col * n + col].clone();
            det = det * p.clone();
            for r in col + 1..n {
                let f = a[r * n + col].clone() / p.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col + 1..n {
                    let v = a[r * n + c].clone() - f.clone() * a[col * n + c].clone();
                    a[r * n + c] = v;
                }
            }
        }
        Ok(det)
    }

    /// Rank by row reduction. Pivots with `|p| <= tol * max|entry|` count as
    /// zero; the exact backend with `tol = 0` is exact.
    pub fn rank(&self, tol: f64) -> usize {
        let (m, n) = self.shape();
        let mut a = self.data.clone();
        let thresh = tol * self.max_abs();
        let mut rank = 0;
        for col in 0..n {
            if rank == m {
                break;
            }
            let piv = (rank..m)
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .abs()
                        .partial_cmp(&a[s * n + col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            let p = a[piv * n + col].clone();
            if p.is_zero() || p.to_f64().abs() <= thresh {
                continue;
            }
            for c in 0..n {
                a.swap(piv * n + c, rank * n + c);
            }
            for r in rank + 1..m {
                let f = a[r * n + col].clone() / p.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a[r * n + c].clone() - f.clone() * a[rank * n + c].clone();
                    a[r * n + c] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solves `self * X = rhs` for square `self`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if self.rows != self.cols || rhs.rows != self.rows {
            return Err(Error::ShapeMismatch {
                op: "solve",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let n = self.rows;
        let w = rhs.cols;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        let thresh = if T::EXACT { 0.0 } else { 1e-13 * self.max_abs() };
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .abs()
                        .partial_cmp(&a[s * n + col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            let p = a[piv * n + col].clone();
            if p.is_zero() || p.to_f64().abs() <= thresh {
                return Err(Error::Singular);
            }
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                }
                for c in 0..w {
                    b.swap(piv * w + c, col * w + c);
                }
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col].clone() / p.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a[r * n + c].clone() - f.clone() * a[col * n + c].clone();
                    a[r * n + c] = v;
                }
                for c in 0..w {
                    let v = b[r * w + c].clone() - f.clone() * b[col * w + c].clone();
                    b[r * w + c] = v;
                }
            }
        }
        for r in 0..n {
            let p = a[r * n + r].clone();
            for c in 0..w {
                b[r * w + c] = b[r * w + c].clone() / p.clone();
            }
        }
        Matrix::new(n, w, b)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Self::identity(self.rows))
    }
}

impl Matrix<f64> {
    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    pub fn expm(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch {
                op: "expm",
                left: self.shape(),
                right: self.shape(),
            });
        }
        let norm = self.norm();
        let mut squarings = 0;
        let mut scale = 1.0;
        while norm * scale > 0.25 {
            scale *= 0.5;
            squarings += 1;
        }
        let a = self.scale(&scale);
        let mut term = Self::identity(self.rows);
        let mut sum = term.clone();
        for j in 1..=24 {
            term = term.matmul(&a)?.scale(&(1.0 / j as f64));
            sum = sum.add(&term)?;
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum)?;
        }
        Ok(sum)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn q(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn det_exact() {
        let m = q(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]]);
        assert_eq!(m.det().unwrap(), rat(6, 1));
        let singular = q(&[&[1, 2], &[2, 4]]);
        assert_eq!(singular.det().unwrap(), rat(0, 1));
    }

    #[test]
    fn rank_and_solve() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(m.rank(0.0), 2);
        let a = q(&[&[2, 1], &[1, 3]]);
        let x = a.solve(&q(&[&[3], &[5]])).unwrap();
        assert_eq!(x, Matrix::from_rows(vec![vec![rat(4, 5)], vec![rat(7, 5)]]).unwrap());
        assert!(matches!(q(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular)));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Matrix::<f64>::new(0, 3, vec![]).is_err());
        assert!(Matrix::<f64>::new(2, 2, vec![1.0; 3]).is_err());
        let a = Matrix::<f64>::identity(2);
        let b = Matrix::<f64>::zeros(3, 3);
        assert!(a.matmul(&b).is_err());
    }

    #[test]
    fn expm_of_diagonal() {
        let d = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, -2.0]]).unwrap();
        let e = d.expm().unwrap();
        assert!((e[(0, 0)] - 1f64.exp()).abs() < 1e-13);
        assert!((e[(1, 1)] - (-2f64).exp()).abs() < 1e-13);
        assert!(e[(0, 1)].abs() < 1e-15);
    }
}
