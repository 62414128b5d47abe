//! Small dense matrices for the tableau algebra.
//!
//! Everything here operates on matrices of stage-count size (at most 16 or
//! so), which is why the routines are direct and dependency-free: forward
//! substitution for triangular inverses, partial-pivot elimination for the
//! constructor's linear systems, and cyclic Jacobi sweeps for symmetric
//! eigenvalues.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::scalar::{cast, Real};

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular system (pivot {pivot} below threshold at column {col})")]
    Singular { col: usize, pivot: f64 },
    #[error("Jacobi sweep did not converge in {0} sweeps")]
    NoConvergence(usize),
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// All-ones matrix (the certificate matrix `E`).
    pub fn ones(n: usize) -> Self {
        Self { rows: n, cols: n, data: vec![T::one(); n * n] }
    }

    /// Lower-triangular all-ones matrix, diagonal included (the certificate
    /// matrix of partial sums).
    pub fn lower_ones(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                m[(i, j)] = T::one();
            }
        }
        m
    }

    pub fn from_rows(rows: &[&[T]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
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

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sum(&self, i: usize) -> T {
        self.row(i).iter().fold(T::zero(), |acc, &x| acc + x)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &x)| acc + a * x)
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: T) -> Self {
        let data = self.data.iter().map(|&a| a * c).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// `(M + M^T) / 2`.
    pub fn symmetrize(&self) -> Self {
        assert!(self.is_square(), "symmetrizer of a non-square matrix");
        let half = cast::<T>(0.5);
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = (self[(i, j)] + self[(j, i)]) * half;
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> fmt::Display for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Solves `a x = rhs` by Gaussian elimination with partial pivoting.
pub fn solve<T: Real>(a: &Mat<T>, rhs: &[T]) -> Result<Vec<T>, LinalgError> {
    if a.rows == 0 {
        return Err(LinalgError::Empty);
    }
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows, cols: a.cols });
    }
    if rhs.len() != a.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "rhs length {} vs matrix order {}",
            rhs.len(),
            a.rows
        )));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut x = rhs.to_vec();
    let pivot_tol = T::epsilon() * cast::<T>(16.0) * (m.max_abs() + T::one());
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[(r, col)].abs() > m[(piv, col)].abs() {
                piv = r;
            }
        }
        let p = m[(piv, col)];
        if p.abs() <= pivot_tol {
            return Err(LinalgError::Singular {
                col,
                pivot: p.abs().to_f64().unwrap_or(0.0),
            });
        }
        if piv != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            x.swap(col, piv);
        }
        for r in col + 1..n {
            let factor = m[(r, col)] / m[(col, col)];
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                m[(r, j)] = m[(r, j)] - factor * m[(col, j)];
            }
            x[r] = x[r] - factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in col + 1..n {
            acc = acc - m[(col, j)] * x[j];
        }
        x[col] = acc / m[(col, col)];
    }
    Ok(x)
}

/// Inverts a lower-triangular matrix by forward substitution.
pub fn invert_lower<T: Real>(l: &Mat<T>) -> Result<Mat<T>, LinalgError> {
    if l.rows == 0 {
        return Err(LinalgError::Empty);
    }
    if !l.is_square() {
        return Err(LinalgError::NotSquare { rows: l.rows, cols: l.cols });
    }
    let n = l.rows;
    for i in 0..n {
        if l[(i, i)] == T::zero() {
            return Err(LinalgError::Singular { col: i, pivot: 0.0 });
        }
    }
    let mut inv = Mat::zeros(n, n);
    // Column by column: solve L x = e_j.
    for j in 0..n {
        for i in j..n {
            let mut acc = if i == j { T::one() } else { T::zero() };
            for k in j..i {
                acc = acc - l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = acc / l[(i, i)];
        }
    }
    Ok(inv)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// The sweep threshold follows the off-diagonal magnitudes down to
/// `max(1e-14, eps-scaled)` so the returned values carry absolute error well
/// below 1e-12 for the stage-count-sized matrices this crate produces.
pub fn sym_eigenvalues<T: Real>(m: &Mat<T>) -> Result<Vec<T>, LinalgError> {
    if m.rows == 0 {
        return Err(LinalgError::Empty);
    }
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a = m.clone();
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let scale = a.max_abs().max(T::one());
    let tol = (T::epsilon() * scale * cast::<T>(4.0)).max(cast::<T>(1e-14));
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= tol {
            let mut eig: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
            eig.sort_by(|x, y| x.partial_cmp(y).expect("NaN eigenvalue"));
            return Ok(eig);
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= tol {
                    continue;
                }
                // Classical two-sided rotation (Golub & Van Loan 8.4).
                let theta = (a[(q, q)] - a[(p, p)]) / (cast::<T>(2.0) * apq);
                let t = {
                    let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(p, k)] = a[(k, p)];
                    a[(k, q)] = s * akp + c * akq;
                    a[(q, k)] = a[(k, q)];
                }
            }
        }
    }
    Err(LinalgError::NoConvergence(MAX_SWEEPS))
}
