//! Dense complex matrices and Jordan chain data.

mod jordan;

pub use jordan::{assemble_matrix, verify_chains, ChainVectors, EigenRecord, JordanSpec};

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::TAU_ZERO;

pub type CVector = Vec<Complex64>;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Real-valued convenience constructor.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_columns(columns: &[CVector]) -> Result<Self> {
        let rows = columns.first().map(Vec::len).unwrap_or(0);
        if columns.is_empty() || columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("columns must have equal length".into()));
        }
        if rows == 0 {
            return Err(Error::DimensionMismatch("empty column".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { Complex64::new(0.0, 0.0) })
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

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> CVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    fn same_shape(&self, other: &CMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + other[(i, j)]))
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)]))
    }

    pub fn mat_mul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()
        }))
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<CVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        Ok((0..self.rows).map(|i| (0..self.cols).map(|k| self[(i, k)] * v[k]).sum()).collect())
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &CMatrix) -> Result<CMatrix> {
        self.mat_mul(other)?.sub(&other.mat_mul(self)?)
    }

    /// LU factorization with partial pivoting; returns the packed factors, the
    /// row permutation and its sign.
    fn lu(&self, tau_zero: f64) -> Result<(CMatrix, Vec<usize>, f64)> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("LU of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= tau_zero {
                return Err(Error::SingularMatrix { pivot });
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let d = a[(k, k)];
            for i in (k + 1)..n {
                let f = a[(i, k)] / d;
                a[(i, k)] = f;
                for j in (k + 1)..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= f * t;
                }
            }
        }
        Ok((a, perm, sign))
    }

    /// Determinant by partial-pivot elimination. A singular matrix yields zero.
    pub fn det(&self) -> Result<Complex64> {
        match self.lu(0.0) {
            Ok((lu, _, sign)) => {
                Ok((0..self.rows).map(|i| lu[(i, i)]).product::<Complex64>() * sign)
            }
            Err(Error::SingularMatrix { .. }) => Ok(Complex64::new(0.0, 0.0)),
            Err(e) => Err(e),
        }
    }

    /// Solves `self * X = rhs` with the default pivot threshold.
    pub fn solve(&self, rhs: &CMatrix) -> Result<CMatrix> {
        self.solve_with(rhs, TAU_ZERO)
    }

    pub fn solve_with(&self, rhs: &CMatrix, tau_zero: f64) -> Result<CMatrix> {
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch("right-hand side rows".into()));
        }
        let n = self.rows;
        let (lu, perm, _) = self.lu(tau_zero)?;
        let mut x = Self::from_fn(n, rhs.cols, |i, j| rhs[(perm[i], j)]);
        for j in 0..rhs.cols {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in (i + 1)..n {
                    s -= lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.solve(&Self::identity(self.rows))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

/// Max-magnitude norm of a vector.
pub fn vec_max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
