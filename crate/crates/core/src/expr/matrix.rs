use std::collections::HashMap;

use num_complex::Complex64;

use super::{ScalarFn, Tape};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Dense matrix whose entries are [`ScalarFn`]s. Column vectors are `n x 1`.
#[derive(Clone, Debug)]
pub struct FnMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ScalarFn>,
}

impl FnMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<ScalarFn>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(FnMatrix { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ScalarFn) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        FnMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| ScalarFn::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ScalarFn::one() } else { ScalarFn::zero() })
    }

    pub fn from_constant(m: &CMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| ScalarFn::constant(m[(i, j)]))
    }

    pub fn column(entries: Vec<ScalarFn>) -> Self {
        let rows = entries.len();
        FnMatrix { rows, cols: 1, entries }
    }

    /// Scalar function times a constant column vector.
    pub fn scaled_vector(f: &ScalarFn, v: &[Complex64]) -> Self {
        Self::column(v.iter().map(|&c| f.scale(c)).collect())
    }

    /// Places column vectors side by side.
    pub fn from_columns(columns: &[FnMatrix]) -> Result<Self> {
        let rows = columns.first().map(|c| c.rows).unwrap_or(0);
        if columns.is_empty() || columns.iter().any(|c| c.cols != 1 || c.rows != rows) {
            return Err(Error::DimensionMismatch("columns must be vectors of equal length".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j].entries[i].clone()))
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

    pub fn get(&self, i: usize, j: usize) -> &ScalarFn {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[ScalarFn] {
        &self.entries
    }

    pub fn col(&self, j: usize) -> FnMatrix {
        Self::column((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    /// Columns `start..end` as a new matrix.
    pub fn col_range(&self, start: usize, end: usize) -> FnMatrix {
        Self::from_fn(self.rows, end - start, |i, j| self.get(i, start + j).clone())
    }

    pub fn map(&self, f: impl Fn(&ScalarFn) -> ScalarFn) -> FnMatrix {
        FnMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    /// Entrywise derivative. Subexpressions shared between entries are
    /// differentiated once.
    pub fn derive(&self, order: usize) -> FnMatrix {
        let mut m = self.clone();
        for _ in 0..order {
            let mut memo = HashMap::new();
            m.entries = m.entries.iter().map(|e| e.derive_once(&mut memo)).collect();
        }
        m
    }

    /// Entries if they are all literal constants.
    pub fn as_constant(&self) -> Option<CMatrix> {
        let vals: Option<Vec<Complex64>> = self.entries.iter().map(|e| e.as_constant()).collect();
        vals.map(|v| CMatrix::new(self.rows, self.cols, v).expect("shape already validated"))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn tape(&self) -> Tape {
        Tape::compile(&self.entries)
    }

    pub fn eval(&self, x: f64, tau_zero: f64) -> Result<CMatrix> {
        let vals = self.tape().eval_point(x, tau_zero)?;
        CMatrix::new(self.rows, self.cols, vals)
    }

    fn check_same_shape(&self, other: &FnMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &FnMatrix) -> Result<FnMatrix> {
        self.check_same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j)))
    }

    pub fn sub(&self, other: &FnMatrix) -> Result<FnMatrix> {
        self.check_same_shape(other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j)))
    }

    pub fn mul(&self, other: &FnMatrix) -> Result<FnMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(ScalarFn::zero(), |acc, k| acc + self.get(i, k) * other.get(k, j))
        }))
    }

    /// Constant matrix on the left.
    pub fn left_mul_const(&self, m: &CMatrix) -> Result<FnMatrix> {
        FnMatrix::from_constant(m).mul(self)
    }

    /// Constant matrix on the right.
    pub fn right_mul_const(&self, m: &CMatrix) -> Result<FnMatrix> {
        self.mul(&FnMatrix::from_constant(m))
    }

    pub fn scale(&self, f: &ScalarFn) -> FnMatrix {
        self.map(|e| e * f)
    }

    pub fn neg(&self) -> FnMatrix {
        self.map(|e| -e)
    }

    /// Symbolic determinant by Laplace expansion, memoized over column subsets.
    pub fn det(&self) -> Result<ScalarFn> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        if self.rows > 63 {
            return Err(Error::DimensionMismatch("matrix too large for symbolic determinant".into()));
        }
        let full: u64 = (1u64 << self.cols) - 1;
        let mut memo = HashMap::new();
        Ok(self.minor_det(0, full, &mut memo))
    }

    fn minor_det(&self, row: usize, cols: u64, memo: &mut HashMap<u64, ScalarFn>) -> ScalarFn {
        if cols == 0 {
            return ScalarFn::one();
        }
        if let Some(d) = memo.get(&cols) {
            return d.clone();
        }
        let mut acc = ScalarFn::zero();
        let mut position = 0;
        for c in 0..self.cols {
            if cols & (1 << c) == 0 {
                continue;
            }
            let a = self.get(row, c);
            if !a.is_zero() {
                let term = a * self.minor_det(row + 1, cols & !(1 << c), memo);
                acc = if position % 2 == 0 { acc + term } else { acc - term };
            }
            position += 1;
        }
        memo.insert(cols, acc.clone());
        acc
    }

    fn without(&self, row: usize, col: usize) -> FnMatrix {
        let mut entries = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != row) {
            for j in (0..self.cols).filter(|&j| j != col) {
                entries.push(self.get(i, j).clone());
            }
        }
        FnMatrix { rows: self.rows - 1, cols: self.cols - 1, entries }
    }

    /// Classical adjoint, so that `A * adj(A) = det(A) I`.
    pub fn adjugate(&self) -> Result<FnMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("adjugate of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 1 {
            return Ok(FnMatrix::identity(1));
        }
        let mut cof = vec![ScalarFn::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let m = self.without(i, j).det()?;
                // adj[j][i] = (-1)^(i+j) M_ij
                cof[j * n + i] = if (i + j) % 2 == 0 { m } else { -m };
            }
        }
        Ok(FnMatrix { rows: n, cols: n, entries: cof })
    }

    /// Symbolic inverse `adj(A) / det(A)`.
    pub fn inverse(&self) -> Result<FnMatrix> {
        let det = self.det()?;
        let adj = self.adjugate()?;
        Ok(adj.map(|e| e / &det))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sample() -> FnMatrix {
        let x = ScalarFn::x();
        FnMatrix::new(
            3,
            3,
            vec![
                x.exp(),
                x.sin(),
                ScalarFn::real(2.0),
                x.clone(),
                x.cosh(),
                x.powi(2),
                ScalarFn::one(),
                x.cos(),
                x.sinh(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn symbolic_det_matches_numeric() {
        let m = sample();
        let d = m.det().unwrap();
        for &t in &[-1.3, 0.0, 0.7, 2.2] {
            let numeric = m.eval(t, 1e-12).unwrap().det().unwrap();
            assert!((d.eval(t).unwrap() - numeric).norm() < 1e-12 * (1.0 + numeric.norm()));
        }
    }

    #[test]
    fn adjugate_identity() {
        let m = sample();
        let prod = m.mul(&m.adjugate().unwrap()).unwrap();
        let d = m.det().unwrap();
        for &t in &[-0.4, 1.1] {
            let p = prod.eval(t, 1e-12).unwrap();
            let dv = d.eval(t).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { dv } else { c(0.0) };
                    assert!((p[(i, j)] - want).norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn shape_errors() {
        let a = FnMatrix::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(Error::DimensionMismatch(_))));
        assert!(a.det().is_err());
        assert!(FnMatrix::new(2, 2, vec![ScalarFn::one()]).is_err());
    }

    #[test]
    fn constant_detection() {
        let m = FnMatrix::identity(2).add(&FnMatrix::identity(2)).unwrap();
        assert_eq!(m.as_constant().unwrap()[(1, 1)], c(2.0));
        assert!(FnMatrix::column(vec![ScalarFn::x()]).as_constant().is_none());
    }
}
