//! Matrix linear differential operators `Σ X_j(x) ∂^j` and Schrödinger
//! operators `-∂² I_n + V(x)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::FnMatrix;
use crate::linalg::CMatrix;
use crate::sampling::{sample_max_abs, sample_max_diff, Grid, Residual};

/// `Σ_{j=0}^{N} X_j(x) ∂^j` with `n x n` coefficient matrices.
#[derive(Debug, Clone)]
pub struct MatrixDiffOp {
    n: usize,
    coeffs: Vec<FnMatrix>,
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

impl MatrixDiffOp {
    /// Builds an operator from coefficients `[X_0, ..., X_N]`.
    pub fn new(coeffs: Vec<FnMatrix>) -> Result<Self> {
        let n = coeffs.first().map(FnMatrix::rows).ok_or_else(|| {
            Error::DimensionMismatch("an operator needs at least one coefficient".into())
        })?;
        if coeffs.iter().any(|c| c.rows() != n || c.cols() != n) {
            return Err(Error::DimensionMismatch("coefficients must all be n x n".into()));
        }
        Ok(MatrixDiffOp { n, coeffs })
    }

    pub fn zero(n: usize) -> Self {
        MatrixDiffOp { n, coeffs: vec![FnMatrix::zeros(n, n)] }
    }

    pub fn identity(n: usize) -> Self {
        MatrixDiffOp { n, coeffs: vec![FnMatrix::identity(n)] }
    }

    /// Multiplication by a matrix function.
    pub fn multiplication(m: FnMatrix) -> Result<Self> {
        Self::new(vec![m])
    }

    pub fn constant(m: &CMatrix) -> Result<Self> {
        Self::new(vec![FnMatrix::from_constant(m)])
    }

    /// `∂ I_n`.
    pub fn derivative(n: usize) -> Self {
        MatrixDiffOp { n, coeffs: vec![FnMatrix::zeros(n, n), FnMatrix::identity(n)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[FnMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Option<&FnMatrix> {
        self.coeffs.get(j)
    }

    pub fn leading(&self) -> &FnMatrix {
        self.coeffs.last().expect("operator has at least one coefficient")
    }

    /// Drops leading coefficients that are identically (symbolically) zero.
    fn trimmed(mut self) -> Self {
        while self.coeffs.len() > 1 && self.leading().is_zero() {
            self.coeffs.pop();
        }
        self
    }

    fn check_n(&self, other: &MatrixDiffOp) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "operators of size {} and {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// `Σ_j X_j f^(j)` for a column vector of functions.
    pub fn apply(&self, f: &FnMatrix) -> Result<FnMatrix> {
        if f.rows() != self.n || f.cols() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "applying a {}x{} operator to a {}x{} function",
                self.n,
                self.n,
                f.rows(),
                f.cols()
            )));
        }
        let mut acc = FnMatrix::zeros(self.n, 1);
        let mut deriv = f.clone();
        for (j, x) in self.coeffs.iter().enumerate() {
            if j > 0 {
                deriv = deriv.derive(1);
            }
            acc = acc.add(&x.mul(&deriv)?)?;
        }
        Ok(acc)
    }

    /// `self ∘ other` by the Leibniz rule:
    /// `X_j ∂^j ∘ Y_k ∂^k = Σ_r C(j,r) X_j Y_k^(j-r) ∂^(k+r)`.
    pub fn compose(&self, other: &MatrixDiffOp) -> Result<MatrixDiffOp> {
        self.check_n(other)?;
        let order = self.order() + other.order();
        let mut out = vec![FnMatrix::zeros(self.n, self.n); order + 1];
        // derivs[k][d] = d-th derivative of other's X_k
        let derivs: Vec<Vec<FnMatrix>> = other
            .coeffs
            .iter()
            .map(|y| {
                let mut list = vec![y.clone()];
                for d in 1..=self.order() {
                    list.push(list[d - 1].derive(1));
                }
                list
            })
            .collect();
        for (j, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, dk) in derivs.iter().enumerate() {
                for r in 0..=j {
                    let y = &dk[j - r];
                    if y.is_zero() {
                        continue;
                    }
                    let c = binomial(j, r) as f64;
                    let mut term = x.mul(y)?;
                    if c != 1.0 {
                        term = term.scale(&c.into());
                    }
                    out[k + r] = out[k + r].add(&term)?;
                }
            }
        }
        Ok(MatrixDiffOp { n: self.n, coeffs: out }.trimmed())
    }

    pub fn add(&self, other: &MatrixDiffOp) -> Result<MatrixDiffOp> {
        self.check_n(other)?;
        let order = self.order().max(other.order());
        let zero = FnMatrix::zeros(self.n, self.n);
        let coeffs = (0..=order)
            .map(|j| {
                self.coeff(j).unwrap_or(&zero).add(other.coeff(j).unwrap_or(&zero))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixDiffOp { n: self.n, coeffs }.trimmed())
    }

    pub fn sub(&self, other: &MatrixDiffOp) -> Result<MatrixDiffOp> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MatrixDiffOp {
        MatrixDiffOp { n: self.n, coeffs: self.coeffs.iter().map(FnMatrix::neg).collect() }
    }

    /// Constant matrix applied from the left to every coefficient.
    pub fn left_mul_const(&self, m: &CMatrix) -> Result<MatrixDiffOp> {
        let coeffs = self.coeffs.iter().map(|c| c.left_mul_const(m)).collect::<Result<Vec<_>>>()?;
        Ok(MatrixDiffOp { n: self.n, coeffs }.trimmed())
    }
}

/// `-∂² I_n + V(x)`.
#[derive(Debug, Clone)]
pub struct SchrodingerOp {
    potential: FnMatrix,
}

impl SchrodingerOp {
    pub fn new(potential: FnMatrix) -> Result<Self> {
        if !potential.is_square() {
            return Err(Error::DimensionMismatch("potential must be square".into()));
        }
        Ok(SchrodingerOp { potential })
    }

    /// `-∂² I_n`.
    pub fn free(n: usize) -> Self {
        SchrodingerOp { potential: FnMatrix::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.potential.rows()
    }

    pub fn potential(&self) -> &FnMatrix {
        &self.potential
    }

    pub fn to_diffop(&self) -> MatrixDiffOp {
        let n = self.n();
        MatrixDiffOp {
            n,
            coeffs: vec![self.potential.clone(), FnMatrix::zeros(n, n), FnMatrix::identity(n).neg()],
        }
    }
}

/// `Σ_l A_l H^l` with constant matrices multiplying from the left.
pub fn poly_in_h(h: &SchrodingerOp, coeffs: &[CMatrix]) -> Result<MatrixDiffOp> {
    let n = h.n();
    if coeffs.iter().any(|a| a.rows() != n || a.cols() != n) {
        return Err(Error::DimensionMismatch("polynomial coefficients must be n x n".into()));
    }
    let h_op = h.to_diffop();
    let mut power = MatrixDiffOp::identity(n);
    let mut acc = MatrixDiffOp::zero(n);
    for (l, a) in coeffs.iter().enumerate() {
        if l > 0 {
            power = power.compose(&h_op)?;
        }
        acc = acc.add(&power.left_mul_const(a)?)?;
    }
    Ok(acc)
}

/// Sampled coefficientwise distance between two operators; missing orders
/// count as zero.
pub fn op_equal(a: &MatrixDiffOp, b: &MatrixDiffOp, grid: &Grid, tol: f64) -> Result<Residual> {
    a.check_n(b)?;
    let order = a.order().max(b.order());
    let zero = FnMatrix::zeros(a.n, a.n);
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..=order {
        lhs.extend_from_slice(a.coeff(j).unwrap_or(&zero).entries());
        rhs.extend_from_slice(b.coeff(j).unwrap_or(&zero).entries());
    }
    Ok(sample_max_diff(&lhs, &rhs, grid, tol))
}

/// Result of checking `Q H₊ = H₋ Q` together with its two consequences:
/// constant leading coefficient and the partner-potential relation.
#[derive(Debug, Clone, Serialize)]
pub struct IntertwiningReport {
    pub operator: Residual,
    pub leading_constant: Residual,
    pub partner_potential: Residual,
}

impl IntertwiningReport {
    pub fn passed(&self) -> bool {
        self.operator.passed() && self.leading_constant.passed() && self.partner_potential.passed()
    }

    pub fn worst(&self) -> Residual {
        self.operator.combine(&self.leading_constant).combine(&self.partner_potential)
    }
}

/// Value of the leading coefficient: the literal constant when it is one,
/// otherwise its value at the first evaluable grid point.
pub(crate) fn leading_value(q: &MatrixDiffOp, grid: &Grid) -> Result<CMatrix> {
    if let Some(c) = q.leading().as_constant() {
        return Ok(c);
    }
    grid.points()
        .find_map(|x| q.leading().eval(x, grid.tau_zero).ok())
        .ok_or(Error::InsufficientGrid { usable: 0, total: grid.count })
}

pub fn intertwining_residual(
    q: &MatrixDiffOp,
    h_plus: &SchrodingerOp,
    h_minus: &SchrodingerOp,
    grid: &Grid,
    tol: f64,
) -> Result<IntertwiningReport> {
    let n = q.n();
    if h_plus.n() != n || h_minus.n() != n {
        return Err(Error::DimensionMismatch("operator and Hamiltonians differ in size".into()));
    }
    let lead = leading_value(q, grid)?;
    let lead_inv = lead.solve_with(&CMatrix::identity(n), grid.tau_zero)?;

    let lhs = q.compose(&h_plus.to_diffop())?;
    let rhs = h_minus.to_diffop().compose(q)?;
    let operator = op_equal(&lhs, &rhs, grid, tol)?;

    let leading_constant = if q.leading().as_constant().is_some() {
        Residual { max: 0.0, tol, usable: grid.count, total: grid.count, skipped: Vec::new() }
    } else {
        sample_max_abs(q.leading().derive(1).entries(), grid, tol)
    };

    // V₋ = X_N V₊ X_N⁻¹ + 2 X'_{N-1} X_N⁻¹
    let mut expected = h_plus.potential().left_mul_const(&lead)?.right_mul_const(&lead_inv)?;
    if q.order() > 0 {
        let shift = q.coeffs()[q.order() - 1].derive(1).right_mul_const(&lead_inv.scale(2.0.into()))?;
        expected = expected.add(&shift)?;
    }
    let partner_potential =
        sample_max_diff(h_minus.potential().entries(), expected.entries(), grid, tol);

    Ok(IntertwiningReport { operator, leading_constant, partner_potential })
}
