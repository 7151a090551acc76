//! Intertwining operators from a prescribed kernel, Wronskians of
//! vector-functions, partner potentials and chain checks.

use num_complex::Complex64;
use serde::Serialize;

use crate::diffop::{MatrixDiffOp, SchrodingerOp};
use crate::error::{Error, Result};
use crate::expr::{FnMatrix, ScalarFn};
use crate::linalg::CMatrix;
use crate::sampling::{sample_max_abs, Grid, Residual, MIN_USABLE_FRACTION};

/// Eigenfunction followed by associated functions for one spectral value:
/// `H Φ_0 = λ Φ_0`, `(H - λ) Φ_i = Φ_{i-1}`.
#[derive(Debug, Clone)]
pub struct Chain {
    pub lambda: Complex64,
    pub functions: Vec<FnMatrix>,
}

#[derive(Debug, Clone)]
pub struct ChainSet {
    n: usize,
    chains: Vec<Chain>,
}

impl ChainSet {
    pub fn new(n: usize, chains: Vec<Chain>) -> Result<Self> {
        for c in &chains {
            if c.functions.is_empty() {
                return Err(Error::InvalidSpec("empty chain".into()));
            }
            if c.functions.iter().any(|f| f.rows() != n || f.cols() != 1) {
                return Err(Error::DimensionMismatch(format!("chain functions must be {n}x1")));
            }
        }
        Ok(ChainSet { n, chains })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    /// All functions, chain by chain.
    pub fn members(&self) -> Vec<FnMatrix> {
        self.chains.iter().flat_map(|c| c.functions.iter().cloned()).collect()
    }
}

/// Stacked matrix of `nN` vector-functions and their first `N - 1`
/// derivatives: block row `j` holds the `j`-th derivatives.
#[derive(Debug, Clone)]
pub struct Wronskian {
    matrix: FnMatrix,
    order: usize,
}

/// Where a Wronskian was sampled and how close it came to vanishing.
#[derive(Debug, Clone, Serialize)]
pub struct WronskianScan {
    pub min_abs: f64,
    pub argmin: f64,
    pub threshold: f64,
    pub singular_points: Vec<f64>,
    pub skipped: Vec<f64>,
    pub usable: usize,
    pub total: usize,
}

impl WronskianScan {
    /// Nonvanishing on the grid (a grid certificate, not a proof on the axis).
    pub fn nonvanishing(&self) -> bool {
        self.singular_points.is_empty()
            && self.total > 0
            && self.usable as f64 / self.total as f64 >= MIN_USABLE_FRACTION
    }

    fn to_error(&self) -> Error {
        Error::SingularWronskian { min_abs: self.min_abs, x: self.argmin }
    }
}

impl Wronskian {
    pub fn matrix(&self) -> &FnMatrix {
        &self.matrix
    }

    /// Operator order `N` implied by the number of functions.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn eval(&self, x: f64, tau_zero: f64) -> Result<Complex64> {
        self.matrix.eval(x, tau_zero)?.det()
    }

    pub fn symbolic(&self) -> Result<ScalarFn> {
        self.matrix.det()
    }

    pub fn scan(&self, grid: &Grid, tau_wron: f64) -> WronskianScan {
        let tape = self.matrix.tape();
        let d = self.matrix.rows();
        let (values, skipped) = grid.sweep(&tape, |x, vals| {
            let m = CMatrix::new(d, d, vals.to_vec()).expect("square stack");
            (x, m.det().map(|z| z.norm()).unwrap_or(0.0))
        });
        let (argmin, min_abs) = values
            .iter()
            .copied()
            .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        WronskianScan {
            min_abs,
            argmin,
            threshold: tau_wron,
            singular_points: values.iter().filter(|v| v.1 <= tau_wron).map(|v| v.0).collect(),
            skipped,
            usable: values.len(),
            total: grid.count,
        }
    }
}

/// Wronskian of `nN` vector-functions of length `n`.
pub fn wronskian(fns: &[FnMatrix], n: usize) -> Result<Wronskian> {
    if n == 0 || fns.is_empty() || !fns.len().is_multiple_of(n) {
        return Err(Error::DimensionMismatch(format!(
            "{} functions is not a positive multiple of n = {n}",
            fns.len()
        )));
    }
    if fns.iter().any(|f| f.rows() != n || f.cols() != 1) {
        return Err(Error::DimensionMismatch(format!("functions must be {n}x1 columns")));
    }
    let order = fns.len() / n;
    let d = fns.len();
    let derivs: Vec<Vec<FnMatrix>> = fns
        .iter()
        .map(|f| {
            let mut list = vec![f.clone()];
            for j in 1..order {
                list.push(list[j - 1].derive(1));
            }
            list
        })
        .collect();
    let matrix = FnMatrix::from_fn(d, d, |row, col| derivs[col][row / n].get(row % n, 0).clone());
    Ok(Wronskian { matrix, order })
}

/// Builds `Q = Σ_{j≤N} X_j ∂^j` with `X_N = leading` whose kernel contains the
/// given `nN` functions.
///
/// The lower coefficients solve `[X_0 … X_{N-1}] W = -leading [Φ_1^(N) … Φ_nN^(N)]`
/// symbolically as `-leading D_N adj(W) / det W`, so they stay in the
/// closed-form function class and can be differentiated exactly.
pub fn op_from_kernel(
    kernel: &[FnMatrix],
    n: usize,
    leading: &CMatrix,
    grid: &Grid,
    tau_wron: f64,
) -> Result<MatrixDiffOp> {
    if leading.rows() != n || leading.cols() != n {
        return Err(Error::DimensionMismatch("leading coefficient must be n x n".into()));
    }
    let det_lead = leading.det()?;
    if det_lead.norm() <= grid.tau_zero {
        return Err(Error::SingularMatrix { pivot: det_lead.norm() });
    }
    let w = wronskian(kernel, n)?;
    let scan = w.scan(grid, tau_wron);
    if !scan.nonvanishing() {
        return Err(scan.to_error());
    }
    let order = w.order();
    let top: Vec<FnMatrix> = kernel.iter().map(|f| f.derive(order)).collect();
    let d_top = FnMatrix::from_columns(&top)?;
    let rhs = d_top.left_mul_const(&leading.scale((-1.0).into()))?;
    let det = w.matrix().det()?;
    let solved = rhs.mul(&w.matrix().adjugate()?)?.map(|e| e / &det);
    let mut coeffs: Vec<FnMatrix> = (0..order).map(|j| solved.col_range(j * n, (j + 1) * n)).collect();
    coeffs.push(FnMatrix::from_constant(leading));
    MatrixDiffOp::new(coeffs)
}

/// `V₋ = X_N V₊ X_N⁻¹ + 2 X'_{N-1} X_N⁻¹` for an operator with constant
/// nondegenerate leading coefficient.
pub fn partner_potential(q: &MatrixDiffOp, v_plus: &FnMatrix) -> Result<FnMatrix> {
    let n = q.n();
    if v_plus.rows() != n || v_plus.cols() != n {
        return Err(Error::DimensionMismatch("potential size".into()));
    }
    let lead = q.leading().as_constant().ok_or(Error::SingularLeading)?;
    let inv = lead.inverse()?;
    let mut v = v_plus.left_mul_const(&lead)?.right_mul_const(&inv)?;
    if q.order() > 0 {
        let shift = q.coeffs()[q.order() - 1].derive(1).right_mul_const(&inv.scale(2.0.into()))?;
        v = v.add(&shift)?;
    }
    Ok(v)
}

/// Largest sampled `|Q f|` over the given functions.
pub fn kernel_residual(q: &MatrixDiffOp, fns: &[FnMatrix], grid: &Grid, tol: f64) -> Result<Residual> {
    let mut entries = Vec::new();
    for f in fns {
        entries.extend_from_slice(q.apply(f)?.entries());
    }
    Ok(sample_max_abs(&entries, grid, tol))
}

/// Largest sampled residual of the chain relations under `h`.
pub fn chain_residual(h: &SchrodingerOp, chains: &ChainSet, grid: &Grid, tol: f64) -> Result<Residual> {
    if h.n() != chains.n() {
        return Err(Error::DimensionMismatch("Hamiltonian and chains differ in size".into()));
    }
    let op = h.to_diffop();
    let mut entries = Vec::new();
    for chain in chains.chains() {
        let lam = ScalarFn::constant(chain.lambda);
        for (i, f) in chain.functions.iter().enumerate() {
            let mut r = op.apply(f)?.sub(&f.scale(&lam))?;
            if i > 0 {
                r = r.sub(&chain.functions[i - 1])?;
            }
            entries.extend_from_slice(r.entries());
        }
    }
    Ok(sample_max_abs(&entries, grid, tol))
}
