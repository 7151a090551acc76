//! Matrix Hamiltonians with a prescribed constant symmetry matrix.
//!
//! Given the chain data of `A` and scalar parameterizing functions, the
//! vector-functions
//!
//! ```text
//! Φ_ial = Σ_{k=0}^{l} Σ_{t < g_{i, ν_ia - 1 - k}} φ_{iakt} X_{i,t,l-k}
//! ```
//!
//! are stacked as columns of `Φ(x)` and `H = -∂² I + A + Φ'' Φ⁻¹`. Then
//! `H Φ = A Φ` columnwise, so every `Φ_ial` is an associated function of `H`
//! at `λ_i`, and `[H, A] = 0`.
//!
//! All indices are zero-based: `i` eigenvalue, `a` chain, `l` level,
//! `k` decomposition depth and `t` contributing chain.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::diffop::SchrodingerOp;
use crate::error::{Error, Result};
use crate::expr::{FnMatrix, ScalarFn};
use crate::kernelbuild::{wronskian, Chain, ChainSet, WronskianScan};
use crate::linalg::{CMatrix, EigenRecord, JordanSpec};
use crate::sampling::{sample_max_abs, Grid, Residual};

/// Index `(i, a, k, t)` of a parameterizing function.
pub type ParamIndex = (usize, usize, usize, usize);

/// Parameterizing functions `φ_iakt`; unspecified ones take their defaults
/// (see [`default_param`]).
#[derive(Debug, Clone, Default)]
pub struct ParamFunctions {
    explicit: BTreeMap<ParamIndex, ScalarFn>,
}

impl ParamFunctions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, index: ParamIndex, f: ScalarFn) -> Self {
        self.explicit.insert(index, f);
        self
    }

    pub fn insert(&mut self, index: ParamIndex, f: ScalarFn) {
        self.explicit.insert(index, f);
    }

    pub fn explicit(&self) -> &BTreeMap<ParamIndex, ScalarFn> {
        &self.explicit
    }

    /// Rejects indices that do not occur in the decomposition for `spec`.
    pub fn validate(&self, spec: &JordanSpec) -> Result<()> {
        for &(i, a, k, t) in self.explicit.keys() {
            if !param_exists(spec, i, a, k, t) {
                return Err(Error::InvalidSpec(format!(
                    "parameter ({i},{a},{k},{t}) does not occur in the decomposition"
                )));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, spec: &JordanSpec, index: ParamIndex) -> ScalarFn {
        self.explicit.get(&index).cloned().unwrap_or_else(|| default_param(spec, index))
    }

    /// Every parameter of the decomposition with defaults filled in.
    pub fn resolved(&self, spec: &JordanSpec) -> ParamFunctions {
        let mut out = ParamFunctions::new();
        for index in param_indices(spec) {
            out.insert(index, self.resolve(spec, index));
        }
        out
    }
}

fn param_exists(spec: &JordanSpec, i: usize, a: usize, k: usize, t: usize) -> bool {
    if i >= spec.records().len() || a >= spec.chain_count(i) {
        return false;
    }
    let nu = spec.chain_lengths(i)[a];
    k < nu && t < spec.level_count(i, nu - 1 - k)
}

/// Every `(i, a, k, t)` that appears in the decomposition, in index order.
pub fn param_indices(spec: &JordanSpec) -> Vec<ParamIndex> {
    let mut out = Vec::new();
    for i in 0..spec.records().len() {
        for (a, nu) in spec.chain_lengths(i).into_iter().enumerate() {
            for k in 0..nu {
                for t in 0..spec.level_count(i, nu - 1 - k) {
                    out.push((i, a, k, t));
                }
            }
        }
    }
    out
}

/// Default parameterizing function: `exp(c_m x)` on the diagonal top level
/// (`k = 0`, `t = a`), zero elsewhere. `c_m` runs through
/// `1/4, -1/2, 3/4, -1, ...` over the chains in stacking order, which keeps
/// `det Φ` generically nonzero.
pub fn default_param(spec: &JordanSpec, (i, a, k, t): ParamIndex) -> ScalarFn {
    if k != 0 || t != a {
        return ScalarFn::zero();
    }
    let ordinal: usize = (0..i).map(|p| spec.chain_count(p)).sum::<usize>() + a;
    let sign = if ordinal.is_multiple_of(2) { 1.0 } else { -1.0 };
    let c = sign * (ordinal + 1) as f64 / 4.0;
    (ScalarFn::real(c) * ScalarFn::x()).exp()
}

/// Chains `Φ_ial` at `λ_i` built from the decomposition over chain vectors.
pub fn decompose(spec: &JordanSpec, params: &ParamFunctions) -> Result<ChainSet> {
    params.validate(spec)?;
    let n = spec.n();
    let mut chains = Vec::new();
    for (i, record) in spec.records().iter().enumerate() {
        for (a, chain) in record.chains.iter().enumerate() {
            let nu = chain.len();
            let mut functions = Vec::with_capacity(nu);
            for l in 0..nu {
                let mut acc = FnMatrix::zeros(n, 1);
                for k in 0..=l {
                    for t in 0..spec.level_count(i, nu - 1 - k) {
                        let phi = params.resolve(spec, (i, a, k, t));
                        if phi.is_zero() {
                            continue;
                        }
                        acc = acc.add(&FnMatrix::scaled_vector(&phi, spec.vector(i, t, l - k)))?;
                    }
                }
                functions.push(acc);
            }
            chains.push(Chain { lambda: record.lambda, functions });
        }
    }
    ChainSet::new(n, chains)
}

/// `M(x)` with `Φ(x) = S M(x)`, where `S` holds the chain vectors as columns
/// in stacking order. Column `(i, a, l)` carries `φ_iakt` in the row of
/// `X_{i,t,l-k}`.
pub fn coefficient_frame(spec: &JordanSpec, params: &ParamFunctions) -> Result<FnMatrix> {
    params.validate(spec)?;
    let index = spec.indices();
    let row = |i: usize, t: usize, l: usize| index.iter().position(|&p| p == (i, t, l)).expect("stacked chain vector");
    let m = index.len();
    let mut entries = vec![ScalarFn::zero(); m * m];
    for (col, &(i, a, l)) in index.iter().enumerate() {
        let nu = spec.chain_lengths(i)[a];
        for k in 0..=l {
            for t in 0..spec.level_count(i, nu - 1 - k) {
                let r = row(i, t, l - k);
                entries[r * m + col] = &entries[r * m + col] + params.resolve(spec, (i, a, k, t));
            }
        }
    }
    FnMatrix::new(m, m, entries)
}

/// Jordan data of `A` plus parameterizing functions.
#[derive(Debug, Clone)]
pub struct SymmetryScenario {
    spec: JordanSpec,
    params: ParamFunctions,
}

impl SymmetryScenario {
    pub fn new(spec: JordanSpec, params: ParamFunctions) -> Result<Self> {
        if !spec.is_complete() {
            return Err(Error::IncompleteSpec { vectors: spec.vector_count(), n: spec.n() });
        }
        params.validate(&spec)?;
        Ok(SymmetryScenario { spec, params })
    }

    pub fn spec(&self) -> &JordanSpec {
        &self.spec
    }

    pub fn params(&self) -> &ParamFunctions {
        &self.params
    }

    pub fn chains(&self) -> Result<ChainSet> {
        decompose(&self.spec, &self.params)
    }
}

/// Output of [`build_hamiltonian`].
#[derive(Debug, Clone)]
pub struct SymmetricHamiltonian {
    pub hamiltonian: SchrodingerOp,
    pub symmetry: CMatrix,
    /// `Φ(x)`, the chain functions as columns.
    pub frame: FnMatrix,
    pub chains: ChainSet,
    pub wronskian: WronskianScan,
}

/// `H = -∂² I + A + Φ''(x) Φ(x)⁻¹`.
pub fn build_hamiltonian(scn: &SymmetryScenario, grid: &Grid, tau_wron: f64) -> Result<SymmetricHamiltonian> {
    let spec = scn.spec();
    let chains = scn.chains()?;
    let members = chains.members();
    let w = wronskian(&members, spec.n())?;
    let scan = w.scan(grid, tau_wron);
    if !scan.nonvanishing() {
        return Err(Error::SingularWronskian { min_abs: scan.min_abs, x: scan.argmin });
    }
    let a = spec.matrix()?;
    let frame = FnMatrix::from_columns(&members)?;
    // Φ''Φ⁻¹ = S M'' M⁻¹ S⁻¹. Inverting M rather than Φ avoids the cancellation
    // in det Φ when the parameter functions differ widely in size.
    let s = CMatrix::from_columns(&spec.columns())?;
    let coeffs = coefficient_frame(spec, scn.params())?;
    let det = coeffs.det()?;
    let inner = coeffs.derive(2).mul(&coeffs.adjugate()?)?.map(|e| e / &det);
    let correction = inner.left_mul_const(&s)?.right_mul_const(&s.inverse()?)?;
    let potential = correction.add(&FnMatrix::from_constant(&a))?;
    Ok(SymmetricHamiltonian {
        hamiltonian: SchrodingerOp::new(potential)?,
        symmetry: a,
        frame,
        chains,
        wronskian: scan,
    })
}

fn column2(v: &[Complex64]) -> Result<(Complex64, Complex64)> {
    match v {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::DimensionMismatch("expected a vector of length 2".into())),
    }
}

fn ratio_second(phi: &ScalarFn) -> ScalarFn {
    phi.derive(2) / phi
}

/// Closed form for a `2 x 2` symmetry matrix with distinct eigenvalues
/// `λ₁ ≠ λ₂` and eigenvectors `X₁, X₂`. Returns `(H, A)`.
pub fn two_eigen_closed_form(
    lambda1: Complex64,
    lambda2: Complex64,
    x1: &[Complex64],
    x2: &[Complex64],
    phi1: &ScalarFn,
    phi2: &ScalarFn,
) -> Result<(SchrodingerOp, CMatrix)> {
    if lambda1 == lambda2 {
        return Err(Error::DegenerateEigenvalues);
    }
    let (x11, x12) = column2(x1)?;
    let (x21, x22) = column2(x2)?;
    let delta = x11 * x22 - x12 * x21;
    if delta.norm() <= crate::expr::TAU_ZERO {
        return Err(Error::SingularMatrix { pivot: delta.norm() });
    }
    let p1 = CMatrix::from_rows(&[vec![x11 * x22, -x11 * x21], vec![x12 * x22, -x12 * x21]])?.scale(1.0 / delta);
    let p2 = CMatrix::from_rows(&[vec![-x12 * x21, x11 * x21], vec![-x12 * x22, x11 * x22]])?.scale(1.0 / delta);
    let w1 = ratio_second(phi1) + ScalarFn::constant(lambda1);
    let w2 = ratio_second(phi2) + ScalarFn::constant(lambda2);
    let v = FnMatrix::from_constant(&p1).scale(&w1).add(&FnMatrix::from_constant(&p2).scale(&w2))?;
    let a = p1.scale(lambda1).add(&p2.scale(lambda2))?;
    Ok((SchrodingerOp::new(v)?, a))
}

/// Closed form for a `2 x 2` symmetry matrix that is a single Jordan block:
/// `A X₀ = λ₀ X₀`, `(A - λ₀) X₁ = X₀`. Returns `(H, A)`.
pub fn single_block_closed_form(
    lambda0: Complex64,
    x0: &[Complex64],
    x1: &[Complex64],
    phi0: &ScalarFn,
    phi1: &ScalarFn,
) -> Result<(SchrodingerOp, CMatrix)> {
    let (x01, x02) = column2(x0)?;
    let (x11, x12) = column2(x1)?;
    let delta = x01 * x12 - x02 * x11;
    if delta.norm() <= crate::expr::TAU_ZERO {
        return Err(Error::SingularMatrix { pivot: delta.norm() });
    }
    let m = nilpotent_part(x0)?;
    let diag = ratio_second(phi0) + ScalarFn::constant(lambda0);
    let off = ((phi0.derive(2) * phi1 - phi0 * phi1.derive(2)) / phi0.powi(2) - ScalarFn::one())
        / ScalarFn::constant(delta);
    let v = FnMatrix::identity(2).scale(&diag).add(&FnMatrix::from_constant(&m).scale(&off))?;
    let a = CMatrix::identity(2).scale(lambda0).sub(&m.scale(1.0 / delta))?;
    Ok((SchrodingerOp::new(v)?, a))
}

/// `[[x01 x02, -x01²], [x02², -x01 x02]]`, the rank-one matrix in the
/// single-block closed form. It squares to zero.
pub fn nilpotent_part(x0: &[Complex64]) -> Result<CMatrix> {
    let (x01, x02) = column2(x0)?;
    CMatrix::from_rows(&[vec![x01 * x02, -x01 * x01], vec![x02 * x02, -x01 * x02]])
}

/// Jordan data for the two-eigenvalue closed form.
pub fn two_eigen_spec(lambda1: Complex64, lambda2: Complex64, x1: &[Complex64], x2: &[Complex64]) -> Result<JordanSpec> {
    JordanSpec::new(
        2,
        vec![
            EigenRecord { lambda: lambda1, chains: vec![vec![x1.to_vec()]] },
            EigenRecord { lambda: lambda2, chains: vec![vec![x2.to_vec()]] },
        ],
    )
}

/// Parameters matching [`two_eigen_closed_form`]: `Φ_i = φ_i X_i`.
pub fn two_eigen_params(phi1: &ScalarFn, phi2: &ScalarFn) -> ParamFunctions {
    ParamFunctions::new().with((0, 0, 0, 0), phi1.clone()).with((1, 0, 0, 0), phi2.clone())
}

/// Jordan data for the single-block closed form.
pub fn single_block_spec(lambda0: Complex64, x0: &[Complex64], x1: &[Complex64]) -> Result<JordanSpec> {
    JordanSpec::new(2, vec![EigenRecord { lambda: lambda0, chains: vec![vec![x0.to_vec(), x1.to_vec()]] }])
}

/// Parameters matching [`single_block_closed_form`]: `Φ₀ = φ₀ X₀`,
/// `Φ₁ = φ₀ X₁ + φ₁ X₀`.
pub fn single_block_params(phi0: &ScalarFn, phi1: &ScalarFn) -> ParamFunctions {
    ParamFunctions::new().with((0, 0, 0, 0), phi0.clone()).with((0, 0, 1, 0), phi1.clone())
}

/// Sampled `max |V(x) A - A V(x)|`; the derivative part commutes with any
/// constant matrix.
pub fn commutator_residual(h: &SchrodingerOp, a: &CMatrix, grid: &Grid, tol: f64) -> Result<Residual> {
    if a.rows() != h.n() || a.cols() != h.n() {
        return Err(Error::DimensionMismatch("symmetry matrix size".into()));
    }
    let v = h.potential();
    let comm = v.right_mul_const(a)?.sub(&v.left_mul_const(a)?)?;
    Ok(sample_max_abs(comm.entries(), grid, tol))
}
