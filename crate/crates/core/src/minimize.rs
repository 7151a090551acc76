//! Minimization of intertwining operators.
//!
//! * [`weak_min_plan`] decides, from the Jordan block structure of the matrix
//!   representing `H₊` on `ker Q`, which factors `(λ I - H₊)^k` can be split
//!   off on the right, and [`apply_weak_plan`] performs the division.
//! * [`strong_min_check`] certifies a single factorization `Q = P (A - H₊)`
//!   with a constant symmetry matrix `A`, given a double set of associated
//!   vector-functions in `ker Q`.
//! * [`right_divide`] is the underlying noncommutative division.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffop::{intertwining_residual, poly_in_h, IntertwiningReport, MatrixDiffOp, SchrodingerOp};
use crate::error::{Error, Result};
use crate::expr::FnMatrix;
use crate::kernelbuild::{chain_residual, kernel_residual, partner_potential, wronskian, ChainSet, WronskianScan};
use crate::linalg::{verify_chains, CMatrix, JordanSpec};
use crate::sampling::{sample_max_abs, sample_max_diff, Grid, Residual, Tolerances};
use crate::symmetry::{commutator_residual, decompose, ParamFunctions};

/// Jordan blocks of one eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub lambda: Complex64,
    pub orders: Vec<usize>,
}

/// Jordan block structure of the matrix representing `H₊` on `ker Q` for an
/// `n x n` Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockData {
    n: usize,
    entries: Vec<BlockEntry>,
}

impl BlockData {
    pub fn new(n: usize, entries: Vec<BlockEntry>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("matrix size must be positive".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if e.orders.is_empty() || e.orders.contains(&0) {
                return Err(Error::InvalidSpec(format!("eigenvalue {i} needs positive block orders")));
            }
            if entries[..i].iter().any(|o| o.lambda == e.lambda) {
                return Err(Error::DegenerateEigenvalues);
            }
        }
        let data = BlockData { n, entries };
        if !data.kernel_dimension().is_multiple_of(n) {
            return Err(Error::InvalidSpec(format!(
                "kernel dimension {} is not a multiple of n = {n}",
                data.kernel_dimension()
            )));
        }
        Ok(data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[BlockEntry] {
        &self.entries
    }

    /// Sum of all block orders, `dim ker Q = nN`.
    pub fn kernel_dimension(&self) -> usize {
        self.entries.iter().flat_map(|e| e.orders.iter()).sum()
    }

    pub fn operator_order(&self) -> usize {
        self.kernel_dimension() / self.n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factor {
    pub lambda: Complex64,
    pub power: usize,
}

/// `Q = P_M Π (λ_l I - H₊)^{k_l}` with `M = N - 2 Σ k_l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizationPlan {
    pub factors: Vec<Factor>,
    pub operator_order: usize,
    pub residual_order: usize,
}

fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg()))
}

fn plan_with_threshold(blocks: &BlockData, threshold: usize) -> MinimizationPlan {
    let mut factors: Vec<Factor> = blocks
        .entries
        .iter()
        .filter(|e| e.orders.len() >= threshold)
        .map(|e| Factor { lambda: e.lambda, power: *e.orders.iter().min().expect("nonempty") })
        .collect();
    factors.sort_by(|a, b| spectral_order(&a.lambda, &b.lambda));
    let removed: usize = factors.iter().map(|f| 2 * f.power).sum();
    let operator_order = blocks.operator_order();
    MinimizationPlan { factors, operator_order, residual_order: operator_order - removed }
}

/// Complete weak minimization: every eigenvalue with at least `2n` Jordan
/// blocks contributes `(λ I - H₊)^k` with `k` its smallest block order.
/// Factors are ordered by `|λ|`, then `arg λ`.
pub fn weak_min_plan(blocks: &BlockData) -> MinimizationPlan {
    plan_with_threshold(blocks, 2 * blocks.n)
}

/// Complete minimization of a scalar operator (two Jordan blocks).
pub fn scalar_min_plan(blocks: &BlockData) -> Result<MinimizationPlan> {
    if blocks.n != 1 {
        return Err(Error::DimensionMismatch("scalar criterion needs n = 1".into()));
    }
    Ok(plan_with_threshold(blocks, 2))
}

/// Divides `q = P ∘ c + R` from the right with `order(R) < order(c)`.
///
/// Each step takes the current top coefficient `R_d`, sets the next
/// coefficient of `P` to `R_d C⁻¹` (with `C` the constant leading
/// coefficient of `c`) and subtracts `(R_d C⁻¹ ∂^{d-K}) ∘ c`. The returned
/// residual is the sampled size of `R`; the division is exact when it passes.
pub fn right_divide(q: &MatrixDiffOp, c: &MatrixDiffOp, grid: &Grid, tol: f64) -> Result<(MatrixDiffOp, Residual)> {
    if q.n() != c.n() {
        return Err(Error::DimensionMismatch("dividend and divisor differ in size".into()));
    }
    let lead = c.leading().as_constant().ok_or(Error::SingularLeading)?;
    let lead_inv = lead.solve_with(&CMatrix::identity(c.n()), grid.tau_zero).map_err(|_| Error::SingularLeading)?;
    let k = c.order();
    if q.order() < k {
        return Err(Error::OrderMismatch(format!(
            "dividend order {} is below divisor order {k}",
            q.order()
        )));
    }
    let n = q.n();
    let mut rem: Vec<FnMatrix> = q.coeffs().to_vec();
    let mut quotient = vec![FnMatrix::zeros(n, n); q.order() - k + 1];
    for d in (k..=q.order()).rev() {
        let y = rem[d].right_mul_const(&lead_inv)?;
        let mut mono = vec![FnMatrix::zeros(n, n); d - k + 1];
        mono[d - k] = y.clone();
        let term = MatrixDiffOp::new(mono)?.compose(c)?;
        // the order-d coefficient cancels by construction and is dropped
        for (j, tj) in term.coeffs().iter().enumerate().take(d) {
            rem[j] = rem[j].sub(tj)?;
        }
        quotient[d - k] = y;
    }
    let remainder: Vec<_> = rem[..k].iter().flat_map(|m| m.entries().iter().cloned()).collect();
    let residual = if remainder.is_empty() {
        Residual { max: 0.0, tol, usable: grid.count, total: grid.count, skipped: Vec::new() }
    } else {
        sample_max_abs(&remainder, grid, tol)
    };
    Ok((MatrixDiffOp::new(quotient)?, residual))
}

/// `Π (λ_l I - H)^{k_l}` in plan order.
pub fn plan_divisor(h: &SchrodingerOp, plan: &MinimizationPlan) -> Result<MatrixDiffOp> {
    let n = h.n();
    let mut acc = MatrixDiffOp::identity(n);
    for f in &plan.factors {
        let factor = poly_in_h(h, &[CMatrix::identity(n).scale(f.lambda), CMatrix::identity(n).scale((-1.0).into())])?;
        for _ in 0..f.power {
            acc = acc.compose(&factor)?;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakReport {
    pub remainder: Residual,
    /// `P` against `H₊` and the partner of `Q`.
    pub intertwining: Option<IntertwiningReport>,
}

impl WeakReport {
    pub fn passed(&self) -> bool {
        self.remainder.passed() && self.intertwining.as_ref().is_none_or(IntertwiningReport::passed)
    }
}

/// Splits the plan's factors off `q` on the right. `tol.remainder` bounds the
/// division remainder and `tol.equality` the intertwining check of the result.
pub fn apply_weak_plan(
    q: &MatrixDiffOp,
    h: &SchrodingerOp,
    plan: &MinimizationPlan,
    grid: &Grid,
    tol: &Tolerances,
) -> Result<(MatrixDiffOp, WeakReport)> {
    if q.order() != plan.operator_order {
        return Err(Error::OrderMismatch(format!(
            "plan is for order {} but the operator has order {}",
            plan.operator_order,
            q.order()
        )));
    }
    if plan.factors.is_empty() {
        let remainder = Residual { max: 0.0, tol: tol.remainder, usable: grid.count, total: grid.count, skipped: Vec::new() };
        return Ok((q.clone(), WeakReport { remainder, intertwining: None }));
    }
    let divisor = plan_divisor(h, plan)?;
    let (p, remainder) = right_divide(q, &divisor, grid, tol.remainder)?;
    if !remainder.passed() {
        return Err(Error::NonzeroRemainder { residual: remainder.max, tol: tol.remainder });
    }
    let h_minus = SchrodingerOp::new(partner_potential(q, h.potential())?)?;
    let intertwining = intertwining_residual(&p, h, &h_minus, grid, tol.equality)?;
    Ok((p, WeakReport { remainder, intertwining: Some(intertwining) }))
}

/// Chain functions together with the parameterizing functions they are
/// claimed to decompose into.
#[derive(Debug, Clone)]
pub struct ChainFamily {
    pub params: ParamFunctions,
    pub chains: ChainSet,
}

/// Two families `Φ_ial`, `Ψ_ial` sharing one index structure.
#[derive(Debug, Clone)]
pub struct DoubleChainSet {
    phi: ChainFamily,
    psi: ChainFamily,
}

impl DoubleChainSet {
    pub fn new(phi: ChainFamily, psi: ChainFamily) -> Result<Self> {
        let shape = |c: &ChainSet| c.chains().iter().map(|ch| ch.functions.len()).collect::<Vec<_>>();
        if phi.chains.n() != psi.chains.n() || shape(&phi.chains) != shape(&psi.chains) {
            return Err(Error::DimensionMismatch("the two families must share their index structure".into()));
        }
        Ok(DoubleChainSet { phi, psi })
    }

    /// Both families built from the decomposition over `spec`'s chain vectors.
    pub fn from_params(spec: &JordanSpec, phi: ParamFunctions, psi: ParamFunctions) -> Result<Self> {
        let phi_chains = decompose(spec, &phi)?;
        let psi_chains = decompose(spec, &psi)?;
        Self::new(ChainFamily { params: phi, chains: phi_chains }, ChainFamily { params: psi, chains: psi_chains })
    }

    pub fn phi(&self) -> &ChainFamily {
        &self.phi
    }

    pub fn psi(&self) -> &ChainFamily {
        &self.psi
    }

    /// All `Φ` followed by all `Ψ`.
    pub fn members(&self) -> Vec<FnMatrix> {
        let mut m = self.phi.chains.members();
        m.extend(self.psi.chains.members());
        m
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StrongReport {
    pub kernel: Residual,
    pub condition1: Residual,
    pub condition2_chain_vectors: Residual,
    pub condition2_decomposition: Residual,
    pub condition3: WronskianScan,
    pub commutator: Residual,
    pub remainder: Residual,
    pub intertwining: IntertwiningReport,
}

#[derive(Debug, Clone)]
pub struct StrongOutcome {
    pub symmetry: CMatrix,
    pub factor: MatrixDiffOp,
    pub report: StrongReport,
}

fn violated(condition: u8, detail: impl Into<String>) -> Error {
    Error::ConditionViolated { condition, detail: detail.into() }
}

fn check_structure(dset: &DoubleChainSet, spec: &JordanSpec) -> Result<()> {
    let expected: Vec<(Complex64, usize)> = spec
        .records()
        .iter()
        .flat_map(|r| r.chains.iter().map(move |c| (r.lambda, c.len())))
        .collect();
    for family in [&dset.phi, &dset.psi] {
        let got: Vec<(Complex64, usize)> =
            family.chains.chains().iter().map(|c| (c.lambda, c.functions.len())).collect();
        if got != expected {
            return Err(violated(2, "chain structure differs from the Jordan data of A"));
        }
    }
    Ok(())
}

/// Certifies `Q = P_{N-2} (A - H₊)` with `[H₊, A] = 0`.
///
/// Checks, in order: kernel membership of the double set, the chain relations
/// under `H₊` (condition 1), the chain vectors of `A` and the decomposition
/// of both families over them (condition 2), and the joint Wronskian
/// (condition 3). Then confirms the symmetry and divides.
pub fn strong_min_check(
    q: &MatrixDiffOp,
    h: &SchrodingerOp,
    dset: &DoubleChainSet,
    a_spec: &JordanSpec,
    grid: &Grid,
    tol: &Tolerances,
) -> Result<StrongOutcome> {
    let n = h.n();
    if q.n() != n || a_spec.n() != n || dset.phi.chains.n() != n {
        return Err(Error::DimensionMismatch("operator, Hamiltonian, chains and A must agree in size".into()));
    }
    let members = dset.members();

    let kernel = kernel_residual(q, &members, grid, tol.equality)?;
    if !kernel.passed() {
        return Err(Error::KernelMembershipFailed { residual: kernel.max, tol: tol.equality });
    }

    let condition1 = chain_residual(h, &dset.phi.chains, grid, tol.equality)?
        .combine(&chain_residual(h, &dset.psi.chains, grid, tol.equality)?);
    if !condition1.passed() {
        return Err(violated(1, format!("chain relation residual {:e}", condition1.max)));
    }

    if !a_spec.is_complete() {
        return Err(violated(2, format!("{} chain vectors for n = {n}", a_spec.vector_count())));
    }
    check_structure(dset, a_spec)?;
    let a = a_spec.matrix().map_err(|e| violated(2, e.to_string()))?;
    let condition2_chain_vectors = verify_chains(&a, a_spec, tol.equality)?;
    if !condition2_chain_vectors.passed() {
        return Err(violated(2, format!("chain vectors of A: residual {:e}", condition2_chain_vectors.max)));
    }
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for family in [&dset.phi, &dset.psi] {
        let rebuilt = decompose(a_spec, &family.params).map_err(|e| violated(2, e.to_string()))?;
        for (given, expected) in family.chains.members().iter().zip(rebuilt.members()) {
            lhs.extend_from_slice(given.entries());
            rhs.extend_from_slice(expected.entries());
        }
    }
    let condition2_decomposition = sample_max_diff(&lhs, &rhs, grid, tol.equality);
    if !condition2_decomposition.passed() {
        return Err(violated(2, format!("decomposition residual {:e}", condition2_decomposition.max)));
    }

    let condition3 = wronskian(&members, n)?.scan(grid, tol.tau_wron);
    if !condition3.nonvanishing() {
        return Err(violated(3, format!("Wronskian min |W| = {:e} at x = {}", condition3.min_abs, condition3.argmin)));
    }

    let commutator = commutator_residual(h, &a, grid, tol.equality)?;
    if !commutator.passed() {
        return Err(Error::NotASymmetry { residual: commutator.max });
    }

    let divisor = poly_in_h(h, &[a.clone(), CMatrix::identity(n).scale((-1.0).into())])?;
    let (factor, remainder) = right_divide(q, &divisor, grid, tol.remainder)?;
    if !remainder.passed() {
        return Err(Error::NonzeroRemainder { residual: remainder.max, tol: tol.remainder });
    }
    let h_minus = SchrodingerOp::new(partner_potential(q, h.potential())?)?;
    let intertwining = intertwining_residual(&factor, h, &h_minus, grid, tol.equality)?;

    Ok(StrongOutcome {
        symmetry: a,
        factor,
        report: StrongReport {
            kernel,
            condition1,
            condition2_chain_vectors,
            condition2_decomposition,
            condition3,
            commutator,
            remainder,
            intertwining,
        },
    })
}
