//! Scenario files: JSON documents describing a batch of tasks.
//!
//! Loading happens in two stages. Deserialization checks the document
//! structure; [`compile`] then parses every expression and checks matrix
//! shapes. Any failure in either stage is a schema error. Mathematical
//! failures (singular data, failed residuals) only surface when tasks run.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffop::MatrixDiffOp;
use crate::error::{Error, Result};
use crate::expr::{FnMatrix, ScalarFn};
use crate::linalg::{CMatrix, EigenRecord};
use crate::minimize::BlockEntry;
use crate::sampling::Tolerances;
use crate::symmetry::{ParamFunctions, ParamIndex};

use super::parse::parse_expr;

pub const SCENARIO_VERSION: &str = "1";

/// A complex number: either a bare real or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexDoc {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexDoc {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexDoc::Real(r) => Complex64::new(r, 0.0),
            ComplexDoc::Pair([re, im]) => Complex64::new(re, im),
        }
    }

    pub fn from_value(z: Complex64) -> Self {
        if z.im == 0.0 {
            ComplexDoc::Real(z.re)
        } else {
            ComplexDoc::Pair([z.re, z.im])
        }
    }
}

/// Rows of complex numbers.
pub type ConstMatrixDoc = Vec<Vec<ComplexDoc>>;
/// Rows of expressions.
pub type ExprMatrixDoc = Vec<Vec<String>>;
/// A column vector of expressions.
pub type ExprVectorDoc = Vec<String>;

/// A matrix differential operator by its coefficients, order 0 first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDoc {
    pub coeffs: Vec<ExprMatrixDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenDoc {
    pub lambda: ComplexDoc,
    /// Each chain lists its eigenvector first, then associated vectors.
    pub chains: Vec<Vec<Vec<ComplexDoc>>>,
}

/// Jordan data of a symmetry matrix, optionally with the matrix itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JordanDoc {
    pub n: usize,
    pub eigen: Vec<EigenDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<ConstMatrixDoc>,
}

/// Parameterizing function `φ_iakt` (0-based indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDoc {
    pub index: [usize; 4],
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDoc {
    pub lambda: ComplexDoc,
    pub functions: Vec<ExprVectorDoc>,
}

/// One family of a double chain set. Without explicit `chains` the chain
/// functions are generated from `params`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    #[serde(default)]
    pub params: Vec<ParamDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chains: Option<Vec<ChainDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDoc {
    pub lambda: ComplexDoc,
    pub orders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDoc {
    pub lambda: ComplexDoc,
    pub power: usize,
}

/// The two 2x2 closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedForm {
    /// Distinct eigenvalues `λ₁, λ₂` with eigenvectors `X₁, X₂`.
    TwoEigen,
    /// One Jordan block: eigenvector `X₀`, associated vector `X₁`.
    SingleBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskDoc {
    BuildHamiltonian {
        id: String,
        #[serde(default)]
        expect_failure: Option<String>,
        spec: JordanDoc,
        #[serde(default)]
        params: Vec<ParamDoc>,
        #[serde(default)]
        expect_potential: Option<ExprMatrixDoc>,
        #[serde(default)]
        expect_symmetry: Option<ConstMatrixDoc>,
    },
    VerifyCommutator {
        id: String,
        #[serde(default)]
        expect_failure: Option<String>,
        potential: ExprMatrixDoc,
        symmetry: ConstMatrixDoc,
    },
    BuildIntertwiner {
        id: String,
        #[serde(default)]
        expect_failure: Option<String>,
        n: usize,
        kernel: Vec<ExprVectorDoc>,
        #[serde(default)]
        leading: Option<ConstMatrixDoc>,
        #[serde(default)]
        v_plus: Option<ExprMatrixDoc>,
        #[serde(default)]
        expect_operator: Option<OperatorDoc>,
        #[serde(default)]
        expect_partner: Option<ExprMatrixDoc>,
    },
    CheckMinimizability {
        id: String,
        #[serde(default)]
        expect_failure: Option<String>,
        n: usize,
        blocks: Vec<BlockDoc>,
        /// When present the plan is applied to this operator.
        #[serde(default)]
        operator: Option<OperatorDoc>,
        #[serde(default)]
        v_plus: Option<ExprMatrixDoc>,
        #[serde(default)]
        expect_factors: Option<Vec<FactorDoc>>,
        #[serde(default)]
        expect_residual_order: Option<usize>,
    },
    Divide {
        id: String,
        #[serde(default)]
        expect_failure: Option<String>,
        dividend: OperatorDoc,
        divisor: OperatorDoc,
        #[serde(default)]
        expect_quotient: Option<OperatorDoc>,
    },
    StrongCheck {
        id: String,
        #[serde(default)]
        expect_failure: Option<String>,
        spec: JordanDoc,
        #[serde(default)]
        v_plus: Option<ExprMatrixDoc>,
        phi: FamilyDoc,
        psi: FamilyDoc,
        /// Defaults to the operator with unit leading coefficient whose
        /// kernel is spanned by both families.
        #[serde(default)]
        operator: Option<OperatorDoc>,
        #[serde(default)]
        expect_factor: Option<OperatorDoc>,
    },
    ClosedForm {
        id: String,
        #[serde(default)]
        expect_failure: Option<String>,
        form: ClosedForm,
        lambdas: Vec<ComplexDoc>,
        vectors: Vec<Vec<ComplexDoc>>,
        phis: Vec<String>,
        #[serde(default)]
        expect_potential: Option<ExprMatrixDoc>,
        #[serde(default)]
        expect_symmetry: Option<ConstMatrixDoc>,
    },
    ExampleSweep {
        id: String,
        #[serde(default)]
        expect_failure: Option<String>,
        form: ClosedForm,
        draws: usize,
    },
}

impl TaskDoc {
    pub fn id(&self) -> &str {
        match self {
            TaskDoc::BuildHamiltonian { id, .. }
            | TaskDoc::VerifyCommutator { id, .. }
            | TaskDoc::BuildIntertwiner { id, .. }
            | TaskDoc::CheckMinimizability { id, .. }
            | TaskDoc::Divide { id, .. }
            | TaskDoc::StrongCheck { id, .. }
            | TaskDoc::ClosedForm { id, .. }
            | TaskDoc::ExampleSweep { id, .. } => id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TaskDoc::BuildHamiltonian { .. } => "build-hamiltonian",
            TaskDoc::VerifyCommutator { .. } => "verify-commutator",
            TaskDoc::BuildIntertwiner { .. } => "build-intertwiner",
            TaskDoc::CheckMinimizability { .. } => "check-minimizability",
            TaskDoc::Divide { .. } => "divide",
            TaskDoc::StrongCheck { .. } => "strong-check",
            TaskDoc::ClosedForm { .. } => "closed-form",
            TaskDoc::ExampleSweep { .. } => "example-sweep",
        }
    }

    pub fn expect_failure(&self) -> Option<&str> {
        match self {
            TaskDoc::BuildHamiltonian { expect_failure, .. }
            | TaskDoc::VerifyCommutator { expect_failure, .. }
            | TaskDoc::BuildIntertwiner { expect_failure, .. }
            | TaskDoc::CheckMinimizability { expect_failure, .. }
            | TaskDoc::Divide { expect_failure, .. }
            | TaskDoc::StrongCheck { expect_failure, .. }
            | TaskDoc::ClosedForm { expect_failure, .. }
            | TaskDoc::ExampleSweep { expect_failure, .. } => expect_failure.as_deref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tasks: Vec<TaskDoc>,
}

/// Parses scenario text and checks the version tag.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scn: Scenario = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if scn.version != SCENARIO_VERSION {
        return Err(Error::Schema(format!("unsupported version '{}'", scn.version)));
    }
    let mut ids = std::collections::BTreeSet::new();
    for t in &scn.tasks {
        if !ids.insert(t.id()) {
            return Err(Error::Schema(format!("duplicate task id '{}'", t.id())));
        }
    }
    Ok(scn)
}

/// Largest `n` a scenario may declare; symbolic determinants make larger
/// systems impractical long before memory does.
pub const MAX_DIMENSION: usize = 16;

fn dimension(n: usize, context: &str) -> Result<()> {
    if n == 0 || n > MAX_DIMENSION {
        return Err(Error::Schema(format!("{context}: n must be between 1 and {MAX_DIMENSION}")));
    }
    Ok(())
}

fn schema(context: &str, e: Error) -> Error {
    match e {
        Error::Parse { offset, message } => {
            Error::Schema(format!("{context}: parse error at offset {offset}: {message}"))
        }
        Error::Schema(m) => Error::Schema(format!("{context}: {m}")),
        other => Error::Schema(format!("{context}: {other}")),
    }
}

pub(crate) fn expr(text: &str, context: &str) -> Result<ScalarFn> {
    parse_expr(text).map_err(|e| schema(context, e))
}

fn rectangular<T>(rows: &[Vec<T>], context: &str) -> Result<(usize, usize)> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Schema(format!("{context}: matrix must be rectangular and nonempty")));
    }
    Ok((rows.len(), cols))
}

pub(crate) fn expr_matrix(doc: &ExprMatrixDoc, context: &str) -> Result<FnMatrix> {
    let (r, c) = rectangular(doc, context)?;
    let mut entries = Vec::with_capacity(r * c);
    for (i, row) in doc.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            entries.push(expr(e, &format!("{context}[{i}][{j}]"))?);
        }
    }
    FnMatrix::new(r, c, entries).map_err(|e| schema(context, e))
}

pub(crate) fn square_expr_matrix(doc: &ExprMatrixDoc, n: usize, context: &str) -> Result<FnMatrix> {
    let m = expr_matrix(doc, context)?;
    if m.rows() != n || m.cols() != n {
        return Err(Error::Schema(format!("{context}: expected {n}x{n}")));
    }
    Ok(m)
}

pub(crate) fn expr_vector(doc: &ExprVectorDoc, n: usize, context: &str) -> Result<FnMatrix> {
    if doc.len() != n {
        return Err(Error::Schema(format!("{context}: expected {n} components")));
    }
    let entries = doc
        .iter()
        .enumerate()
        .map(|(i, e)| expr(e, &format!("{context}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(FnMatrix::column(entries))
}

pub(crate) fn const_matrix(doc: &ConstMatrixDoc, context: &str) -> Result<CMatrix> {
    let (r, c) = rectangular(doc, context)?;
    let data: Vec<Complex64> = doc.iter().flat_map(|row| row.iter().map(|z| z.value())).collect();
    let m = CMatrix::new(r, c, data).map_err(|e| schema(context, e))?;
    if !m.is_finite() {
        return Err(Error::Schema(format!("{context}: non-finite entry")));
    }
    Ok(m)
}

pub(crate) fn square_const_matrix(doc: &ConstMatrixDoc, n: usize, context: &str) -> Result<CMatrix> {
    let m = const_matrix(doc, context)?;
    if m.rows() != n || m.cols() != n {
        return Err(Error::Schema(format!("{context}: expected {n}x{n}")));
    }
    Ok(m)
}

pub(crate) fn operator(doc: &OperatorDoc, context: &str) -> Result<MatrixDiffOp> {
    if doc.coeffs.is_empty() {
        return Err(Error::Schema(format!("{context}: operator needs at least one coefficient")));
    }
    let coeffs = doc
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, m)| expr_matrix(m, &format!("{context}.coeffs[{j}]")))
        .collect::<Result<Vec<_>>>()?;
    let n = coeffs[0].rows();
    if coeffs.iter().any(|m| m.rows() != n || m.cols() != n) {
        return Err(Error::Schema(format!("{context}: coefficients must all be {n}x{n}")));
    }
    MatrixDiffOp::new(coeffs).map_err(|e| schema(context, e))
}

pub(crate) fn potential(doc: Option<&ExprMatrixDoc>, n: usize, context: &str) -> Result<FnMatrix> {
    match doc {
        Some(d) => square_expr_matrix(d, n, context),
        None => Ok(FnMatrix::zeros(n, n)),
    }
}

/// Records of a Jordan document; the constructor's own checks run later.
pub(crate) fn eigen_records(doc: &JordanDoc, context: &str) -> Result<(Vec<EigenRecord>, Option<CMatrix>)> {
    dimension(doc.n, context)?;
    let records = doc
        .eigen
        .iter()
        .map(|e| EigenRecord {
            lambda: e.lambda.value(),
            chains: e.chains.iter().map(|c| c.iter().map(|v| v.iter().map(|z| z.value()).collect()).collect()).collect(),
        })
        .collect();
    let claimed = doc.matrix.as_ref().map(|m| square_const_matrix(m, doc.n, &format!("{context}.matrix"))).transpose()?;
    Ok((records, claimed))
}

pub(crate) fn params(docs: &[ParamDoc], context: &str) -> Result<ParamFunctions> {
    let mut p = ParamFunctions::new();
    for (k, d) in docs.iter().enumerate() {
        let [i, a, kk, t] = d.index;
        let index: ParamIndex = (i, a, kk, t);
        if p.explicit().contains_key(&index) {
            return Err(Error::Schema(format!("{context}[{k}]: duplicate index {:?}", d.index)));
        }
        p.insert(index, expr(&d.value, &format!("{context}[{k}]"))?);
    }
    Ok(p)
}

pub(crate) fn blocks(docs: &[BlockDoc]) -> Vec<BlockEntry> {
    docs.iter().map(|b| BlockEntry { lambda: b.lambda.value(), orders: b.orders.clone() }).collect()
}

/// Serialized form of an operator, as written to reports.
pub fn operator_doc(op: &MatrixDiffOp) -> OperatorDoc {
    OperatorDoc { coeffs: op.coeffs().iter().map(expr_matrix_doc).collect() }
}

pub fn expr_matrix_doc(m: &FnMatrix) -> ExprMatrixDoc {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect()).collect()
}

pub fn const_matrix_doc(m: &CMatrix) -> ConstMatrixDoc {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| ComplexDoc::from_value(m[(i, j)])).collect()).collect()
}

/// Checks every expression and shape in the scenario without running it.
pub fn compile_check(scn: &Scenario) -> Result<()> {
    for t in &scn.tasks {
        let ctx = t.id();
        match t {
            TaskDoc::BuildHamiltonian { spec, params: p, expect_potential, expect_symmetry, .. } => {
                eigen_records(spec, ctx)?;
                params(p, &format!("{ctx}.params"))?;
                if let Some(e) = expect_potential {
                    square_expr_matrix(e, spec.n, &format!("{ctx}.expect_potential"))?;
                }
                if let Some(e) = expect_symmetry {
                    square_const_matrix(e, spec.n, &format!("{ctx}.expect_symmetry"))?;
                }
            }
            TaskDoc::VerifyCommutator { potential: v, symmetry, .. } => {
                let v = expr_matrix(v, &format!("{ctx}.potential"))?;
                square_const_matrix(symmetry, v.rows(), &format!("{ctx}.symmetry"))?;
            }
            TaskDoc::BuildIntertwiner { n, kernel, leading, v_plus, expect_operator, expect_partner, .. } => {
                dimension(*n, ctx)?;
                if kernel.is_empty() {
                    return Err(Error::Schema(format!("{ctx}: the kernel must be nonempty")));
                }
                for (k, f) in kernel.iter().enumerate() {
                    expr_vector(f, *n, &format!("{ctx}.kernel[{k}]"))?;
                }
                if let Some(l) = leading {
                    square_const_matrix(l, *n, &format!("{ctx}.leading"))?;
                }
                potential(v_plus.as_ref(), *n, &format!("{ctx}.v_plus"))?;
                if let Some(e) = expect_operator {
                    operator(e, &format!("{ctx}.expect_operator"))?;
                }
                if let Some(e) = expect_partner {
                    square_expr_matrix(e, *n, &format!("{ctx}.expect_partner"))?;
                }
            }
            TaskDoc::CheckMinimizability { n, operator: op, v_plus, .. } => {
                dimension(*n, ctx)?;
                if let Some(op) = op {
                    let q = operator(op, &format!("{ctx}.operator"))?;
                    if q.n() != *n {
                        return Err(Error::Schema(format!("{ctx}.operator: expected {n}x{n} coefficients")));
                    }
                }
                potential(v_plus.as_ref(), *n, &format!("{ctx}.v_plus"))?;
            }
            TaskDoc::Divide { dividend, divisor, expect_quotient, .. } => {
                operator(dividend, &format!("{ctx}.dividend"))?;
                operator(divisor, &format!("{ctx}.divisor"))?;
                if let Some(e) = expect_quotient {
                    operator(e, &format!("{ctx}.expect_quotient"))?;
                }
            }
            TaskDoc::StrongCheck { spec, v_plus, phi, psi, operator: op, expect_factor, .. } => {
                eigen_records(spec, ctx)?;
                potential(v_plus.as_ref(), spec.n, &format!("{ctx}.v_plus"))?;
                for (name, fam) in [("phi", phi), ("psi", psi)] {
                    params(&fam.params, &format!("{ctx}.{name}.params"))?;
                    for (c, chain) in fam.chains.iter().flatten().enumerate() {
                        for (l, f) in chain.functions.iter().enumerate() {
                            expr_vector(f, spec.n, &format!("{ctx}.{name}.chains[{c}][{l}]"))?;
                        }
                    }
                }
                if let Some(op) = op {
                    operator(op, &format!("{ctx}.operator"))?;
                }
                if let Some(e) = expect_factor {
                    operator(e, &format!("{ctx}.expect_factor"))?;
                }
            }
            TaskDoc::ClosedForm { lambdas, vectors, phis, expect_potential, expect_symmetry, .. } => {
                if lambdas.is_empty() || lambdas.len() > 2 || vectors.len() != 2 || phis.len() != 2 {
                    return Err(Error::Schema(format!("{ctx}: closed forms take 1-2 eigenvalues, two vectors and two functions")));
                }
                for (k, p) in phis.iter().enumerate() {
                    expr(p, &format!("{ctx}.phis[{k}]"))?;
                }
                if let Some(e) = expect_potential {
                    square_expr_matrix(e, 2, &format!("{ctx}.expect_potential"))?;
                }
                if let Some(e) = expect_symmetry {
                    square_const_matrix(e, 2, &format!("{ctx}.expect_symmetry"))?;
                }
            }
            TaskDoc::ExampleSweep { draws, .. } => {
                if *draws == 0 {
                    return Err(Error::Schema(format!("{ctx}: draws must be positive")));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_documents() {
        let scn = parse_scenario(r#"{"version": "1", "tasks": []}"#).unwrap();
        assert!(scn.tasks.is_empty());
        assert!(matches!(parse_scenario(r#"{"version": "2", "tasks": []}"#), Err(Error::Schema(_))));
        assert!(matches!(parse_scenario(r#"{"version": "1", "tasks": [], "extra": 1}"#), Err(Error::Schema(_))));
        assert!(matches!(parse_scenario("not json"), Err(Error::Schema(_))));
    }

    #[test]
    fn tasks_are_tagged_by_kind() {
        let text = r#"{"version": "1", "tasks": [
            {"kind": "verify-commutator", "id": "c", "potential": [["x", "0"], ["0", "x"]], "symmetry": [[1, 0], [0, [0, 1]]]}
        ]}"#;
        let scn = parse_scenario(text).unwrap();
        assert_eq!(scn.tasks[0].kind(), "verify-commutator");
        compile_check(&scn).unwrap();

        let unknown_field = r#"{"version": "1", "tasks": [
            {"kind": "verify-commutator", "id": "c", "potential": [["x"]], "symmetry": [[1]], "typo": 0}
        ]}"#;
        assert!(matches!(parse_scenario(unknown_field), Err(Error::Schema(_))));
        let unknown_kind = r#"{"version": "1", "tasks": [{"kind": "plot", "id": "p"}]}"#;
        assert!(matches!(parse_scenario(unknown_kind), Err(Error::Schema(_))));
        let dup = r#"{"version": "1", "tasks": [
            {"kind": "example-sweep", "id": "s", "form": "two-eigen", "draws": 1},
            {"kind": "example-sweep", "id": "s", "form": "two-eigen", "draws": 1}
        ]}"#;
        assert!(matches!(parse_scenario(dup), Err(Error::Schema(_))));
    }

    #[test]
    fn bad_expressions_and_shapes_fail_compilation() {
        let bad_expr = r#"{"version": "1", "tasks": [
            {"kind": "verify-commutator", "id": "c", "potential": [["x +"]], "symmetry": [[1]]}
        ]}"#;
        let err = compile_check(&parse_scenario(bad_expr).unwrap()).unwrap_err();
        assert!(matches!(&err, Error::Schema(m) if m.contains("c.potential[0][0]")), "{err}");
        let ragged = r#"{"version": "1", "tasks": [
            {"kind": "verify-commutator", "id": "c", "potential": [["x", "1"], ["x"]], "symmetry": [[1]]}
        ]}"#;
        assert!(compile_check(&parse_scenario(ragged).unwrap()).is_err());
    }

    #[test]
    fn documents_round_trip() {
        let m = FnMatrix::new(1, 2, vec![ScalarFn::x().exp(), ScalarFn::constant(Complex64::new(0.5, -1.0))]).unwrap();
        let doc = expr_matrix_doc(&m);
        assert_eq!(doc, vec![vec!["exp(x)".to_string(), "(0.5,-1)".to_string()]]);
        let back = expr_matrix(&doc, "m").unwrap();
        assert_eq!(expr_matrix_doc(&back), doc);
        let c = CMatrix::from_rows(&[vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]]).unwrap();
        assert_eq!(const_matrix(&const_matrix_doc(&c), "c").unwrap(), c);
    }
}
