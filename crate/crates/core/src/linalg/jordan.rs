use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{vec_max_abs, CMatrix, CVector};
use crate::error::{Error, Result};
use crate::expr::TAU_ZERO;
use crate::sampling::Residual;

/// Eigenvector followed by its associated vectors: `X_0, X_1, ...` with
/// `(A - lambda) X_l = X_{l-1}`.
pub type ChainVectors = Vec<CVector>;

/// One eigenvalue with its Jordan chains, longest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub lambda: Complex64,
    pub chains: Vec<ChainVectors>,
}

/// Jordan structure of a constant `n x n` matrix, given as chain data.
///
/// Chain vectors are ordered by eigenvalue index, then chain index, then
/// level. That ordering is used everywhere vectors (or vector-functions built
/// from them) are stacked as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanSpec {
    n: usize,
    records: Vec<EigenRecord>,
    claimed: Option<CMatrix>,
}

impl JordanSpec {
    pub fn new(n: usize, records: Vec<EigenRecord>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        for (i, r) in records.iter().enumerate() {
            if r.chains.is_empty() {
                return Err(Error::InvalidSpec(format!("eigenvalue {i} has no chains")));
            }
            if records[..i].iter().any(|o| o.lambda == r.lambda) {
                return Err(Error::DegenerateEigenvalues);
            }
            for (a, chain) in r.chains.iter().enumerate() {
                if chain.is_empty() {
                    return Err(Error::InvalidSpec(format!("chain ({i},{a}) is empty")));
                }
                if a > 0 && chain.len() > r.chains[a - 1].len() {
                    return Err(Error::InvalidSpec(format!(
                        "chain lengths of eigenvalue {i} must be nonincreasing"
                    )));
                }
                if let Some(v) = chain.iter().find(|v| v.len() != n) {
                    return Err(Error::DimensionMismatch(format!(
                        "chain vector of length {} in dimension {n}",
                        v.len()
                    )));
                }
                if chain.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return Err(Error::InvalidSpec("non-finite chain vector entry".into()));
                }
            }
        }
        Ok(JordanSpec { n, records, claimed: None })
    }

    /// Attaches an explicitly supplied matrix that the chains are claimed to describe.
    pub fn with_claimed_matrix(mut self, a: CMatrix) -> Result<Self> {
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::DimensionMismatch("claimed matrix size".into()));
        }
        self.claimed = Some(a);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn records(&self) -> &[EigenRecord] {
        &self.records
    }

    pub fn claimed_matrix(&self) -> Option<&CMatrix> {
        self.claimed.as_ref()
    }

    pub fn eigenvalue(&self, i: usize) -> Complex64 {
        self.records[i].lambda
    }

    /// Number of chains for eigenvalue `i` (g_i).
    pub fn chain_count(&self, i: usize) -> usize {
        self.records[i].chains.len()
    }

    /// Chain lengths for eigenvalue `i` (nu_ia).
    pub fn chain_lengths(&self, i: usize) -> Vec<usize> {
        self.records[i].chains.iter().map(Vec::len).collect()
    }

    /// Number of chains of eigenvalue `i` that have a vector at level `l`
    /// (g_il), i.e. chains longer than `l`.
    pub fn level_count(&self, i: usize, l: usize) -> usize {
        self.records[i].chains.iter().filter(|c| c.len() > l).count()
    }

    pub fn algebraic_multiplicity(&self, i: usize) -> usize {
        self.records[i].chains.iter().map(Vec::len).sum()
    }

    pub fn vector(&self, i: usize, a: usize, l: usize) -> &CVector {
        &self.records[i].chains[a][l]
    }

    pub fn vector_count(&self) -> usize {
        (0..self.records.len()).map(|i| self.algebraic_multiplicity(i)).sum()
    }

    pub fn is_complete(&self) -> bool {
        self.vector_count() == self.n
    }

    /// `(i, a, l)` for every chain vector, in stacking order.
    pub fn indices(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (i, r) in self.records.iter().enumerate() {
            for (a, chain) in r.chains.iter().enumerate() {
                for l in 0..chain.len() {
                    out.push((i, a, l));
                }
            }
        }
        out
    }

    /// All chain vectors in stacking order.
    pub fn columns(&self) -> Vec<CVector> {
        self.indices().into_iter().map(|(i, a, l)| self.vector(i, a, l).clone()).collect()
    }

    /// Block-diagonal Jordan matrix implied by the chain lengths.
    pub fn jordan_matrix(&self) -> CMatrix {
        let m = self.vector_count();
        let mut j = CMatrix::zeros(m, m);
        for (k, (i, _, l)) in self.indices().into_iter().enumerate() {
            j[(k, k)] = self.records[i].lambda;
            if l > 0 {
                j[(k - 1, k)] = Complex64::new(1.0, 0.0);
            }
        }
        j
    }

    /// The matrix the chains describe: the claimed matrix when one was
    /// supplied, otherwise the one reconstructed from the chains.
    pub fn matrix(&self) -> Result<CMatrix> {
        match &self.claimed {
            Some(a) => Ok(a.clone()),
            None => assemble_matrix(self),
        }
    }
}

/// Reconstructs `A = S J S^-1` from complete chain data.
pub fn assemble_matrix(spec: &JordanSpec) -> Result<CMatrix> {
    if !spec.is_complete() {
        return Err(Error::IncompleteSpec { vectors: spec.vector_count(), n: spec.n });
    }
    let s = CMatrix::from_columns(&spec.columns())?;
    if s.det()?.norm() <= TAU_ZERO {
        return Err(Error::SingularMatrix { pivot: s.det()?.norm() });
    }
    // A S = S J  =>  A^T = S^-T (S J)^T, solved as S^T A^T = (S J)^T
    let sj = s.mat_mul(&spec.jordan_matrix())?;
    let at = transpose(&s).solve(&transpose(&sj))?;
    Ok(transpose(&at))
}

fn transpose(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(m.cols(), m.rows(), |i, j| m[(j, i)])
}

/// Max over all chain relations of `|(A - lambda_i) X_ial - X_ia,l-1|`.
pub fn verify_chains(a: &CMatrix, spec: &JordanSpec, tol: f64) -> Result<Residual> {
    if a.rows() != spec.n || a.cols() != spec.n {
        return Err(Error::DimensionMismatch("matrix and chain dimension differ".into()));
    }
    let mut worst = 0.0f64;
    for r in spec.records() {
        let shifted = a.sub(&CMatrix::identity(spec.n).scale(r.lambda))?;
        for chain in &r.chains {
            for (l, v) in chain.iter().enumerate() {
                let mut lhs = shifted.mul_vec(v)?;
                if l > 0 {
                    for (z, p) in lhs.iter_mut().zip(&chain[l - 1]) {
                        *z -= p;
                    }
                }
                worst = worst.max(vec_max_abs(&lhs));
            }
        }
    }
    Ok(Residual::exact(worst, tol))
}
