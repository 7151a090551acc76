//! Seeded random draws for the 2x2 closed forms, each compared against the
//! general construction.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::diffop::SchrodingerOp;
use crate::error::{Error, Result};
use crate::expr::ScalarFn;
use crate::linalg::{CMatrix, CVector, JordanSpec};
use crate::sampling::{sample_max_diff, Grid, Residual};
use crate::symmetry::{
    build_hamiltonian, commutator_residual, single_block_closed_form, single_block_params, single_block_spec,
    two_eigen_closed_form, two_eigen_params, two_eigen_spec, ParamFunctions, SymmetryScenario,
};

use super::scenario::ClosedForm;

/// Inputs of one closed-form case.
#[derive(Debug, Clone)]
pub struct ClosedCase {
    pub form: ClosedForm,
    /// `[λ₁, λ₂]` or `[λ₀]`.
    pub lambdas: Vec<Complex64>,
    /// `[X₁, X₂]` or `[X₀, X₁]`.
    pub vectors: [CVector; 2],
    /// `[φ₁, φ₂]` or `[φ₀, φ₁]`.
    pub phis: [ScalarFn; 2],
}

impl ClosedCase {
    pub fn closed_form(&self) -> Result<(SchrodingerOp, CMatrix)> {
        let [v0, v1] = &self.vectors;
        let [p0, p1] = &self.phis;
        match (self.form, self.lambdas.as_slice()) {
            (ClosedForm::TwoEigen, [l1, l2]) => two_eigen_closed_form(*l1, *l2, v0, v1, p0, p1),
            (ClosedForm::SingleBlock, [l0]) => single_block_closed_form(*l0, v0, v1, p0, p1),
            _ => Err(Error::InvalidSpec("wrong number of eigenvalues for the closed form".into())),
        }
    }

    /// Jordan data and parameters for the general construction.
    pub fn general_inputs(&self) -> Result<(JordanSpec, ParamFunctions)> {
        let [v0, v1] = &self.vectors;
        let [p0, p1] = &self.phis;
        match (self.form, self.lambdas.as_slice()) {
            (ClosedForm::TwoEigen, [l1, l2]) => Ok((two_eigen_spec(*l1, *l2, v0, v1)?, two_eigen_params(p0, p1))),
            (ClosedForm::SingleBlock, [l0]) => Ok((single_block_spec(*l0, v0, v1)?, single_block_params(p0, p1))),
            _ => Err(Error::InvalidSpec("wrong number of eigenvalues for the closed form".into())),
        }
    }
}

/// Closed form against the general construction.
#[derive(Debug, Clone, Serialize)]
pub struct CaseCheck {
    /// `[V(x), A]` for the closed form.
    pub commutator: Residual,
    /// Closed-form potential against the general one.
    pub potential: Residual,
    /// Closed-form `A` against the general one.
    pub symmetry: Residual,
}

impl CaseCheck {
    pub fn passed(&self) -> bool {
        self.commutator.passed() && self.potential.passed() && self.symmetry.passed()
    }
}

pub fn check_case(case: &ClosedCase, grid: &Grid, commutator_tol: f64, match_tol: f64, tau_wron: f64) -> Result<(SchrodingerOp, CMatrix, CaseCheck)> {
    let (h, a) = case.closed_form()?;
    let (spec, params) = case.general_inputs()?;
    let general = build_hamiltonian(&SymmetryScenario::new(spec, params)?, grid, tau_wron)?;
    let commutator = commutator_residual(&h, &a, grid, commutator_tol)?;
    let potential = sample_max_diff(
        h.potential().entries(),
        general.hamiltonian.potential().entries(),
        grid,
        match_tol,
    );
    let symmetry = Residual::exact(a.sub(&general.symmetry)?.max_abs(), match_tol);
    Ok((h, a, CaseCheck { commutator, potential, symmetry }))
}

fn complex(rng: &mut impl Rng, r: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// One of `exp(c x)`, `s (cosh x + 2)`, `s (2 + sin x)`; none vanish.
pub fn random_phi(rng: &mut impl Rng) -> ScalarFn {
    let x = ScalarFn::x();
    match rng.gen_range(0..3) {
        0 => x.scale(Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).exp(),
        1 => (x.cosh() + ScalarFn::real(2.0)).scale(Complex64::new(rng.gen_range(0.5..2.0), 0.0)),
        _ => (ScalarFn::real(2.0) + x.sin()).scale(Complex64::new(rng.gen_range(0.5..2.0), 0.0)),
    }
}

/// Two complex 2-vectors with `|det [v0 v1]| ≥ 0.5`.
pub fn random_frame(rng: &mut impl Rng) -> [CVector; 2] {
    loop {
        let v0 = vec![complex(rng, 1.0), complex(rng, 1.0)];
        let v1 = vec![complex(rng, 1.0), complex(rng, 1.0)];
        if (v0[0] * v1[1] - v0[1] * v1[0]).norm() >= 0.5 {
            return [v0, v1];
        }
    }
}

pub fn random_case(rng: &mut impl Rng, form: ClosedForm) -> ClosedCase {
    let lambdas = match form {
        ClosedForm::TwoEigen => loop {
            let (l1, l2) = (complex(rng, 3.0), complex(rng, 3.0));
            if (l1 - l2).norm() >= 0.1 {
                break vec![l1, l2];
            }
        },
        ClosedForm::SingleBlock => vec![complex(rng, 3.0)],
    };
    ClosedCase { form, lambdas, vectors: random_frame(rng), phis: [random_phi(rng), random_phi(rng)] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_are_reproducible() {
        let a = random_case(&mut ChaCha8Rng::seed_from_u64(7), ClosedForm::TwoEigen);
        let b = random_case(&mut ChaCha8Rng::seed_from_u64(7), ClosedForm::TwoEigen);
        assert_eq!(a.lambdas, b.lambdas);
        assert_eq!(a.phis[0].to_string(), b.phis[0].to_string());
    }

    #[test]
    fn a_few_draws_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for form in [ClosedForm::TwoEigen, ClosedForm::SingleBlock] {
            for _ in 0..3 {
                let case = random_case(&mut rng, form);
                let (_, _, check) = check_case(&case, &Grid::default(), 1e-10, 1e-9, 1e-8).unwrap();
                assert!(check.passed(), "{form:?} {check:?}");
            }
        }
    }
}
