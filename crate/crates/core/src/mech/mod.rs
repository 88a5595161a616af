//! Mechanics of divergence-free flows: Nambu flows built from invariants,
//! vector Hamiltonians, splittings of `X ⌟ Ω` and their classification.

mod certificate;
mod factor;
mod homotopy;
mod nambu;

use thiserror::Error;

pub use certificate::{
    classify, verify_certificate, Certificate, CertificateFactor, ClassLabel, Exactness, MechanicsClass,
    Provenance, Signature, VerificationReport,
};
pub use factor::{factorize_eq4, wedge_all, Factorization};
pub use homotopy::{euler_field, homotopy_operator, vector_hamiltonian};
pub use nambu::nambu_flow;

use crate::exprcore::{ExprError, RationalFunction};
use crate::extcalc::{DiffForm, FormError, VectorField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechError {
    #[error("expected {expected} invariants, got {got}")]
    WrongInvariantCount { expected: usize, got: usize },
    /// Carries the divergence so callers can print it.
    #[error("divergence is not identically zero")]
    NonzeroDivergence(RationalFunction),
    #[error("coefficients must be polynomial in the coordinates")]
    NonPolynomial,
    #[error("form of degree 0 where degree >= 1 is required")]
    ZeroDegree,
    #[error("the zero form has no factorization")]
    ZeroForm,
    #[error("certificate has no factors")]
    EmptyCertificate,
    #[error("certificate degrees sum to {sum}, expected {expected}")]
    CertificateDegrees { sum: usize, expected: usize },
    #[error("degree mismatch: form has degree {expected}, certificate product has degree {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Form(#[from] FormError),
}

impl From<ExprError> for MechError {
    fn from(e: ExprError) -> Self {
        MechError::Form(FormError::Expr(e))
    }
}

/// `X(I)`; zero iff `I` is a first integral.
pub fn first_integral_check(field: &VectorField, i: &RationalFunction) -> RationalFunction {
    field.apply(i)
}

/// `L_X J`; zero iff `J` is an (absolute) integral invariant.
pub fn lie_invariance_check(field: &VectorField, j: &DiffForm) -> Result<DiffForm, MechError> {
    Ok(j.lie_derivative(field)?)
}

/// `L_X J ^ dI_1 ^ ... ^ dI_k`.
///
/// Zero means `L_X J` vanishes on every common level set of the `I_i`, so
/// integrals of `J` over chains inside a level set are preserved by the flow.
pub fn relative_invariance_check(
    field: &VectorField,
    j: &DiffForm,
    integrals: &[RationalFunction],
) -> Result<DiffForm, MechError> {
    let mut acc = j.lie_derivative(field)?;
    for f in integrals {
        acc = acc.wedge(&DiffForm::function(j.dim(), f.clone()).ext_d())?;
    }
    Ok(acc)
}
