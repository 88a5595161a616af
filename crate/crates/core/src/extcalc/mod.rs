//! Graded exterior algebra over R^n with rational-function coefficients.
//!
//! Sign convention for contraction with the volume form: the Plücker basis is
//! `dS_i = (-1)^(i-1) dx_1 ^ ... ^ [dx_i] ^ ... ^ dx_n` (1-based `i`), so that
//! `flow_to_form(X) = X ⌟ Ω = Σ X_i dS_i`. With this choice the cubic field
//! `(z^2, x^2, y^2)` satisfies `X ⌟ Ω = (z^2 dy - x^2 dx) ^ (dz - y^2/z^2 dx)`.
//! A `(-1)^i` convention would flip the overall sign.

mod form;
mod index;
mod parse;

use thiserror::Error;

pub use form::{DiffForm, FormDisplay, VectorField};
pub use index::{MultiIndex, MAX_DIM};
pub use parse::parse_form;

use crate::exprcore::{ExprError, RationalFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("interior product of a 0-form")]
    ZeroDegree,
    #[error("vector field has no components")]
    EmptyField,
    #[error("dimension {0} exceeds the supported maximum")]
    TooLarge(usize),
    #[error("expected a form of degree {expected}, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("flow-to-form map needs dimension >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub fn wedge(a: &DiffForm, b: &DiffForm) -> Result<DiffForm, FormError> {
    a.wedge(b)
}

pub fn ext_d(a: &DiffForm) -> DiffForm {
    a.ext_d()
}

pub fn interior(field: &VectorField, a: &DiffForm) -> Result<DiffForm, FormError> {
    a.interior(field)
}

pub fn lie_derivative(field: &VectorField, a: &DiffForm) -> Result<DiffForm, FormError> {
    a.lie_derivative(field)
}

pub fn is_closed(a: &DiffForm) -> bool {
    a.is_closed()
}

pub fn divergence(field: &VectorField) -> RationalFunction {
    field.divergence()
}

/// Sign of `dS_i` relative to the sorted basis element omitting `i` (0-based).
fn plucker_sign(i: usize) -> bool {
    i % 2 == 1
}

/// `X ⌟ Ω = Σ X_i dS_i`.
pub fn flow_to_form(field: &VectorField) -> Result<DiffForm, FormError> {
    let n = field.dim();
    if n < 2 {
        return Err(FormError::DimensionTooSmall(n));
    }
    let full = MultiIndex::full(n);
    let terms = field.components().iter().enumerate().map(|(i, c)| {
        let c = if plucker_sign(i) { -c } else { c.clone() };
        (full.remove(i), c)
    });
    Ok(DiffForm::from_terms(n, field.nvars(), n - 1, terms))
}

/// Inverse of [`flow_to_form`]: reads `A_i` from `w = Σ A_i dS_i`.
pub fn form_to_flow(w: &DiffForm) -> Result<VectorField, FormError> {
    let n = w.dim();
    if n < 2 {
        return Err(FormError::DimensionTooSmall(n));
    }
    if w.degree() != n - 1 {
        return Err(FormError::WrongDegree { expected: n - 1, got: w.degree() });
    }
    let full = MultiIndex::full(n);
    let comps = (0..n)
        .map(|i| {
            let c = w.coefficient(&full.remove(i));
            if plucker_sign(i) {
                -c
            } else {
                c
            }
        })
        .collect();
    VectorField::new(comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprcore::{parse_expr, Scope};

    fn field(exprs: &[&str], sc: &Scope) -> VectorField {
        VectorField::new(exprs.iter().map(|s| parse_expr(s, sc).unwrap()).collect()).unwrap()
    }

    #[test]
    fn flow_to_form_examples() {
        let sc = Scope::new(&["x", "y", "z"]);
        let w = flow_to_form(&field(&["z^2", "x^2", "y^2"], &sc)).unwrap();
        assert_eq!(w, parse_form("z^2 * dy ^ dz - x^2 * dx ^ dz + y^2*dx^dy", &sc, 3).unwrap());

        let w = flow_to_form(&field(&["1", "0", "0"], &sc)).unwrap();
        assert_eq!(w, DiffForm::basis(3, 3, &[1, 2]));

        let sc2 = Scope::new(&["x1", "x2"]);
        let w = flow_to_form(&field(&["x2", "-x1"], &sc2)).unwrap();
        let h = DiffForm::function(2, parse_expr("1/2*(x1^2 + x2^2)", &sc2).unwrap());
        assert_eq!(w, h.ext_d());
    }

    #[test]
    fn flow_form_round_trip() {
        let sc = Scope::new(&["a", "b", "c", "d"]);
        let x = field(&["b*c", "a - d", "1/(a + 1)", "c^2"], &sc);
        assert_eq!(form_to_flow(&flow_to_form(&x).unwrap()).unwrap(), x);
        assert!(matches!(
            form_to_flow(&DiffForm::dx(4, 4, 0)),
            Err(FormError::WrongDegree { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn divergence_examples() {
        let sc = Scope::new(&["x", "y", "z"]);
        assert!(divergence(&field(&["z^2", "x^2", "y^2"], &sc)).is_zero());
        assert_eq!(divergence(&field(&["x", "y", "z"], &sc)), parse_expr("3", &sc).unwrap());
    }

    #[test]
    fn d_of_flow_form_is_divergence_volume() {
        let sc = Scope::new(&["x", "y", "z"]);
        let x = field(&["x*y", "y^2 - z", "x*z^3"], &sc);
        let lhs = flow_to_form(&x).unwrap().ext_d();
        let rhs = DiffForm::volume(3, 3).mul_function(&divergence(&x));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cubic_wedge_expansion() {
        let sc = Scope::new(&["x", "y", "z"]);
        let j1 = parse_form("z^2*dy - x^2*dx", &sc, 3).unwrap();
        let j2 = parse_form("dz - y^2/z^2*dx", &sc, 3).unwrap();
        let expected = parse_form("z^2*dy^dz - x^2*dx^dz + y^2*dx^dy", &sc, 3).unwrap();
        assert_eq!(wedge(&j1, &j2).unwrap(), expected);
    }

    #[test]
    fn closedness_of_symplectic_j3() {
        let sc = Scope::new(&["x1", "p1", "x2", "p2"]);
        let j3 = parse_form("1/2*(1/p1)*dx1 - 1/2*(1/x1)*dp1 - 1/2*(1/p2)*dx2 + 1/2*(1/x2)*dp2", &sc, 4)
            .unwrap();
        assert!(!is_closed(&j3));
    }
}
