use num_bigint::BigInt;

use crate::exprcore::{Polynomial, Rational, RationalFunction};
use crate::extcalc::{flow_to_form, DiffForm, VectorField};

use super::MechError;

/// The Euler (radial) field `Σ x_i ∂/∂x_i`.
pub fn euler_field(dim: usize, nvars: usize) -> VectorField {
    VectorField::new((0..dim).map(|i| RationalFunction::var(nvars, i)).collect())
        .expect("non-empty field")
}

/// Radial homotopy operator `K` of the Poincaré lemma on R^n.
///
/// A monomial term `m(x) dx_I` of coordinate degree `p` and form degree `k`
/// maps to `m(x)/(p + k) · E ⌟ dx_I`. Then `dK + Kd = id` on forms of positive
/// degree with polynomial coefficients, so `d(K a) = a` for closed `a`.
/// Denominators depending only on parameters are carried through.
pub fn homotopy_operator(a: &DiffForm) -> Result<DiffForm, MechError> {
    let k = a.degree();
    if k == 0 {
        return Err(MechError::ZeroDegree);
    }
    if !a.has_polynomial_coefficients() {
        return Err(MechError::NonPolynomial);
    }
    let (dim, nvars) = (a.dim(), a.nvars());
    let euler = euler_field(dim, nvars);
    let mut out = DiffForm::zero(dim, nvars, k - 1);
    for (idx, c) in a.terms() {
        let weighted = Polynomial::from_terms(
            nvars,
            c.numer().terms().map(|(m, v)| {
                let p = m.degree_in_first(dim) as usize;
                let w = Rational::new(BigInt::from(1), BigInt::from(p + k));
                (m.clone(), v * w)
            }),
        );
        let coef = RationalFunction::normalize(weighted, c.denom().clone())?;
        let basis = DiffForm::from_terms(dim, nvars, k, [(*idx, coef)]);
        out = out.try_add(&basis.interior(&euler)?)?;
    }
    Ok(out)
}

/// A vector Hamiltonian: an (n-2)-form `h` with `dh = X ⌟ Ω`.
///
/// Computed as `K(X ⌟ Ω)`; any `h + dν` is equally valid.
pub fn vector_hamiltonian(field: &VectorField) -> Result<DiffForm, MechError> {
    let div = field.divergence();
    if !div.is_zero() {
        return Err(MechError::NonzeroDivergence(div));
    }
    let w = flow_to_form(field)?;
    if !w.has_polynomial_coefficients() {
        return Err(MechError::NonPolynomial);
    }
    homotopy_operator(&w)
}
