use crate::exprcore::RationalFunction;
use crate::extcalc::{form_to_flow, DiffForm};

use super::MechError;

/// Splitting of an (n-1)-form into n-1 one-forms.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    /// 0-based index of the pivot coefficient `A_p`.
    pub pivot: usize,
    pub factors: Vec<DiffForm>,
}

/// Direct factorization of `w = Σ A_i dS_i` into one-forms.
///
/// With pivot `p` the smallest index with `A_p != 0` and `q` the first other
/// index, the factors are `A_p dx_q - A_q dx_p` followed by
/// `dx_i - (A_i/A_p) dx_p` for the remaining `i` in increasing order. The
/// first factor carries the sign `(-1)^p` (0-based), so that the wedge of the
/// factors equals `w`.
pub fn factorize_eq4(w: &DiffForm) -> Result<Factorization, MechError> {
    if w.is_zero() {
        return Err(MechError::ZeroForm);
    }
    let a = form_to_flow(w)?;
    let (dim, nvars) = (w.dim(), w.nvars());
    let pivot = (0..dim).find(|&i| !a.component(i).is_zero()).expect("nonzero form");
    let q = if pivot == 0 { 1 } else { 0 };
    let ap = a.component(pivot);
    let dx = |i: usize, c: &RationalFunction| DiffForm::dx(dim, nvars, i).mul_function(c);

    let mut first = dx(q, ap).try_sub(&dx(pivot, a.component(q)))?;
    if pivot % 2 == 1 {
        first = first.neg();
    }
    let mut factors = vec![first];
    for i in (0..dim).filter(|&i| i != pivot && i != q) {
        let ratio = a.component(i).checked_div(ap)?;
        factors.push(DiffForm::dx(dim, nvars, i).try_sub(&dx(pivot, &ratio))?);
    }
    Ok(Factorization { pivot, factors })
}

/// Wedge of a non-empty list of forms.
pub fn wedge_all(forms: &[DiffForm]) -> Result<DiffForm, MechError> {
    let (head, tail) = forms.split_first().ok_or(MechError::EmptyCertificate)?;
    let mut acc = head.clone();
    for f in tail {
        acc = acc.wedge(f)?;
    }
    Ok(acc)
}
