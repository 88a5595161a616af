use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};

use super::index::{MultiIndex, MAX_DIM};
use super::FormError;
use crate::exprcore::{Rational, RationalFunction};

/// Sparse differential form of fixed degree on R^dim.
///
/// Coefficients live in a polynomial ring with `nvars >= dim` variables. The
/// first `dim` are coordinates; any further variables are parameters and are
/// treated as constants by `d` and by contractions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffForm {
    dim: usize,
    nvars: usize,
    degree: usize,
    terms: BTreeMap<MultiIndex, RationalFunction>,
}

impl DiffForm {
    pub fn zero(dim: usize, nvars: usize, degree: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        assert!(nvars >= dim, "coefficient ring must contain the coordinates");
        DiffForm { dim, nvars, degree, terms: BTreeMap::new() }
    }

    /// The 0-form `f`.
    pub fn function(dim: usize, f: RationalFunction) -> Self {
        let mut out = Self::zero(dim, f.nvars(), 0);
        out.push(MultiIndex::EMPTY, f);
        out
    }

    /// The coordinate 1-form `dx_i`.
    pub fn dx(dim: usize, nvars: usize, i: usize) -> Self {
        assert!(i < dim, "coordinate {i} out of range");
        let mut out = Self::zero(dim, nvars, 1);
        out.push(MultiIndex::single(i), RationalFunction::one(nvars));
        out
    }

    /// `dx_{i1} ^ ... ^ dx_{ik}` for an arbitrary index list.
    pub fn basis(dim: usize, nvars: usize, indices: &[usize]) -> Self {
        let mut out = Self::zero(dim, nvars, indices.len());
        assert!(indices.iter().all(|&i| i < dim));
        if let Some((sign, idx)) = MultiIndex::from_unsorted(indices) {
            out.push(idx, RationalFunction::from_int(nvars, sign as i64));
        }
        out
    }

    /// The volume form `dx_1 ^ ... ^ dx_n`.
    pub fn volume(dim: usize, nvars: usize) -> Self {
        let mut out = Self::zero(dim, nvars, dim);
        out.push(MultiIndex::full(dim), RationalFunction::one(nvars));
        out
    }

    pub fn from_terms<I>(dim: usize, nvars: usize, degree: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, RationalFunction)>,
    {
        let mut out = Self::zero(dim, nvars, degree);
        for (idx, c) in terms {
            assert_eq!(idx.len(), degree, "multi-index length must equal degree");
            assert!(idx.max_index().is_none_or(|m| m < dim));
            out.push(idx, c);
        }
        out
    }

    // Adds `c` to the coefficient at `idx`, dropping zeros.
    fn push(&mut self, idx: MultiIndex, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&idx) {
            Some(old) => {
                let sum = &old + &c;
                if !sum.is_zero() {
                    self.terms.insert(idx, sum);
                }
            }
            None => {
                self.terms.insert(idx, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms; emptiness is `is_zero`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: &MultiIndex) -> RationalFunction {
        self.terms.get(idx).cloned().unwrap_or_else(|| RationalFunction::zero(self.nvars))
    }

    /// The function carried by a 0-form.
    pub fn as_function(&self) -> Option<RationalFunction> {
        (self.degree == 0).then(|| self.coefficient(&MultiIndex::EMPTY))
    }

    /// True when no coefficient has a denominator depending on the
    /// coordinates. Parameter-only denominators are allowed.
    pub fn has_polynomial_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.denom().is_free_of_first(self.dim))
    }

    fn check_same_space(&self, other: &DiffForm) -> Result<(), FormError> {
        if self.dim != other.dim || self.nvars != other.nvars {
            return Err(FormError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &DiffForm) -> Result<DiffForm, FormError> {
        self.check_same_space(other)?;
        if self.degree != other.degree {
            return Err(FormError::DegreeMismatch { left: self.degree, right: other.degree });
        }
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.push(*idx, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &DiffForm) -> Result<DiffForm, FormError> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> DiffForm {
        DiffForm {
            dim: self.dim,
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> DiffForm {
        let mut out = DiffForm::zero(self.dim, self.nvars, self.degree);
        for (idx, v) in &self.terms {
            out.push(*idx, v.scale(c));
        }
        out
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn mul_function(&self, f: &RationalFunction) -> DiffForm {
        let mut out = DiffForm::zero(self.dim, self.nvars, self.degree);
        for (idx, v) in &self.terms {
            out.push(*idx, v * f);
        }
        out
    }

    /// Exterior product. Degrees beyond the dimension give the zero form.
    pub fn wedge(&self, other: &DiffForm) -> Result<DiffForm, FormError> {
        self.check_same_space(other)?;
        let mut out = DiffForm::zero(self.dim, self.nvars, self.degree + other.degree);
        if self.degree + other.degree > self.dim {
            return Ok(out);
        }
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                if let Some((sign, idx)) = ia.wedge(ib) {
                    let prod = ca * cb;
                    out.push(idx, if sign < 0 { -prod } else { prod });
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative. Coefficients are differentiated in the coordinate
    /// variables only; an n-form maps to the zero (n+1)-form.
    pub fn ext_d(&self) -> DiffForm {
        let mut out = DiffForm::zero(self.dim, self.nvars, self.degree + 1);
        for (idx, c) in &self.terms {
            for i in 0..self.dim {
                if idx.contains(i) {
                    continue;
                }
                let dc = c.derivative(i);
                if dc.is_zero() {
                    continue;
                }
                let (sign, k) = idx.insert(i).expect("index absent");
                out.push(k, if sign < 0 { -dc } else { dc });
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.ext_d().is_zero()
    }

    /// Interior product `X ⌟ self`.
    pub fn interior(&self, field: &VectorField) -> Result<DiffForm, FormError> {
        if field.dim() != self.dim || field.nvars() != self.nvars {
            return Err(FormError::DimensionMismatch { left: field.dim(), right: self.dim });
        }
        if self.degree == 0 {
            return Err(FormError::ZeroDegree);
        }
        let mut out = DiffForm::zero(self.dim, self.nvars, self.degree - 1);
        for (idx, c) in &self.terms {
            for (pos, i) in idx.indices().enumerate() {
                let xi = field.component(i);
                if xi.is_zero() {
                    continue;
                }
                let t = xi * c;
                out.push(idx.remove(i), if pos % 2 == 1 { -t } else { t });
            }
        }
        Ok(out)
    }

    /// Lie derivative by Cartan's formula `X⌟d(self) + d(X⌟self)`.
    pub fn lie_derivative(&self, field: &VectorField) -> Result<DiffForm, FormError> {
        let first = self.ext_d().interior(field)?;
        if self.degree == 0 {
            return Ok(first);
        }
        first.try_add(&self.interior(field)?.ext_d())
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients<F>(&self, f: F) -> DiffForm
    where
        F: FnMut(&RationalFunction) -> RationalFunction,
    {
        self.map_into(self.nvars, f)
    }

    /// Applies `f` to every coefficient; `f` must return functions of `nvars`
    /// variables.
    pub fn map_into<F>(&self, nvars: usize, mut f: F) -> DiffForm
    where
        F: FnMut(&RationalFunction) -> RationalFunction,
    {
        let mut out = DiffForm::zero(self.dim, nvars, self.degree);
        for (idx, c) in &self.terms {
            out.push(*idx, f(c));
        }
        out
    }

    /// If `self = c * other` for a constant rational `c`, returns `c`.
    pub fn constant_ratio(&self, other: &DiffForm) -> Option<Rational> {
        if self.dim != other.dim || self.degree != other.degree {
            return None;
        }
        if self.is_zero() && other.is_zero() {
            return Some(Rational::one());
        }
        let (idx, oc) = other.terms.iter().next()?;
        let sc = self.terms.get(idx)?;
        let c = sc.checked_div(oc).ok()?.constant_value()?;
        (*self == other.scale(&c)).then_some(c)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> FormDisplay<'a> {
        FormDisplay { form: self, names }
    }
}

pub struct FormDisplay<'a> {
    form: &'a DiffForm,
    names: &'a [String],
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form.is_zero() {
            return write!(f, "0");
        }
        for (k, (idx, c)) in self.form.terms.iter().enumerate() {
            // pull a leading minus out of single-term numerators
            let negative = c.numer().len() == 1
                && c.numer().leading_coeff().is_some_and(|v| v.is_negative());
            let shown = if negative { -c } else { c.clone() };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let basis: Vec<String> = idx.indices().map(|i| format!("d{}", self.names[i])).collect();
            let basis = basis.join("^");
            let coef = shown.display(self.names);
            if idx.is_empty() {
                write!(f, "{coef}")?;
            } else if shown.is_one() {
                write!(f, "{basis}")?;
            } else if shown.numer().len() == 1 {
                write!(f, "{coef}*{basis}")?;
            } else {
                let s = coef.to_string();
                if shown.denom().is_one() {
                    write!(f, "({s})*{basis}")?;
                } else {
                    write!(f, "{s}*{basis}")?;
                }
            }
        }
        Ok(())
    }
}

/// Vector field on R^dim with rational-function components.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorField {
    nvars: usize,
    components: Vec<RationalFunction>,
}

impl VectorField {
    pub fn new(components: Vec<RationalFunction>) -> Result<Self, FormError> {
        let nvars = components.first().ok_or(FormError::EmptyField)?.nvars();
        if components.len() > MAX_DIM {
            return Err(FormError::TooLarge(components.len()));
        }
        if components.len() > nvars || components.iter().any(|c| c.nvars() != nvars) {
            return Err(FormError::DimensionMismatch { left: components.len(), right: nvars });
        }
        Ok(VectorField { nvars, components })
    }

    pub fn zero(dim: usize, nvars: usize) -> Self {
        VectorField { nvars, components: vec![RationalFunction::zero(nvars); dim] }
    }

    /// The constant coordinate field `∂/∂x_i`.
    pub fn coordinate(dim: usize, nvars: usize, i: usize) -> Self {
        let mut v = Self::zero(dim, nvars);
        v.components[i] = RationalFunction::one(nvars);
        v
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn component(&self, i: usize) -> &RationalFunction {
        &self.components[i]
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.components
    }

    /// Directional derivative `X(f) = Σ X_i ∂f/∂x_i`.
    pub fn apply(&self, f: &RationalFunction) -> RationalFunction {
        let mut acc = RationalFunction::zero(self.nvars);
        for (i, xi) in self.components.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let df = f.derivative(i);
            if !df.is_zero() {
                acc = &acc + &(xi * &df);
            }
        }
        acc
    }

    pub fn divergence(&self) -> RationalFunction {
        self.components
            .iter()
            .enumerate()
            .fold(RationalFunction::zero(self.nvars), |acc, (i, c)| &acc + &c.derivative(i))
    }

    pub fn map_components<F>(&self, f: F) -> VectorField
    where
        F: FnMut(&RationalFunction) -> RationalFunction,
    {
        VectorField { nvars: self.nvars, components: self.components.iter().map(f).collect() }
    }
}
