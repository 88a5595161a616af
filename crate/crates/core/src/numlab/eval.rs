use num_traits::ToPrimitive;

use crate::exprcore::{Polynomial, RationalFunction};
use crate::extcalc::{DiffForm, VectorField};

use super::NumError;

#[derive(Debug, Clone)]
struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    fn new(p: &Polynomial) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let powers = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e as i32))
                    .collect();
                (c.to_f64().unwrap_or(f64::NAN), powers)
            })
            .collect();
        CompiledPoly { terms }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, powers)| powers.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e)))
            .sum()
    }
}

/// A rational function compiled to double precision.
#[derive(Debug, Clone)]
pub struct CompiledFunction {
    nvars: usize,
    num: CompiledPoly,
    den: Option<CompiledPoly>,
}

impl CompiledFunction {
    pub fn new(f: &RationalFunction) -> Self {
        let den = if f.denom().is_one() { None } else { Some(CompiledPoly::new(f.denom())) };
        CompiledFunction { nvars: f.nvars(), num: CompiledPoly::new(f.numer()), den }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Fails with a pole error where the denominator vanishes.
    pub fn eval(&self, x: &[f64]) -> Result<f64, NumError> {
        debug_assert_eq!(x.len(), self.nvars);
        let n = self.num.eval(x);
        let v = match &self.den {
            None => n,
            Some(d) => {
                let d = d.eval(x);
                if d == 0.0 {
                    return Err(NumError::Pole { point: x.to_vec() });
                }
                n / d
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumError::NonFinite { point: x.to_vec() })
        }
    }
}

fn check_bound(dim: usize, nvars: usize) -> Result<(), NumError> {
    if nvars != dim {
        return Err(NumError::UnboundParameters { dim, nvars });
    }
    Ok(())
}

/// A vector field compiled to double precision.
#[derive(Debug, Clone)]
pub struct CompiledField {
    components: Vec<CompiledFunction>,
}

impl CompiledField {
    /// Requires every parameter to be substituted (`nvars == dim`).
    pub fn new(field: &VectorField) -> Result<Self, NumError> {
        check_bound(field.dim(), field.nvars())?;
        Ok(CompiledField { components: field.components().iter().map(CompiledFunction::new).collect() })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), NumError> {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval(x)?;
        }
        Ok(())
    }
}

/// A 1-form `Σ J_i dx_i` compiled to double precision.
#[derive(Debug, Clone)]
pub struct CompiledOneForm {
    coefficients: Vec<CompiledFunction>,
}

impl CompiledOneForm {
    pub fn new(j: &DiffForm) -> Result<Self, NumError> {
        if j.degree() != 1 {
            return Err(NumError::NotOneForm(j.degree()));
        }
        check_bound(j.dim(), j.nvars())?;
        let coefficients = (0..j.dim())
            .map(|i| {
                let idx = crate::extcalc::MultiIndex::single(i);
                CompiledFunction::new(&j.coefficient(&idx))
            })
            .collect();
        Ok(CompiledOneForm { coefficients })
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    /// `J(x)(v)`.
    pub fn pair(&self, x: &[f64], v: &[f64]) -> Result<f64, NumError> {
        let mut s = 0.0;
        for (c, vi) in self.coefficients.iter().zip(v) {
            if *vi != 0.0 {
                s += c.eval(x)? * vi;
            }
        }
        Ok(s)
    }
}

/// Compiles a scalar function of the state, rejecting unbound parameters.
pub fn compile_function(f: &RationalFunction, dim: usize) -> Result<CompiledFunction, NumError> {
    check_bound(dim, f.nvars())?;
    Ok(CompiledFunction::new(f))
}
