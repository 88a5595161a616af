use std::fmt;

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::{PolyDisplay, Polynomial, Rational};
use super::ExprError;

/// Quotient of polynomials in canonical form.
///
/// Canonical means: numerator and denominator share no non-constant factor,
/// and the denominator is monic under grlex. Zero is `0/1`. Two rational
/// functions are equal as functions iff their canonical forms are identical,
/// so the derived `PartialEq` is semantic equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn zero(nvars: usize) -> Self {
        RationalFunction { num: Polynomial::zero(nvars), den: Polynomial::one(nvars) }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        RationalFunction { num: Polynomial::constant(nvars, c), den: Polynomial::one(nvars) }
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::from(Polynomial::from_int(nvars, c))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from(Polynomial::var(nvars, i))
    }

    /// Canonicalises `num / den`.
    pub fn normalize(num: Polynomial, den: Polynomial) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        Ok(Self::normalize_nonzero(num, den))
    }

    fn normalize_nonzero(num: Polynomial, den: Polynomial) -> Self {
        debug_assert_eq!(num.nvars(), den.nvars());
        let nvars = num.nvars();
        if num.is_zero() {
            return Self::zero(nvars);
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides numerator"),
                    den.div_exact(&g).expect("gcd divides denominator"),
                )
            }
        };
        let lc = den.leading_coeff().expect("nonzero denominator").clone();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = lc.recip();
            RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The value when this is a constant, `None` otherwise.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_constant() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::normalize_nonzero(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ExprError> {
        let inv = rhs.recip().ok_or(ExprError::ZeroDenominator)?;
        Ok(self * &inv)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: i64) -> Result<Self, ExprError> {
        if e >= 0 {
            return Ok(RationalFunction {
                num: self.num.pow(e as u32),
                den: self.den.pow(e as u32),
            }
            .canonical_after_pow());
        }
        let inv = self.recip().ok_or(ExprError::ZeroDenominator)?;
        inv.pow(-e)
    }

    // Powers of a reduced fraction stay reduced; only the monic scaling may
    // need refreshing.
    fn canonical_after_pow(self) -> Self {
        if self.num.is_zero() {
            return Self::zero(self.nvars());
        }
        let lc = self.den.leading_coeff().unwrap().clone();
        if lc.is_one() {
            self
        } else {
            let inv = lc.recip();
            RationalFunction { num: self.num.scale(&inv), den: self.den.scale(&inv) }
        }
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let dn = self.num.derivative(var);
        if self.den.is_constant() {
            return RationalFunction { num: dn, den: self.den.clone() };
        }
        let dd = self.den.derivative(var);
        if dd.is_zero() {
            return Self::normalize_nonzero(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::normalize_nonzero(num, &self.den * &self.den)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, ExprError> {
        if point.len() != self.nvars() {
            return Err(ExprError::PointDimension { expected: self.nvars(), got: point.len() });
        }
        let d = self.den.evaluate(point);
        if d.is_zero() {
            return Err(ExprError::Pole);
        }
        Ok(self.num.evaluate(point) / d)
    }

    /// Substitutes constants for the variables listed in `values`.
    pub fn substitute(&self, values: &[(usize, Rational)]) -> Result<Self, ExprError> {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for (var, value) in values {
            let c = Polynomial::constant(self.nvars(), value.clone());
            num = num.substitute(*var, &c);
            den = den.substitute(*var, &c);
        }
        Self::normalize(num, den)
    }

    /// Moves into a context with `nvars` variables; see [`Polynomial::remap`].
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        Self::normalize_nonzero(self.num.remap(nvars, map), self.den.remap(nvars, map))
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> RatDisplay<'a> {
        RatDisplay { f: self, names }
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        let nvars = p.nvars();
        RationalFunction { num: p, den: Polynomial::one(nvars) }
    }
}

impl<'a> std::ops::Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return RationalFunction { num, den: self.den.clone() };
            }
            return RationalFunction::normalize_nonzero(num, self.den.clone());
        }
        if self.den.is_constant() && rhs.den.is_constant() {
            // both are monic constants, i.e. 1
            return RationalFunction { num: &self.num + &rhs.num, den: self.den.clone() };
        }
        let g = gcd(&self.den, &rhs.den);
        let (sd, rd) = if g.is_one() {
            (self.den.clone(), rhs.den.clone())
        } else {
            (self.den.div_exact(&g).unwrap(), rhs.den.div_exact(&g).unwrap())
        };
        let num = &(&self.num * &rd) + &(&rhs.num * &sd);
        RationalFunction::normalize_nonzero(num, &self.den * &rd)
    }
}

impl<'a> std::ops::Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> std::ops::Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero(self.nvars());
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction { num: &self.num * &rhs.num, den: self.den.clone() };
        }
        // cross-cancel so that the product of reduced fractions stays reduced
        let cancel = |n: &Polynomial, d: &Polynomial| -> (Polynomial, Polynomial) {
            if d.is_constant() {
                return (n.clone(), d.clone());
            }
            let g = gcd(n, d);
            if g.is_one() {
                (n.clone(), d.clone())
            } else {
                (n.div_exact(&g).unwrap(), d.div_exact(&g).unwrap())
            }
        };
        let (n1, d2) = cancel(&self.num, &rhs.den);
        let (n2, d1) = cancel(&rhs.num, &self.den);
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lc = den.leading_coeff().unwrap().clone();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = lc.recip();
            RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }
}

impl std::ops::Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl std::ops::Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl std::ops::$tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $f(self, rhs: RationalFunction) -> RationalFunction {
                std::ops::$tr::$f(&self, &rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

pub struct RatDisplay<'a> {
    f: &'a RationalFunction,
    names: &'a [String],
}

impl RatDisplay<'_> {
    /// True when the printed form is a single signed product, so it can be
    /// followed by `*` without parentheses.
    pub fn is_atomic(&self) -> bool {
        self.f.num.len() <= 1 && self.f.den.is_one()
    }
}

impl fmt::Display for RatDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = PolyDisplay { poly: &self.f.num, names: self.names };
        if self.f.den.is_one() {
            return write!(f, "{num}");
        }
        let den = PolyDisplay { poly: &self.f.den, names: self.names };
        if self.f.num.len() == 1 {
            write!(f, "{num}")?;
        } else {
            write!(f, "({num})")?;
        }
        let bare = self.f.den.len() == 1
            && self.f.den.leading_coeff().is_some_and(|c| c.is_one())
            && self
                .f
                .den
                .leading_term()
                .is_some_and(|(m, _)| m.exponents().iter().filter(|&&e| e > 0).count() == 1);
        if bare {
            write!(f, "/{den}")
        } else {
            write!(f, "/({den})")
        }
    }
}
