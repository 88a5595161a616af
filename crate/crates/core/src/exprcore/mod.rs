//! Exact arithmetic kernel: rationals, sparse multivariate polynomials,
//! canonical rational functions and the expression parser.

mod gcd;
mod modimage;
mod parse;
mod poly;
mod ratfunc;

use thiserror::Error;

pub use gcd::gcd;
pub use parse::{parse_ast, parse_expr, parse_rational, ExprAst, Scope};
pub(crate) use parse::{Parser, Tok};
pub use poly::{Monomial, PolyDisplay, Polynomial, Rational};
pub use ratfunc::{RatDisplay, RationalFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at offset {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("pole at evaluation point")]
    Pole,
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { expected: usize, got: usize },
}

/// Canonical form of `num / den`.
pub fn normalize(num: Polynomial, den: Polynomial) -> Result<RationalFunction, ExprError> {
    RationalFunction::normalize(num, den)
}

/// Partial derivative with respect to variable `var` (0-based).
pub fn differentiate(f: &RationalFunction, var: usize) -> RationalFunction {
    f.derivative(var)
}

pub fn evaluate(f: &RationalFunction, point: &[Rational]) -> Result<Rational, ExprError> {
    f.evaluate(point)
}

/// Builds a rational from a numerator/denominator pair of machine integers.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(names: &[&str]) -> Scope {
        Scope::new(names)
    }

    #[test]
    fn differentiate_examples() {
        let sc = s(&["x", "y", "z"]);
        let f = parse_expr("x^2*z - y^3", &sc).unwrap();
        assert_eq!(differentiate(&f, 0), parse_expr("2*x*z", &sc).unwrap());
        let g = parse_expr("y^2/z^2", &sc).unwrap();
        assert_eq!(differentiate(&g, 2), parse_expr("-2*y^2/z^3", &sc).unwrap());

        let sc6 = s(&["x1", "x2", "x3", "y1", "y2", "y3"]);
        let i2 = parse_expr("x1*y1 + x2*y2 + x3*y3", &sc6).unwrap();
        assert_eq!(differentiate(&i2, 3), parse_expr("x1", &sc6).unwrap());
    }

    #[test]
    fn evaluate_examples() {
        let sc = s(&["x", "y", "z"]);
        let f = parse_expr("(x + y)/z", &sc).unwrap();
        assert_eq!(evaluate(&f, &[ratio(1, 1), ratio(2, 1), ratio(4, 1)]).unwrap(), ratio(3, 4));
        let g = parse_expr("x^2*z - y^3", &sc).unwrap();
        assert_eq!(evaluate(&g, &[ratio(0, 1), ratio(0, 1), ratio(0, 1)]).unwrap(), ratio(0, 1));
        let h = parse_expr("y^2/z^2", &sc).unwrap();
        assert_eq!(evaluate(&h, &[ratio(1, 1), ratio(1, 1), ratio(0, 1)]), Err(ExprError::Pole));
        assert!(matches!(evaluate(&h, &[ratio(1, 1)]), Err(ExprError::PointDimension { .. })));
    }

    #[test]
    fn normalize_examples() {
        let sc = s(&["x", "y"]);
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let f = normalize(x.scale(&ratio(2, 1)), Polynomial::from_int(2, 4)).unwrap();
        assert_eq!(f, parse_expr("x/2", &sc).unwrap());
        assert_eq!(f.display(sc.vars()).to_string(), "1/2*x");
        let g = normalize(&(&x * &x) - &(&y * &y), &x - &y).unwrap();
        assert_eq!(g, parse_expr("x + y", &sc).unwrap());
        let z = normalize(Polynomial::zero(2), x.clone()).unwrap();
        assert!(z.is_zero());
        assert!(z.denom().is_one());
        assert_eq!(normalize(x, Polynomial::zero(2)), Err(ExprError::ZeroDenominator));
    }

    #[test]
    fn denominator_is_monic() {
        let sc = s(&["x", "y"]);
        let f = parse_expr("1/(-2*x + y)", &sc).unwrap();
        assert_eq!(f.denom().leading_coeff().unwrap(), &ratio(1, 1));
        assert_eq!(f.display(sc.vars()).to_string(), "-1/2/(x - 1/2*y)");
        assert_eq!(parse_expr(&f.display(sc.vars()).to_string(), &sc).unwrap(), f);
    }
}
