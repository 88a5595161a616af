//! Form literals: `formterm := expr '*' diff ('^' diff)*`, joined by `+`/`-`.
//!
//! A `diff` token is an identifier `d<name>` where `<name>` is one of the
//! first `dim` declared variables and `d<name>` itself is not declared.
//! A literal without any differentials is a 0-form.

use super::form::DiffForm;
use super::index::MultiIndex;
use super::FormError;
use crate::exprcore::{ExprAst, ExprError, Parser, RationalFunction, Scope, Tok};

struct FormParser<'a> {
    inner: Parser<'a>,
    dim: usize,
}

impl FormParser<'_> {
    fn diff_index(&self, tok: &Tok) -> Option<usize> {
        match tok {
            Tok::Ident(name) if !self.inner.scope.is_declared(name) => {
                let rest = name.strip_prefix('d')?;
                self.inner.scope.var_index(rest).filter(|&i| i < self.dim)
            }
            _ => None,
        }
    }

    fn expect_diff(&mut self) -> Result<usize, ExprError> {
        let tok = self.inner.peek().clone();
        match self.diff_index(&tok) {
            Some(i) => {
                self.inner.bump();
                Ok(i)
            }
            None => Err(self.inner.error(format!("expected a differential, found {}", tok.describe()))),
        }
    }

    /// One term: coefficient expression and the list of differentials.
    fn term(&mut self) -> Result<(ExprAst, Vec<usize>, usize), ExprError> {
        let start = self.inner.offset();
        let mut negate = false;
        while *self.inner.peek() == Tok::Minus && self.diff_index(self.inner.peek_at(1)).is_some() {
            self.inner.bump();
            negate = !negate;
        }
        let mut coef: Option<ExprAst> = None;
        if self.diff_index(self.inner.peek()).is_none() {
            let mut c = self.inner.factor()?;
            loop {
                match self.inner.peek() {
                    Tok::Star if self.diff_index(self.inner.peek_at(1)).is_some() => {
                        self.inner.bump();
                        break;
                    }
                    Tok::Star => {
                        self.inner.bump();
                        c = ExprAst::Mul(Box::new(c), Box::new(self.inner.factor()?));
                    }
                    Tok::Slash => {
                        self.inner.bump();
                        c = ExprAst::Div(Box::new(c), Box::new(self.inner.factor()?));
                    }
                    _ => break,
                }
            }
            coef = Some(c);
        }
        let mut diffs = Vec::new();
        if self.diff_index(self.inner.peek()).is_some() {
            diffs.push(self.expect_diff()?);
            while *self.inner.peek() == Tok::Caret {
                self.inner.bump();
                diffs.push(self.expect_diff()?);
            }
        }
        let one = ExprAst::Const(crate::exprcore::Rational::from_integer(1.into()));
        let mut coef = coef.unwrap_or(one);
        if negate {
            coef = ExprAst::Neg(Box::new(coef));
        }
        Ok((coef, diffs, start))
    }
}

/// Parses a form literal on R^dim. The scope's first `dim` variables are the
/// coordinates.
pub fn parse_form(text: &str, scope: &Scope, dim: usize) -> Result<DiffForm, FormError> {
    assert!(dim <= scope.nvars());
    let nvars = scope.nvars();
    let mut p = FormParser { inner: Parser::new(text, scope)?, dim };
    let mut acc: Option<DiffForm> = None;
    let mut sign_negative = false;
    loop {
        let (coef, diffs, start) = p.term()?;
        let mut c: RationalFunction = coef.lower(nvars)?;
        if sign_negative {
            c = -c;
        }
        let term = match MultiIndex::from_unsorted(&diffs) {
            Some((s, idx)) => {
                let c = if s < 0 { -c } else { c };
                DiffForm::from_terms(dim, nvars, diffs.len(), [(idx, c)])
            }
            None => DiffForm::zero(dim, nvars, diffs.len()),
        };
        acc = Some(match acc {
            None => term,
            Some(a) => a.try_add(&term).map_err(|_| {
                FormError::Expr(ExprError::Syntax {
                    pos: start,
                    msg: format!("term of degree {} in a form of degree {}", diffs.len(), a.degree()),
                })
            })?,
        });
        match p.inner.peek() {
            Tok::Plus => {
                p.inner.bump();
                sign_negative = false;
            }
            Tok::Minus => {
                p.inner.bump();
                sign_negative = true;
            }
            _ => break,
        }
    }
    p.inner.expect_end()?;
    Ok(acc.expect("at least one term"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprcore::parse_expr;

    fn xyz() -> Scope {
        Scope::new(&["x", "y", "z"])
    }

    #[test]
    fn reads_wedges_and_powers() {
        let sc = xyz();
        let w = parse_form("z^2 * dy ^ dz - x^2 * dx ^ dz", &sc, 3).unwrap();
        assert_eq!(w.degree(), 2);
        assert_eq!(w.len(), 2);
        let idx = MultiIndex::from_unsorted(&[1, 2]).unwrap().1;
        assert_eq!(w.coefficient(&idx), parse_expr("z^2", &sc).unwrap());
    }

    #[test]
    fn bare_and_negated_differentials() {
        let sc = xyz();
        let w = parse_form("-dy^dx", &sc, 3).unwrap();
        assert_eq!(w, DiffForm::basis(3, 3, &[0, 1]));
        assert!(parse_form("dx^dx", &sc, 3).unwrap().is_zero());
    }

    #[test]
    fn zero_forms_are_expressions() {
        let sc = xyz();
        let f = parse_form("x*y - 1", &sc, 3).unwrap();
        assert_eq!(f.degree(), 0);
        assert_eq!(f.as_function().unwrap(), parse_expr("x*y - 1", &sc).unwrap());
    }

    #[test]
    fn display_parses_back() {
        let sc = xyz();
        let text = "(x + y)/(x - z)*dx^dy - 3/4*y^2/z^2*dx^dz + dy^dz";
        let w = parse_form(text, &sc, 3).unwrap();
        let shown = w.display(sc.vars()).to_string();
        assert_eq!(parse_form(&shown, &sc, 3).unwrap(), w);
    }

    #[test]
    fn rejects_mixed_degrees_and_junk() {
        let sc = xyz();
        assert!(parse_form("x*dx + dy^dz", &sc, 3).is_err());
        assert!(parse_form("x*dx ^ y", &sc, 3).is_err());
        assert!(parse_form("x*dw", &sc, 3).is_err());
    }

    #[test]
    fn parameters_do_not_get_differentials() {
        // variables beyond dim are parameters: `dk` is not a differential
        let sc = Scope::new(&["x", "k"]);
        assert!(parse_form("k*dk", &sc, 1).is_err());
        assert!(parse_form("k*dx", &sc, 1).is_ok());
    }
}
