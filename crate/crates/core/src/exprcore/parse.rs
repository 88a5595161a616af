//! Tokenizer, recursive-descent parser and lowering for the expression
//! grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' integer)?
//! base   := rational | identifier | '(' expr ')' | '-' factor
//! ```

use std::collections::HashMap;

use num_bigint::BigInt;

use super::poly::Rational;
use super::ratfunc::RationalFunction;
use super::ExprError;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

/// Token with its byte offset in the source.
pub(crate) type Spanned = (Tok, usize);

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(text[start..i].parse().expect("digits")), start));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(ExprError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Expression tree before lowering.
#[derive(Clone, Debug, PartialEq)]
pub enum ExprAst {
    Const(Rational),
    Var(usize),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    Neg(Box<ExprAst>),
    Pow(Box<ExprAst>, i64),
}

impl ExprAst {
    /// Lowers the tree to a canonical rational function in `nvars` variables.
    pub fn lower(&self, nvars: usize) -> Result<RationalFunction, ExprError> {
        Ok(match self {
            ExprAst::Const(c) => RationalFunction::constant(nvars, c.clone()),
            ExprAst::Var(i) => RationalFunction::var(nvars, *i),
            ExprAst::Add(a, b) => &a.lower(nvars)? + &b.lower(nvars)?,
            ExprAst::Sub(a, b) => &a.lower(nvars)? - &b.lower(nvars)?,
            ExprAst::Mul(a, b) => &a.lower(nvars)? * &b.lower(nvars)?,
            ExprAst::Div(a, b) => a.lower(nvars)?.checked_div(&b.lower(nvars)?)?,
            ExprAst::Neg(a) => -a.lower(nvars)?,
            ExprAst::Pow(a, e) => a.lower(nvars)?.pow(*e)?,
        })
    }
}

/// Names visible to the parser: polynomial variables (by index) and
/// parameters bound to rational constants.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    vars: Vec<String>,
    consts: HashMap<String, Rational>,
}

impl Scope {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Self {
        Scope { vars: vars.iter().map(|s| s.as_ref().to_string()).collect(), consts: HashMap::new() }
    }

    pub fn with_constant(mut self, name: &str, value: Rational) -> Self {
        self.consts.insert(name.to_string(), value);
        self
    }

    pub fn bind(&mut self, name: &str, value: Rational) {
        self.consts.insert(name.to_string(), value);
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.var_index(name).is_some() || self.consts.contains_key(name)
    }

    pub(crate) fn lookup(&self, name: &str) -> Option<ExprAst> {
        if let Some(i) = self.var_index(name) {
            return Some(ExprAst::Var(i));
        }
        self.consts.get(name).map(|c| ExprAst::Const(c.clone()))
    }
}

pub(crate) struct Parser<'a> {
    pub(crate) toks: Vec<Spanned>,
    pub(crate) pos: usize,
    pub(crate) scope: &'a Scope,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &str, scope: &'a Scope) -> Result<Self, ExprError> {
        Ok(Parser { toks: tokenize(text)?, pos: 0, scope })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    pub(crate) fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> ExprError {
        ExprError::Syntax { pos: self.offset(), msg: msg.into() }
    }

    pub(crate) fn expect_end(&self) -> Result<(), ExprError> {
        match self.peek() {
            Tok::End => Ok(()),
            t => Err(self.error(format!("unexpected {}", t.describe()))),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = ExprAst::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = ExprAst::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    pub(crate) fn term(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = ExprAst::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = ExprAst::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    pub(crate) fn factor(&mut self) -> Result<ExprAst, ExprError> {
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let e = self.exponent()?;
            return Ok(ExprAst::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, ExprError> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Tok::Int(n) => {
                let e: i64 = n
                    .try_into()
                    .map_err(|_| self.error("exponent out of range"))?;
                Ok(if negative { -e } else { e })
            }
            t => Err(ExprError::Syntax {
                pos: self.toks[self.pos.saturating_sub(1)].1,
                msg: format!("expected integer exponent, found {}", t.describe()),
            }),
        }
    }

    fn base(&mut self) -> Result<ExprAst, ExprError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => Ok(ExprAst::Const(Rational::from_integer(n))),
            Tok::Ident(name) => self
                .scope
                .lookup(&name)
                .ok_or(ExprError::UnknownIdentifier { pos: at, name }),
            Tok::LParen => {
                let e = self.expr()?;
                match self.bump() {
                    Tok::RParen => Ok(e),
                    t => Err(ExprError::Syntax {
                        pos: self.toks[self.pos.saturating_sub(1)].1,
                        msg: format!("expected `)`, found {}", t.describe()),
                    }),
                }
            }
            Tok::Minus => Ok(ExprAst::Neg(Box::new(self.factor()?))),
            t => Err(ExprError::Syntax { pos: at, msg: format!("unexpected {}", t.describe()) }),
        }
    }
}

/// Parses `text` into an expression tree.
pub fn parse_ast(text: &str, scope: &Scope) -> Result<ExprAst, ExprError> {
    let mut p = Parser::new(text, scope)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses and lowers `text` to its canonical rational function.
pub fn parse_expr(text: &str, scope: &Scope) -> Result<RationalFunction, ExprError> {
    parse_ast(text, scope)?.lower(scope.nvars())
}

/// Parses a rational literal such as `3`, `-1/2` or `3/4`.
pub fn parse_rational(text: &str) -> Result<Rational, ExprError> {
    let scope = Scope::default();
    let f = parse_expr(text, &scope)?;
    f.constant_value().ok_or_else(|| ExprError::Syntax { pos: 0, msg: "expected a rational".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn xyz() -> Scope {
        Scope::new(&["x", "y", "z"])
    }

    #[test]
    fn reads_cubic_numerator() {
        let s = xyz();
        let f = parse_expr("x^2*z - y^3", &s).unwrap();
        assert_eq!(f.display(s.vars()).to_string(), "x^2*z - y^3");
    }

    #[test]
    fn cancels_common_factor() {
        let s = xyz();
        let f = parse_expr("(x^2 - y^2)/(x - y)", &s).unwrap();
        assert_eq!(f, parse_expr("x + y", &s).unwrap());
    }

    #[test]
    fn zero_denominator_rejected() {
        let s = xyz();
        assert_eq!(parse_expr("1/0", &s), Err(ExprError::ZeroDenominator));
        assert_eq!(parse_expr("x/(y - y)", &s), Err(ExprError::ZeroDenominator));
        assert_eq!(parse_expr("(x - x)^-1", &s), Err(ExprError::ZeroDenominator));
    }

    #[test]
    fn negative_exponent_lowers_to_denominator() {
        let s = xyz();
        assert_eq!(parse_expr("y^2*z^-2", &s).unwrap(), parse_expr("y^2/z^2", &s).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let s = xyz();
        match parse_expr("x + w", &s) {
            Err(ExprError::UnknownIdentifier { pos, name }) => {
                assert_eq!(pos, 4);
                assert_eq!(name, "w");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expr("x + * y", &s), Err(ExprError::Syntax { pos: 4, .. })));
        assert!(matches!(parse_expr("(x + y", &s), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("x ^ y", &s), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("x $ y", &s), Err(ExprError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn constants_are_substituted() {
        let s = xyz().with_constant("k", Rational::new(3.into(), 4.into()));
        let f = parse_expr("k*x", &s).unwrap();
        assert_eq!(f.display(s.vars()).to_string(), "3/4*x");
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-1/2").unwrap(), Rational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("3").unwrap(), Rational::from_integer(3.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(Rational::from_integer(0.into()).is_zero());
    }
}
