//! Multivariate polynomial GCD over Q.
//!
//! Recursive primitive PRS: the main variable is the highest-index variable
//! present, contents are taken in the remaining variables, and primitive parts
//! are reduced by pseudo-remainders. Results are monic under grlex. Degree
//! bounds from modular images short-cut the common easy cases first.

use num_traits::Zero;

use super::modimage::gcd_degree_bounds;
use super::poly::{Monomial, Polynomial, Rational};

pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    gcd_rec(a, b).monic()
}

fn gcd_rec(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.nvars());
    }
    if a.len() == 1 {
        return monomial_gcd(a, b);
    }
    if b.len() == 1 {
        return monomial_gcd(b, a);
    }
    if a == b {
        return a.monic();
    }

    if let Some(g) = bounded_gcd(a, b) {
        return g;
    }

    let v = a.max_var().max(b.max_var()).expect("non-constant polynomials have a variable");
    let (da, db) = (a.degree_in(v), b.degree_in(v));
    if da == 0 {
        return gcd_rec(a, &content_in(b, v));
    }
    if db == 0 {
        return gcd_rec(&content_in(a, v), b);
    }

    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd_rec(&ca, &cb);
    let g = primitive_prs(pa, pb, v);
    (&c * &g).monic()
}

/// Shortcuts driven by modular degree bounds: coprime inputs, one input
/// dividing the other, and GCDs free of some variable.
fn bounded_gcd(a: &Polynomial, b: &Polynomial) -> Option<Polynomial> {
    let bounds = gcd_degree_bounds(a, b)?;
    let n = a.nvars();
    if bounds.iter().all(|&d| d == 0) {
        return Some(Polynomial::one(n));
    }
    for (small, big) in [(a, b), (b, a)] {
        if (0..n).all(|v| bounds[v] == small.degree_in(v)) && big.div_exact(small).is_some() {
            return Some(small.monic());
        }
    }
    let v = (0..n).find(|&v| bounds[v] == 0 && a.degree_in(v) > 0 && b.degree_in(v) > 0)?;
    let mut coeffs: Vec<Polynomial> =
        a.coefficients_in(v).into_iter().chain(b.coefficients_in(v)).filter(|c| !c.is_zero()).collect();
    coeffs.sort_by_key(|c| c.len());
    let mut g = Polynomial::zero(n);
    for c in &coeffs {
        g = gcd_rec(&g, c);
        if g.is_constant() {
            return Some(Polynomial::one(n));
        }
    }
    Some(g.monic())
}

/// GCD of a single-term polynomial with an arbitrary one.
fn monomial_gcd(mono: &Polynomial, other: &Polynomial) -> Polynomial {
    let (m, _) = mono.leading_term().unwrap();
    let mut g = m.clone();
    for (t, _) in other.terms() {
        g = g.gcd(t);
        if g.is_one() {
            break;
        }
    }
    Polynomial::monomial(g, Rational::from_integer(1.into()))
}

/// GCD of the coefficients of `p` viewed as a polynomial in `var`.
pub(crate) fn content_in(p: &Polynomial, var: usize) -> Polynomial {
    let mut coeffs: Vec<Polynomial> =
        p.coefficients_in(var).into_iter().filter(|c| !c.is_zero()).collect();
    coeffs.sort_by_key(|c| c.len());
    let mut g = Polynomial::zero(p.nvars());
    for c in &coeffs {
        g = gcd_rec(&g, c);
        if g.is_constant() {
            return Polynomial::one(p.nvars());
        }
    }
    g.monic()
}

fn primitive_part(p: &Polynomial, var: usize) -> Polynomial {
    let c = content_in(p, var);
    let pp = p.div_exact(&c).expect("content divides");
    let rc = pp.rational_content();
    pp.scale(&rc.recip())
}

/// Sparse pseudo-remainder of `a` by `b` with respect to `var`.
pub(crate) fn pseudo_remainder(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let db = b.degree_in(var);
    let lcb = b.leading_coeff_in(var);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(var) >= db {
        let dr = r.degree_in(var);
        let lcr = r.leading_coeff_in(var);
        let mut shift = Monomial::one(r.nvars()).exponents().to_vec();
        shift[var] = dr - db;
        let shifted = &lcr * &b.mul_term(&Monomial::from_exponents(shift), &Rational::from_integer(1.into()));
        r = &(&r * &lcb) - &shifted;
    }
    r
}

fn primitive_prs(a: Polynomial, b: Polynomial, var: usize) -> Polynomial {
    let (mut a, mut b) = if a.degree_in(var) >= b.degree_in(var) { (a, b) } else { (b, a) };
    loop {
        let r = pseudo_remainder(&a, &b, var);
        if r.is_zero() {
            return primitive_part(&b, var).monic();
        }
        if r.degree_in(var).is_zero() {
            return Polynomial::one(a.nvars());
        }
        a = b;
        b = primitive_part(&r, var);
    }
}
