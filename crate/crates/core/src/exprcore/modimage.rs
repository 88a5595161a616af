//! Univariate images modulo a prime, used to bound GCD degrees.
//!
//! Evaluating every variable but `v` at a point where the leading
//! coefficients in `v` survive maps the true GCD onto a divisor of the image
//! GCD, so the image degree bounds `deg_v gcd(a, b)` from above.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::poly::Polynomial;

const P: u64 = (1 << 61) - 1;

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn pow(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

fn reduce(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(P)).to_u64().expect("reduced below P")
}

/// Deterministic evaluation points.
fn next_point() -> u64 {
    static STATE: AtomicU64 = AtomicU64::new(0x9E37_79B9_7F4A_7C15);
    let s = STATE.fetch_add(0x9E37_79B9_7F4A_7C15, Ordering::Relaxed);
    let mut z = s;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (z ^ (z >> 31)) % (P - 2) + 2
}

/// Dense image in `v`, or `None` when a coefficient denominator vanishes mod P.
fn image(p: &Polynomial, v: usize, point: &[u64]) -> Option<Vec<u64>> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let den = reduce(c.denom());
        if den == 0 {
            return None;
        }
        let mut t = mul(reduce(c.numer()), inv(den));
        for (w, &e) in m.exponents().iter().enumerate() {
            if w != v && e > 0 {
                t = mul(t, pow(point[w], e as u64));
            }
        }
        let slot = &mut out[m.exponents()[v] as usize];
        *slot = (*slot + t) % P;
    }
    Some(out)
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn rem(mut a: Vec<u64>, b: &[u64]) -> Vec<u64> {
    let lead_inv = inv(*b.last().expect("nonzero divisor"));
    while a.len() >= b.len() {
        let q = mul(*a.last().unwrap(), lead_inv);
        let shift = a.len() - b.len();
        for (i, &bi) in b.iter().enumerate() {
            a[shift + i] = (a[shift + i] + P - mul(q, bi)) % P;
        }
        trim(&mut a);
    }
    a
}

fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(a, &b);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

/// Upper bounds on `deg_v gcd(a, b)` for every variable `v`, or `None` if no
/// usable evaluation point was found.
pub(crate) fn gcd_degree_bounds(a: &Polynomial, b: &Polynomial) -> Option<Vec<u32>> {
    let n = a.nvars();
    let mut bounds = vec![0u32; n];
    for (v, bound) in bounds.iter_mut().enumerate() {
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        if da == 0 || db == 0 {
            continue;
        }
        let mut found = None;
        for _ in 0..3 {
            let point: Vec<u64> = (0..n).map(|_| next_point()).collect();
            let (ia, ib) = (image(a, v, &point)?, image(b, v, &point)?);
            if ia[da as usize] != 0 && ib[db as usize] != 0 {
                found = Some(gcd_degree(ia, ib) as u32);
                break;
            }
        }
        *bound = found?;
    }
    Some(bounds)
}
