#![allow(dead_code)]

use nambu_core::exprcore::{Monomial, Polynomial, Rational, RationalFunction};
use nambu_core::extcalc::{DiffForm, MultiIndex};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const DEFAULT_SEED: u64 = 0x4E41_4D42_5553_4545;

/// `NAMBU_SEED` if set, otherwise a fixed default.
pub fn seed() -> u64 {
    std::env::var("NAMBU_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn rng(salt: u64) -> StdRng {
    StdRng::seed_from_u64(seed() ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn runner(cases: u32, salt: u64) -> TestRunner {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed().to_le_bytes());
    bytes[8..16].copy_from_slice(&salt.to_le_bytes());
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let n: i64 = rng.gen_range(-4..=4);
    let d: i64 = rng.gen_range(1..=3);
    Rational::new(n.into(), d.into())
}

/// Random polynomial in the first `dim` of `nvars` variables.
pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, dim: usize, max_deg: u32, max_terms: usize) -> Polynomial {
    let nterms = rng.gen_range(1..=max_terms);
    let terms: Vec<(Monomial, Rational)> = (0..nterms)
        .map(|_| {
            let mut e = vec![0u32; nvars];
            for _ in 0..rng.gen_range(0..=max_deg) {
                e[rng.gen_range(0..dim)] += 1;
            }
            (Monomial::from_exponents(e), small_rational(rng))
        })
        .collect();
    Polynomial::from_terms(nvars, terms)
}

pub fn random_function<R: Rng>(rng: &mut R, dim: usize, max_deg: u32) -> RationalFunction {
    RationalFunction::from(random_poly(rng, dim, dim, max_deg, 4))
}

/// Random polynomial `degree`-form on R^dim.
pub fn random_form<R: Rng>(rng: &mut R, dim: usize, degree: usize, max_deg: u32) -> DiffForm {
    let nterms = rng.gen_range(1..=3);
    let terms: Vec<(MultiIndex, RationalFunction)> = (0..nterms)
        .map(|_| {
            let mut idx: Vec<usize> = (0..dim).collect();
            for i in (1..idx.len()).rev() {
                idx.swap(i, rng.gen_range(0..=i));
            }
            idx.truncate(degree);
            let (_, m) = MultiIndex::from_unsorted(&idx).expect("distinct indices");
            (m, random_function(rng, dim, max_deg))
        })
        .collect();
    DiffForm::from_terms(dim, dim, degree, terms)
}
