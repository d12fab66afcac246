//! Test-side oracles, written without the library's multiplication code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use kronmul::{Coefficient, Integer, LaurentPolynomial, PolyTerm};
use rand::Rng;

pub type Dict = BTreeMap<Vec<i64>, Integer>;

pub fn to_dict(p: &LaurentPolynomial<Integer>) -> Dict {
    p.terms()
        .iter()
        .map(|t| (t.exponents.to_vec(), t.coeff.clone()))
        .collect()
}

/// Schoolbook product over exponent vectors.
pub fn dict_product(a: &Dict, b: &Dict) -> Dict {
    let mut out = Dict::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_default() += ca * cb;
        }
    }
    out.retain(|_, c| *c != Integer::from(0));
    out
}

pub fn dict_truncate(d: &Dict, limit: i64) -> Dict {
    d.iter()
        .filter(|(e, _)| e.iter().sum::<i64>() <= limit)
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect()
}

/// Random polynomial with exponents in `[-max_exp, max_exp]`.
pub fn random_poly<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    max_terms: usize,
    max_exp: i64,
) -> LaurentPolynomial<Integer> {
    let n = rng.gen_range(1..=max_terms);
    let terms = (0..n)
        .map(|_| {
            let e: Vec<i64> = (0..num_vars)
                .map(|_| rng.gen_range(-max_exp..=max_exp))
                .collect();
            PolyTerm::new(Integer::from(rng.gen_range(-10i64..=10)), e)
        })
        .collect();
    LaurentPolynomial::new(num_vars, terms).unwrap()
}

pub fn from_dict<C: Coefficient>(num_vars: usize, d: &Dict) -> LaurentPolynomial<C> {
    let terms = d
        .iter()
        .map(|(e, c)| PolyTerm::new(C::from_i64(i64::try_from(c.clone()).unwrap()), e.clone()))
        .collect();
    LaurentPolynomial::new(num_vars, terms).unwrap()
}

/// `(Σ c_i x^{e_i})^n` expanded over all ordered choices of `n` factor
/// terms, i.e. without any squaring or Kronecker encoding.
pub fn brute_power(num_vars: usize, base: &[(i64, Vec<i64>)], n: u32) -> Dict {
    let mut acc = Dict::new();
    acc.insert(vec![0; num_vars], Integer::from(1));
    for _ in 0..n {
        let mut next = Dict::new();
        for (e, c) in &acc {
            for (bc, be) in base {
                let key: Vec<i64> = e.iter().zip(be).map(|(x, y)| x + y).collect();
                *next.entry(key).or_default() += c * Integer::from(*bc);
            }
        }
        acc = next;
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
