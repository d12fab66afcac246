//! Naive multivariate products, used to verify the Kronecker kernels.

use std::collections::HashMap;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::kron::Multiindex;
use crate::poisson::{Flavor, PoissonSeries, TrigTerm};
use crate::series::{LaurentPolynomial, PolyTerm};

/// Doubly nested product accumulated in a map keyed by exponent vector.
pub fn naive_multiply<C: Coefficient>(
    p1: &LaurentPolynomial<C>,
    p2: &LaurentPolynomial<C>,
) -> Result<LaurentPolynomial<C>> {
    if p1.num_vars() != p2.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: p1.num_vars(),
            found: p2.num_vars(),
        });
    }
    let mut acc: HashMap<Multiindex, C> = HashMap::new();
    for a in p1.terms() {
        for b in p2.terms() {
            acc.entry(a.exponents.add(&b.exponents))
                .or_insert_with(C::zero)
                .add_product(&a.coeff, &b.coeff);
        }
    }
    LaurentPolynomial::new(
        p1.num_vars(),
        acc.into_iter().map(|(e, c)| PolyTerm::new(c, e)).collect(),
    )
}

/// Term-by-term product-to-sum expansion without any encoding.
pub fn naive_poisson_multiply<C: Coefficient>(
    s1: &PoissonSeries<C>,
    s2: &PoissonSeries<C>,
) -> Result<PoissonSeries<C>> {
    let mut terms = Vec::with_capacity(2 * s1.len() * s2.len());
    for a in s1.terms() {
        for b in s2.terms() {
            let p = a.coeff.mul_ref(&b.coeff);
            let half = p
                .halve()
                .ok_or_else(|| Error::HalvingUnsupported(p.to_string()))?;
            let neg = half.neg_ref();
            let sum = a.multipliers.add(&b.multipliers);
            let diff = a.multipliers.sub(&b.multipliers);
            let pair = match (a.flavor, b.flavor) {
                (Flavor::Cos, Flavor::Cos) => {
                    [TrigTerm::cos(half.clone(), diff), TrigTerm::cos(half, sum)]
                }
                (Flavor::Cos, Flavor::Sin) => [TrigTerm::sin(half, sum), TrigTerm::sin(neg, diff)],
                (Flavor::Sin, Flavor::Cos) => {
                    [TrigTerm::sin(half.clone(), sum), TrigTerm::sin(half, diff)]
                }
                (Flavor::Sin, Flavor::Sin) => [TrigTerm::cos(half, diff), TrigTerm::cos(neg, sum)],
            };
            terms.extend(pair);
        }
    }
    PoissonSeries::new(s1.num_vars(), terms)
}

/// Same term set with coefficients equal within `rel_tol` relative error
/// (`0.0` demands exact equality).
pub fn polynomials_match<C: Coefficient>(
    a: &LaurentPolynomial<C>,
    b: &LaurentPolynomial<C>,
    rel_tol: f64,
) -> bool {
    a.len() == b.len()
        && a.terms().iter().zip(b.terms()).all(|(x, y)| {
            x.exponents == y.exponents && coefficients_match(&x.coeff, &y.coeff, rel_tol)
        })
}

pub fn poisson_match<C: Coefficient>(
    a: &PoissonSeries<C>,
    b: &PoissonSeries<C>,
    rel_tol: f64,
) -> bool {
    a.len() == b.len()
        && a.terms().iter().zip(b.terms()).all(|(x, y)| {
            x.flavor == y.flavor
                && x.multipliers == y.multipliers
                && coefficients_match(&x.coeff, &y.coeff, rel_tol)
        })
}

fn coefficients_match<C: Coefficient>(x: &C, y: &C, rel_tol: f64) -> bool {
    if x == y {
        return true;
    }
    if rel_tol == 0.0 {
        return false;
    }
    let (xf, yf) = (x.to_f64(), y.to_f64());
    (xf - yf).abs() <= rel_tol * xf.abs().max(yf.abs())
}
