//! Multivariate Laurent polynomials and their univariate Kronecker images.

use std::collections::HashMap;
use std::sync::Arc;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::kron::{product_ranges, Code, Codec, Multiindex, ProductMode, RangeSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct PolyTerm<C> {
    pub coeff: C,
    pub exponents: Multiindex,
}

impl<C> PolyTerm<C> {
    pub fn new(coeff: C, exponents: impl Into<Multiindex>) -> Self {
        PolyTerm {
            coeff,
            exponents: exponents.into(),
        }
    }
}

/// Sparse Laurent polynomial in `num_vars` variables.
///
/// Values built through [`LaurentPolynomial::new`] are canonical: exponent
/// multiindices are unique, coefficients non-zero, and terms sorted by
/// exponent so that structural equality is polynomial equality.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPolynomial<C> {
    num_vars: usize,
    terms: Vec<PolyTerm<C>>,
}

impl<C: Coefficient> LaurentPolynomial<C> {
    pub fn new(num_vars: usize, terms: Vec<PolyTerm<C>>) -> Result<Self> {
        for t in &terms {
            if t.exponents.len() != num_vars {
                return Err(Error::DimensionMismatch {
                    expected: num_vars,
                    found: t.exponents.len(),
                });
            }
        }
        Ok(canonicalize_poly(LaurentPolynomial { num_vars, terms }))
    }

    pub fn zero(num_vars: usize) -> Self {
        LaurentPolynomial {
            num_vars,
            terms: Vec::new(),
        }
    }

    pub fn constant(num_vars: usize, c: C) -> Self {
        let terms = if c.is_zero() {
            vec![]
        } else {
            vec![PolyTerm::new(c, Multiindex::zeros(num_vars))]
        };
        LaurentPolynomial { num_vars, terms }
    }

    /// Builds from `(coefficient, exponents)` pairs with small-integer coefficients.
    pub fn from_int_terms(num_vars: usize, terms: &[(i64, &[i64])]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(c, e)| PolyTerm::new(C::from_i64(*c), *e))
            .collect();
        LaurentPolynomial::new(num_vars, terms)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &[PolyTerm<C>] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<PolyTerm<C>> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Bounding box of the exponents.
    pub fn ranges(&self) -> RangeSpec {
        RangeSpec::bounding(self.num_vars, self.terms.iter().map(|t| &t.exponents[..]))
            .expect("canonical terms have num_vars entries")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                found: other.num_vars,
            });
        }
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        LaurentPolynomial::new(self.num_vars, terms)
    }

    /// Terms whose total degree does not exceed `limit`.
    pub fn truncated(&self, limit: i64) -> Self {
        LaurentPolynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|t| t.exponents.total_degree() <= limit)
                .cloned()
                .collect(),
        }
    }

    /// Coefficient of the monomial with exponents `e`, if present.
    pub fn coefficient(&self, e: &[i64]) -> Option<&C> {
        self.terms
            .binary_search_by(|t| t.exponents[..].cmp(e))
            .ok()
            .map(|i| &self.terms[i].coeff)
    }
}

/// Merges like terms, drops zero coefficients and sorts by exponent.
pub fn canonicalize_poly<C: Coefficient>(p: LaurentPolynomial<C>) -> LaurentPolynomial<C> {
    let num_vars = p.num_vars;
    let mut index: HashMap<Multiindex, usize> = HashMap::with_capacity(p.terms.len());
    let mut merged: Vec<PolyTerm<C>> = Vec::with_capacity(p.terms.len());
    for t in p.terms {
        match index.get(&t.exponents) {
            Some(&i) => merged[i].coeff.add_assign_ref(&t.coeff),
            None => {
                index.insert(t.exponents.clone(), merged.len());
                merged.push(t);
            }
        }
    }
    merged.retain(|t| !t.coeff.is_zero());
    merged.sort_unstable_by(|a, b| a.exponents.cmp(&b.exponents));
    LaurentPolynomial {
        num_vars,
        terms: merged,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniTerm<C> {
    pub coeff: C,
    pub code: Code,
}

/// Univariate image of a polynomial under a codec ("sparse distributed" form).
///
/// Codes are raw codes `c·e`; the accumulator index of a product of two
/// terms is `code1 + code2 − χ`.
#[derive(Debug, Clone)]
pub struct UnivariateSeries<C> {
    codec: Arc<Codec>,
    terms: Vec<UniTerm<C>>,
}

impl<C: Coefficient> UnivariateSeries<C> {
    /// Wraps terms that are already sorted by strictly ascending code.
    pub fn from_sorted(codec: Arc<Codec>, terms: Vec<UniTerm<C>>) -> Result<Self> {
        if terms.windows(2).any(|w| w[0].code >= w[1].code) {
            return Err(Error::NotSorted);
        }
        Ok(UnivariateSeries { codec, terms })
    }

    pub(crate) fn from_sorted_unchecked(codec: Arc<Codec>, terms: Vec<UniTerm<C>>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].code < w[1].code));
        UnivariateSeries { codec, terms }
    }

    pub fn codec(&self) -> &Arc<Codec> {
        &self.codec
    }

    pub fn terms(&self) -> &[UniTerm<C>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total multivariate degree of every term, recovered by decoding.
    pub fn degrees(&self) -> Result<Vec<i64>> {
        self.terms
            .iter()
            .map(|t| self.codec.decode_raw(t.code).map(|e| e.total_degree()))
            .collect()
    }

    /// Smallest and largest code, `None` when empty.
    pub fn code_span(&self) -> Option<(Code, Code)> {
        Some((self.terms.first()?.code, self.terms.last()?.code))
    }
}

/// Encodes every term and sorts by ascending code.
pub fn to_univariate<C: Coefficient>(
    p: &LaurentPolynomial<C>,
    codec: &Arc<Codec>,
) -> Result<UnivariateSeries<C>> {
    let mut terms = p
        .terms
        .iter()
        .map(|t| {
            Ok(UniTerm {
                coeff: t.coeff.clone(),
                code: codec.raw_code(&t.exponents)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    terms.sort_unstable_by_key(|t| t.code);
    // distinct exponents inside the box have distinct codes
    Ok(UnivariateSeries::from_sorted_unchecked(
        codec.clone(),
        terms,
    ))
}

/// Decodes a univariate series back to multivariate form.
pub fn from_univariate<C: Coefficient>(u: &UnivariateSeries<C>) -> Result<LaurentPolynomial<C>> {
    let terms = u
        .terms
        .iter()
        .map(|t| Ok(PolyTerm::new(t.coeff.clone(), u.codec.decode_raw(t.code)?)))
        .collect::<Result<Vec<_>>>()?;
    LaurentPolynomial::new(u.codec.num_vars(), terms)
}

/// Codec for multiplying `p1` by `p2`: the product box, widened if needed so
/// that it also contains both factor boxes.
pub fn product_codec<C: Coefficient>(
    p1: &LaurentPolynomial<C>,
    p2: &LaurentPolynomial<C>,
) -> Result<Arc<Codec>> {
    if p1.num_vars() != p2.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: p1.num_vars(),
            found: p2.num_vars(),
        });
    }
    let (r1, r2) = (p1.ranges(), p2.ranges());
    let ranges = product_ranges(&r1, &r2, ProductMode::Additive)?
        .hull(&r1)?
        .hull(&r2)?;
    Ok(Arc::new(Codec::new(ranges)?))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DensityReport {
    /// Capacity of the product codec.
    pub codec_capacity: i64,
    /// Term count of each factor divided by the capacity.
    pub factor_densities: [f64; 2],
    /// Length of the dense output array.
    pub predicted_output_span: i64,
}

impl DensityReport {
    pub fn max_density(&self) -> f64 {
        self.factor_densities[0].max(self.factor_densities[1])
    }
}

pub fn density_report<C: Coefficient>(
    p1: &LaurentPolynomial<C>,
    p2: &LaurentPolynomial<C>,
) -> Result<DensityReport> {
    let codec = product_codec(p1, p2)?;
    Ok(density_for_codec(&codec, p1.len(), p2.len()))
}

pub(crate) fn density_for_codec(codec: &Codec, len1: usize, len2: usize) -> DensityReport {
    let cap = codec.capacity();
    DensityReport {
        codec_capacity: cap,
        factor_densities: [len1 as f64 / cap as f64, len2 as f64 / cap as f64],
        predicted_output_span: cap,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dense,
    Hash,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Dense => "dense",
            Algorithm::Hash => "hash",
        })
    }
}

pub const DEFAULT_MACHINE_MEMORY: u64 = 4 << 30;
pub const DEFAULT_DENSITY_THRESHOLD: f64 = 1e-4;

/// Limits deciding between the dense array and the hash table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionPolicy {
    /// Bytes the dense accumulator may occupy.
    pub memory_budget: u64,
    /// Minimum factor density for the dense path.
    pub density_threshold: f64,
    /// Bytes per accumulator slot.
    pub coeff_size: usize,
}

impl SelectionPolicy {
    /// A quarter of `machine_memory` as budget.
    pub fn for_machine(machine_memory: u64, coeff_size: usize) -> Self {
        SelectionPolicy {
            memory_budget: machine_memory / 4,
            density_threshold: DEFAULT_DENSITY_THRESHOLD,
            coeff_size,
        }
    }

    pub fn for_coefficient<C>() -> Self {
        SelectionPolicy::for_machine(DEFAULT_MACHINE_MEMORY, std::mem::size_of::<C>())
    }

    /// Dense accumulator slots that fit the budget.
    pub fn max_dense_slots(&self) -> u64 {
        self.memory_budget / self.coeff_size.max(1) as u64
    }
}

pub fn select_algorithm(report: &DensityReport, policy: &SelectionPolicy) -> Algorithm {
    let bytes = report.predicted_output_span as u128 * policy.coeff_size as u128;
    if bytes <= policy.memory_budget as u128 && report.max_density() >= policy.density_threshold {
        Algorithm::Dense
    } else {
        Algorithm::Hash
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Integer;
    use std::collections::BTreeMap;

    fn int(v: i64) -> Integer {
        Integer::from(v)
    }

    #[test]
    fn merges_like_terms() {
        let p = LaurentPolynomial::new(
            2,
            vec![PolyTerm::new(int(2), [1, 0]), PolyTerm::new(int(3), [1, 0])],
        )
        .unwrap();
        assert_eq!(p.terms(), &[PolyTerm::new(int(5), [1, 0])]);
    }

    #[test]
    fn cancellation_gives_empty() {
        let p = LaurentPolynomial::new(
            1,
            vec![PolyTerm::new(int(1), [0]), PolyTerm::new(int(-1), [0])],
        )
        .unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn canonicalize_matches_map_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let raw: Vec<PolyTerm<Integer>> = (0..50)
                .map(|_| {
                    PolyTerm::new(
                        int(rng.gen_range(-3..=3)),
                        [rng.gen_range(-2..=2), rng.gen_range(-2..=2)],
                    )
                })
                .collect();
            let mut oracle: BTreeMap<Vec<i64>, Integer> = BTreeMap::new();
            for t in &raw {
                *oracle.entry(t.exponents.to_vec()).or_insert_with(|| int(0)) += &t.coeff;
            }
            oracle.retain(|_, c| *c != int(0));
            let p = LaurentPolynomial::new(2, raw).unwrap();
            let got: BTreeMap<Vec<i64>, Integer> = p
                .terms()
                .iter()
                .map(|t| (t.exponents.to_vec(), t.coeff.clone()))
                .collect();
            assert_eq!(got, oracle);
        }
    }

    #[test]
    fn dimension_checked() {
        let r = LaurentPolynomial::new(2, vec![PolyTerm::new(int(1), [1])]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn univariate_small_example() {
        // 1 + x + y with x, y in [0, 1]
        let p: LaurentPolynomial<Integer> =
            LaurentPolynomial::from_int_terms(2, &[(1, &[0, 0]), (1, &[1, 0]), (1, &[0, 1])])
                .unwrap();
        let codec = Arc::new(Codec::new(RangeSpec::uniform(2, 0, 1).unwrap()).unwrap());
        assert_eq!(codec.coding_vector(), &[1, 2]);
        let u = to_univariate(&p, &codec).unwrap();
        let codes: Vec<_> = u.terms().iter().map(|t| t.code).collect();
        assert_eq!(codes, vec![0, 1, 2]);
        assert_eq!(from_univariate(&u).unwrap(), p);
    }

    #[test]
    fn cube_monomial_code() {
        // x^3 y
        let p: LaurentPolynomial<Integer> =
            LaurentPolynomial::from_int_terms(3, &[(1, &[3, 1, 0])]).unwrap();
        let codec = Arc::new(Codec::new(RangeSpec::uniform(3, 0, 3).unwrap()).unwrap());
        assert_eq!(to_univariate(&p, &codec).unwrap().terms()[0].code, 7);
    }

    #[test]
    fn empty_and_single_term_conversions() {
        let codec = Arc::new(Codec::new(RangeSpec::new([-1, 2], [1, 4]).unwrap()).unwrap());
        let empty = LaurentPolynomial::<Integer>::zero(2);
        let u = to_univariate(&empty, &codec).unwrap();
        assert!(u.is_empty());
        assert!(from_univariate(&u).unwrap().is_empty());

        let single = UnivariateSeries::from_sorted(
            codec.clone(),
            vec![UniTerm {
                coeff: int(5),
                code: codec.chi(),
            }],
        )
        .unwrap();
        let p = from_univariate(&single).unwrap();
        assert_eq!(p.terms(), &[PolyTerm::new(int(5), [-1, 2])]);
    }

    #[test]
    fn out_of_box_term_rejected() {
        let p: LaurentPolynomial<Integer> =
            LaurentPolynomial::from_int_terms(1, &[(1, &[4])]).unwrap();
        let codec = Arc::new(Codec::new(RangeSpec::uniform(1, 0, 3).unwrap()).unwrap());
        assert!(matches!(
            to_univariate(&p, &codec),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn unsorted_series_rejected() {
        let codec = Arc::new(Codec::new(RangeSpec::uniform(1, 0, 3).unwrap()).unwrap());
        let terms = vec![
            UniTerm {
                coeff: 1.0,
                code: 2,
            },
            UniTerm {
                coeff: 1.0,
                code: 1,
            },
        ];
        assert!(matches!(
            UnivariateSeries::from_sorted(codec, terms),
            Err(Error::NotSorted)
        ));
    }

    #[test]
    fn product_codec_contains_factor_boxes() {
        // x^3 * x^5: the bare product box [8, 8] misses both factors
        let a: LaurentPolynomial<Integer> =
            LaurentPolynomial::from_int_terms(1, &[(1, &[3])]).unwrap();
        let b: LaurentPolynomial<Integer> =
            LaurentPolynomial::from_int_terms(1, &[(1, &[5])]).unwrap();
        let codec = product_codec(&a, &b).unwrap();
        assert_eq!(codec.ranges(), &RangeSpec::new([3], [8]).unwrap());
    }

    #[test]
    fn single_term_density() {
        let a: LaurentPolynomial<f64> =
            LaurentPolynomial::from_int_terms(2, &[(1, &[0, 0])]).unwrap();
        let b: LaurentPolynomial<f64> =
            LaurentPolynomial::from_int_terms(2, &[(1, &[2, 3])]).unwrap();
        let r = density_report(&a, &b).unwrap();
        assert_eq!(r.codec_capacity, 12);
        assert_eq!(r.factor_densities, [1.0 / 12.0, 1.0 / 12.0]);
        assert_eq!(r.predicted_output_span, 12);
    }

    #[test]
    fn tiny_dense_selected() {
        let report = DensityReport {
            codec_capacity: 10,
            factor_densities: [0.5, 0.5],
            predicted_output_span: 10,
        };
        let policy = SelectionPolicy::for_coefficient::<f64>();
        assert_eq!(policy.memory_budget, 1 << 30);
        assert_eq!(select_algorithm(&report, &policy), Algorithm::Dense);
    }

    #[test]
    fn sparse_or_oversized_selects_hash() {
        let policy = SelectionPolicy::for_coefficient::<f64>();
        let sparse = DensityReport {
            codec_capacity: 1_000_000,
            factor_densities: [1e-5, 1e-5],
            predicted_output_span: 1_000_000,
        };
        assert_eq!(select_algorithm(&sparse, &policy), Algorithm::Hash);
        let huge = DensityReport {
            codec_capacity: 1 << 40,
            factor_densities: [0.5, 0.5],
            predicted_output_span: 1 << 40,
        };
        assert_eq!(select_algorithm(&huge, &policy), Algorithm::Hash);
    }
}
