//! Poisson (Fourier) series and their multiplication.
//!
//! A term is `coeff · cos(j·y)` or `coeff · sin(j·y)`. Products follow the
//! product-to-sum identities
//!
//! ```text
//! cos a cos b = ½ [cos(a−b) + cos(a+b)]
//! cos a sin b = ½ [sin(a+b) − sin(a−b)]
//! sin a cos b = ½ [sin(a+b) + sin(a−b)]
//! sin a sin b = ½ [cos(a−b) − cos(a+b)]
//! ```
//!
//! so every term pair writes at the sum and at the difference of the trig
//! codes. Multipliers are encoded on a symmetric box, where the sign of the
//! raw code is the sign of the last non-zero multiplier; canonical terms have
//! a non-negative code.

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::hash::{BucketTable, HashParams};
use crate::kron::{product_ranges, Code, Codec, Multiindex, ProductMode, RangeSpec};
use crate::series::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Cos,
    Sin,
}

impl Flavor {
    pub fn symbol(self) -> char {
        match self {
            Flavor::Cos => 'c',
            Flavor::Sin => 's',
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Cos => "cos",
            Flavor::Sin => "sin",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigTerm<C> {
    pub coeff: C,
    pub multipliers: Multiindex,
    pub flavor: Flavor,
}

impl<C> TrigTerm<C> {
    pub fn new(coeff: C, multipliers: impl Into<Multiindex>, flavor: Flavor) -> Self {
        TrigTerm {
            coeff,
            multipliers: multipliers.into(),
            flavor,
        }
    }

    pub fn cos(coeff: C, multipliers: impl Into<Multiindex>) -> Self {
        TrigTerm::new(coeff, multipliers, Flavor::Cos)
    }

    pub fn sin(coeff: C, multipliers: impl Into<Multiindex>) -> Self {
        TrigTerm::new(coeff, multipliers, Flavor::Sin)
    }
}

/// Sign of the last non-zero entry, 0 for the zero vector.
fn leading_sign(j: &[i64]) -> i64 {
    j.iter().rev().find(|&&v| v != 0).map_or(0, |v| v.signum())
}

/// Canonical Poisson series: unique `(flavor, multipliers)` keys, non-zero
/// coefficients, non-negative leading multiplier, no `sin(0)` terms. Terms
/// are sorted by flavor then multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSeries<C> {
    num_vars: usize,
    terms: Vec<TrigTerm<C>>,
}

impl<C: Coefficient> PoissonSeries<C> {
    pub fn new(num_vars: usize, terms: Vec<TrigTerm<C>>) -> Result<Self> {
        let mut keyed: std::collections::HashMap<(Flavor, Multiindex), C> =
            std::collections::HashMap::with_capacity(terms.len());
        for t in terms {
            if t.multipliers.len() != num_vars {
                return Err(Error::DimensionMismatch {
                    expected: num_vars,
                    found: t.multipliers.len(),
                });
            }
            let (mut coeff, mut j) = (t.coeff, t.multipliers);
            match leading_sign(&j) {
                0 if t.flavor == Flavor::Sin => continue,
                -1 => {
                    j = j.neg();
                    if t.flavor == Flavor::Sin {
                        coeff = coeff.neg_ref();
                    }
                }
                _ => {}
            }
            match keyed.entry((t.flavor, j)) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    e.get_mut().add_assign_ref(&coeff)
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(coeff);
                }
            }
        }
        let mut terms: Vec<TrigTerm<C>> = keyed
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((flavor, multipliers), coeff)| TrigTerm {
                coeff,
                multipliers,
                flavor,
            })
            .collect();
        terms.sort_unstable_by(|a, b| (a.flavor, &a.multipliers).cmp(&(b.flavor, &b.multipliers)));
        Ok(PoissonSeries { num_vars, terms })
    }

    pub fn zero(num_vars: usize) -> Self {
        PoissonSeries {
            num_vars,
            terms: vec![],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &[TrigTerm<C>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Bounding box of the multipliers.
    pub fn ranges(&self) -> RangeSpec {
        RangeSpec::bounding(self.num_vars, self.terms.iter().map(|t| &t.multipliers[..]))
            .expect("canonical terms have num_vars entries")
    }

    /// `Σ coeff · cos/sin(j·angles)` in floating point.
    ///
    /// # Panics
    ///
    /// When `angles.len()` differs from the number of trig variables.
    pub fn evaluate(&self, angles: &[f64]) -> f64 {
        assert_eq!(angles.len(), self.num_vars, "one angle per trig variable");
        self.terms
            .iter()
            .map(|t| {
                let arg: f64 = t
                    .multipliers
                    .iter()
                    .zip(angles)
                    .map(|(&j, y)| j as f64 * y)
                    .sum();
                let trig = match t.flavor {
                    Flavor::Cos => arg.cos(),
                    Flavor::Sin => arg.sin(),
                };
                t.coeff.to_f64() * trig
            })
            .sum()
    }
}

/// Accumulator backend for the cos and sin sides of a Poisson product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PoissonBackend {
    #[default]
    Dense,
    Hash,
}

impl From<Algorithm> for PoissonBackend {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Dense => PoissonBackend::Dense,
            Algorithm::Hash => PoissonBackend::Hash,
        }
    }
}

/// Cos/sin accumulators indexed by canonical (non-negative) trig code.
trait TrigSink<C> {
    fn add(&mut self, flavor: Flavor, code: Code, a: &C, b: &C);
    fn sub(&mut self, flavor: Flavor, code: Code, a: &C, b: &C);
}

struct DensePair<C> {
    cos: Vec<C>,
    sin: Vec<C>,
}

impl<C: Coefficient> TrigSink<C> for DensePair<C> {
    #[inline]
    fn add(&mut self, flavor: Flavor, code: Code, a: &C, b: &C) {
        match flavor {
            Flavor::Cos => self.cos[code as usize].add_product(a, b),
            Flavor::Sin => self.sin[code as usize].add_product(a, b),
        }
    }

    #[inline]
    fn sub(&mut self, flavor: Flavor, code: Code, a: &C, b: &C) {
        match flavor {
            Flavor::Cos => self.cos[code as usize].sub_product(a, b),
            Flavor::Sin => self.sin[code as usize].sub_product(a, b),
        }
    }
}

struct HashPair<C> {
    cos: BucketTable<C>,
    sin: BucketTable<C>,
}

impl<C: Coefficient> HashPair<C> {
    fn table(&mut self, flavor: Flavor) -> &mut BucketTable<C> {
        match flavor {
            Flavor::Cos => &mut self.cos,
            Flavor::Sin => &mut self.sin,
        }
    }
}

impl<C: Coefficient> TrigSink<C> for HashPair<C> {
    fn add(&mut self, flavor: Flavor, code: Code, a: &C, b: &C) {
        let t = self.table(flavor);
        t.add_product(code, a, b);
        if t.needs_rehash() {
            t.rehash();
        }
    }

    fn sub(&mut self, flavor: Flavor, code: Code, a: &C, b: &C) {
        let t = self.table(flavor);
        t.sub_product(code, a, b);
        if t.needs_rehash() {
            t.rehash();
        }
    }
}

/// Routes one unscaled product to its canonical slot; negative codes flip
/// to positive (sin changes sign) and `sin(0)` vanishes.
#[inline]
fn put<C: Coefficient, S: TrigSink<C>>(
    sink: &mut S,
    flavor: Flavor,
    code: Code,
    negate: bool,
    a: &C,
    b: &C,
) {
    let (code, negate) = if code < 0 {
        (-code, negate ^ (flavor == Flavor::Sin))
    } else {
        (code, negate)
    };
    if flavor == Flavor::Sin && code == 0 {
        return;
    }
    if negate {
        sink.sub(flavor, code, a, b);
    } else {
        sink.add(flavor, code, a, b);
    }
}

struct EncodedTerm<'a, C> {
    code: Code,
    flavor: Flavor,
    coeff: &'a C,
}

fn accumulate<C: Coefficient, S: TrigSink<C>>(
    sink: &mut S,
    t1: &[EncodedTerm<C>],
    t2: &[EncodedTerm<C>],
) {
    use Flavor::{Cos, Sin};
    for a in t1 {
        for b in t2 {
            let (plus, minus) = (a.code + b.code, a.code - b.code);
            let (x, y) = (a.coeff, b.coeff);
            match (a.flavor, b.flavor) {
                (Cos, Cos) => {
                    put(sink, Cos, minus, false, x, y);
                    put(sink, Cos, plus, false, x, y);
                }
                (Cos, Sin) => {
                    put(sink, Sin, plus, false, x, y);
                    put(sink, Sin, minus, true, x, y);
                }
                (Sin, Cos) => {
                    put(sink, Sin, plus, false, x, y);
                    put(sink, Sin, minus, false, x, y);
                }
                (Sin, Sin) => {
                    put(sink, Cos, minus, false, x, y);
                    put(sink, Cos, plus, true, x, y);
                }
            }
        }
    }
}

/// Codec of the symmetric box holding every sum and difference of the
/// multipliers of `s1` and `s2`.
pub fn trig_codec<C: Coefficient>(s1: &PoissonSeries<C>, s2: &PoissonSeries<C>) -> Result<Codec> {
    if s1.num_vars() != s2.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: s1.num_vars(),
            found: s2.num_vars(),
        });
    }
    Codec::new(product_ranges(
        &s1.ranges(),
        &s2.ranges(),
        ProductMode::Subtractive,
    )?)
}

fn encode_terms<'a, C: Coefficient>(
    codec: &Codec,
    s: &'a PoissonSeries<C>,
) -> Result<Vec<EncodedTerm<'a, C>>> {
    s.terms
        .iter()
        .map(|t| {
            Ok(EncodedTerm {
                code: codec.raw_code(&t.multipliers)?,
                flavor: t.flavor,
                coeff: &t.coeff,
            })
        })
        .collect()
}

fn finish<C: Coefficient>(
    codec: &Codec,
    num_vars: usize,
    sides: [(Flavor, Vec<(Code, C)>); 2],
) -> Result<PoissonSeries<C>> {
    let mut terms = Vec::new();
    for (flavor, entries) in sides {
        for (code, sum) in entries {
            if sum.is_zero() {
                continue;
            }
            let coeff = sum
                .halve()
                .ok_or_else(|| Error::HalvingUnsupported(sum.to_string()))?;
            terms.push(TrigTerm {
                coeff,
                multipliers: codec.decode_raw(code)?,
                flavor,
            });
        }
    }
    PoissonSeries::new(num_vars, terms)
}

/// Product of two Poisson series.
///
/// Fails with [`Error::HalvingUnsupported`] when an accumulated coefficient
/// cannot be halved in the ring (odd integers).
pub fn multiply_poisson<C: Coefficient>(
    s1: &PoissonSeries<C>,
    s2: &PoissonSeries<C>,
    backend: PoissonBackend,
) -> Result<PoissonSeries<C>> {
    let codec = trig_codec(s1, s2)?;
    let num_vars = s1.num_vars();
    if s1.is_empty() || s2.is_empty() {
        return Ok(PoissonSeries::zero(num_vars));
    }
    let (t1, t2) = (encode_terms(&codec, s1)?, encode_terms(&codec, s2)?);
    // largest canonical code: the raw code of the upper corner
    let top = codec.capacity() / 2;
    let sides = match backend {
        PoissonBackend::Dense => {
            let len = usize::try_from(top + 1).map_err(|_| {
                Error::CapacityOverflow("trig accumulator does not fit memory".into())
            })?;
            let mut sink = DensePair {
                cos: vec![C::zero(); len],
                sin: vec![C::zero(); len],
            };
            accumulate(&mut sink, &t1, &t2);
            let collect = |v: Vec<C>| -> Vec<(Code, C)> {
                v.into_iter()
                    .enumerate()
                    .map(|(i, c)| (i as Code, c))
                    .collect()
            };
            [
                (Flavor::Cos, collect(sink.cos)),
                (Flavor::Sin, collect(sink.sin)),
            ]
        }
        PoissonBackend::Hash => {
            let (n, m, s) = HashParams::default().resolve(t1.len(), t2.len());
            let mut sink = HashPair {
                cos: BucketTable::new(n, m, s)?,
                sin: BucketTable::new(n, m, s)?,
            };
            accumulate(&mut sink, &t1, &t2);
            [
                (Flavor::Cos, sink.cos.into_sorted_terms()),
                (Flavor::Sin, sink.sin.into_sorted_terms()),
            ]
        }
    };
    finish(&codec, num_vars, sides)
}

/// Deterministic random series with `num_terms` distinct canonical terms,
/// multipliers in `[-max_multiplier, max_multiplier]` and coefficients
/// uniform in `[-1, 1]`.
pub fn random_fourier_series(
    seed: u64,
    num_vars: usize,
    num_terms: usize,
    max_multiplier: i64,
) -> Result<PoissonSeries<f64>> {
    if max_multiplier < 0 {
        return Err(Error::InvalidArgument(
            "multiplier bound must be non-negative".into(),
        ));
    }
    // w^m distinct canonical (flavor, multipliers) keys exist
    let width = 2 * max_multiplier as u128 + 1;
    let available = (0..num_vars).try_fold(1u128, |acc, _| acc.checked_mul(width));
    if available.is_some_and(|a| (num_terms as u128) > a) {
        return Err(Error::InvalidArgument(format!(
            "{num_terms} terms requested but only {} distinct terms exist",
            available.unwrap_or(0)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(num_terms);
    let mut terms = Vec::with_capacity(num_terms);
    while terms.len() < num_terms {
        let mut j: Multiindex = (0..num_vars)
            .map(|_| rng.gen_range(-max_multiplier..=max_multiplier))
            .collect::<Vec<_>>()
            .into();
        if leading_sign(&j) < 0 {
            j = j.neg();
        }
        let flavor = if rng.gen_bool(0.5) {
            Flavor::Cos
        } else {
            Flavor::Sin
        };
        if flavor == Flavor::Sin && j.is_zero() {
            continue;
        }
        let coeff: f64 = rng.gen_range(-1.0..=1.0);
        if coeff == 0.0 || !seen.insert((flavor, j.clone())) {
            continue;
        }
        terms.push(TrigTerm::new(coeff, j, flavor));
    }
    PoissonSeries::new(num_vars, terms)
}
