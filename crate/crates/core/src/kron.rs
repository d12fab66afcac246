//! Generalized Kronecker substitution.
//!
//! A multiindex `e` inside the box `[e_min, e_max]` is mapped to the code
//! `c·e − χ`, where `c` is the mixed-radix coding vector built from the
//! per-variable widths `w_k = 1 + e_max[k] − e_min[k]` and `χ = c·e_min`.
//! Variable 0 has weight 1 and varies fastest. Codes of the box are exactly
//! `0..capacity`, and the raw part `c·e` is additive, so multiplying monomials
//! becomes adding integers.

use std::fmt;
use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

/// Code integer. One high bit is kept spare so two raw codes can be added.
pub type Code = i64;

/// Largest `capacity + |χ|` a codec accepts.
pub const MAX_CODE_SPAN: i128 = (i64::MAX >> 1) as i128;

/// Signed exponent (or trigonometric multiplier) vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Multiindex(Vec<i64>);

impl Multiindex {
    pub fn new(entries: Vec<i64>) -> Self {
        Multiindex(entries)
    }

    pub fn zeros(num_vars: usize) -> Self {
        Multiindex(vec![0; num_vars])
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    /// Sum of all entries; negative exponents subtract.
    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    pub fn neg(&self) -> Multiindex {
        Multiindex(self.0.iter().map(|v| -v).collect())
    }

    pub fn add(&self, other: &Multiindex) -> Multiindex {
        debug_assert_eq!(self.len(), other.len());
        Multiindex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Multiindex) -> Multiindex {
        debug_assert_eq!(self.len(), other.len());
        Multiindex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Deref for Multiindex {
    type Target = [i64];

    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl DerefMut for Multiindex {
    fn deref_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }
}

impl From<Vec<i64>> for Multiindex {
    fn from(v: Vec<i64>) -> Self {
        Multiindex(v)
    }
}

impl From<&[i64]> for Multiindex {
    fn from(v: &[i64]) -> Self {
        Multiindex(v.to_vec())
    }
}

impl<const N: usize> From<[i64; N]> for Multiindex {
    fn from(v: [i64; N]) -> Self {
        Multiindex(v.to_vec())
    }
}

impl fmt::Debug for Multiindex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Component-wise bounds of a box of multiindices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RangeSpec {
    min: Multiindex,
    max: Multiindex,
}

impl RangeSpec {
    pub fn new(min: impl Into<Multiindex>, max: impl Into<Multiindex>) -> Result<Self> {
        let (min, max) = (min.into(), max.into());
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                found: max.len(),
            });
        }
        for (var, (&lo, &hi)) in min.iter().zip(max.iter()).enumerate() {
            if lo > hi {
                return Err(Error::InvalidRange {
                    var,
                    min: lo,
                    max: hi,
                });
            }
        }
        Ok(RangeSpec { min, max })
    }

    /// Same interval `[lo, hi]` for every one of `num_vars` variables.
    pub fn uniform(num_vars: usize, lo: i64, hi: i64) -> Result<Self> {
        RangeSpec::new(vec![lo; num_vars], vec![hi; num_vars])
    }

    /// Smallest box holding every multiindex of `items`; the one-point box at
    /// the origin when `items` is empty.
    pub fn bounding<'a, I>(num_vars: usize, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [i64]>,
    {
        let mut iter = items.into_iter();
        let Some(first) = iter.next() else {
            return RangeSpec::uniform(num_vars, 0, 0);
        };
        if first.len() != num_vars {
            return Err(Error::DimensionMismatch {
                expected: num_vars,
                found: first.len(),
            });
        }
        let mut min = first.to_vec();
        let mut max = first.to_vec();
        for e in iter {
            if e.len() != num_vars {
                return Err(Error::DimensionMismatch {
                    expected: num_vars,
                    found: e.len(),
                });
            }
            for k in 0..num_vars {
                min[k] = min[k].min(e[k]);
                max[k] = max[k].max(e[k]);
            }
        }
        Ok(RangeSpec {
            min: min.into(),
            max: max.into(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.min.len()
    }

    pub fn min(&self) -> &Multiindex {
        &self.min
    }

    pub fn max(&self) -> &Multiindex {
        &self.max
    }

    pub fn contains(&self, e: &[i64]) -> bool {
        e.len() == self.num_vars()
            && e.iter()
                .zip(self.min.iter().zip(self.max.iter()))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Smallest box containing both `self` and `other`.
    pub fn hull(&self, other: &RangeSpec) -> Result<RangeSpec> {
        check_same_vars(self, other)?;
        let min = self
            .min
            .iter()
            .zip(other.min.iter())
            .map(|(a, b)| *a.min(b))
            .collect::<Vec<_>>();
        let max = self
            .max
            .iter()
            .zip(other.max.iter())
            .map(|(a, b)| *a.max(b))
            .collect::<Vec<_>>();
        Ok(RangeSpec {
            min: min.into(),
            max: max.into(),
        })
    }
}

impl fmt::Debug for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?} ..= {:?}]", self.min, self.max)
    }
}

fn check_same_vars(a: &RangeSpec, b: &RangeSpec) -> Result<()> {
    if a.num_vars() != b.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: a.num_vars(),
            found: b.num_vars(),
        });
    }
    Ok(())
}

/// How factor boxes combine into the box of their product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductMode {
    /// Exponents add: `[a_min + b_min, a_max + b_max]`.
    Additive,
    /// Trigonometric multipliers add and subtract; the result is the symmetric
    /// box `[-M, M]` covering every sum, difference and their negations.
    Subtractive,
}

/// Box holding the exponents of any product of terms drawn from `r1` and `r2`.
pub fn product_ranges(r1: &RangeSpec, r2: &RangeSpec, mode: ProductMode) -> Result<RangeSpec> {
    check_same_vars(r1, r2)?;
    let n = r1.num_vars();
    let (mut min, mut max) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 0..n {
        let (a_lo, a_hi, b_lo, b_hi) = (r1.min[k], r1.max[k], r2.min[k], r2.max[k]);
        match mode {
            ProductMode::Additive => {
                min.push(a_lo.checked_add(b_lo).ok_or_else(|| range_overflow(k))?);
                max.push(a_hi.checked_add(b_hi).ok_or_else(|| range_overflow(k))?);
            }
            ProductMode::Subtractive => {
                let corners = [
                    a_lo as i128 + b_lo as i128,
                    a_hi as i128 + b_hi as i128,
                    a_lo as i128 - b_hi as i128,
                    a_hi as i128 - b_lo as i128,
                ];
                let m = corners.iter().map(|c| c.abs()).max().unwrap_or(0);
                let m = i64::try_from(m).map_err(|_| range_overflow(k))?;
                min.push(-m);
                max.push(m);
            }
        }
    }
    Ok(RangeSpec {
        min: min.into(),
        max: max.into(),
    })
}

fn range_overflow(var: usize) -> Error {
    Error::CapacityOverflow(format!(
        "range of variable {var} overflows the exponent integer"
    ))
}

/// Immutable Kronecker coder for one box.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Codec {
    ranges: RangeSpec,
    widths: Vec<i64>,
    coding: Vec<i64>,
    chi: Code,
    capacity: Code,
}

impl Codec {
    /// Builds the coder for `ranges`, refusing boxes whose codes would not fit
    /// the code integer with one spare bit.
    pub fn new(ranges: RangeSpec) -> Result<Self> {
        let n = ranges.num_vars();
        let mut widths = Vec::with_capacity(n);
        let mut coding = Vec::with_capacity(n);
        let mut weight: i128 = 1;
        let mut chi: i128 = 0;
        for k in 0..n {
            let w = 1 + ranges.max[k] as i128 - ranges.min[k] as i128;
            coding.push(weight);
            chi += weight * ranges.min[k] as i128;
            weight = weight
                .checked_mul(w)
                .filter(|&c| c <= MAX_CODE_SPAN)
                .ok_or_else(|| {
                    Error::CapacityOverflow(format!(
                        "product of widths exceeds 2^62 at variable {k} of {ranges:?}"
                    ))
                })?;
            widths.push(w);
            if chi.abs() > MAX_CODE_SPAN {
                return Err(Error::CapacityOverflow(format!(
                    "offset overflows for {ranges:?}"
                )));
            }
        }
        let capacity = weight;
        if capacity + chi.abs() > MAX_CODE_SPAN {
            return Err(Error::CapacityOverflow(format!(
                "capacity {capacity} plus offset {} exceeds 2^62 - 1 for {ranges:?}",
                chi.abs()
            )));
        }
        // every quantity is now bounded by MAX_CODE_SPAN
        Ok(Codec {
            ranges,
            widths: widths.into_iter().map(|w| w as i64).collect(),
            coding: coding.into_iter().map(|c| c as i64).collect(),
            chi: chi as Code,
            capacity: capacity as Code,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.ranges.num_vars()
    }

    pub fn ranges(&self) -> &RangeSpec {
        &self.ranges
    }

    pub fn widths(&self) -> &[i64] {
        &self.widths
    }

    pub fn coding_vector(&self) -> &[i64] {
        &self.coding
    }

    /// `χ = c·e_min`.
    pub fn chi(&self) -> Code {
        self.chi
    }

    /// Number of codes in the box, `Π w_k`.
    pub fn capacity(&self) -> Code {
        self.capacity
    }

    pub fn contains(&self, e: &[i64]) -> bool {
        self.ranges.contains(e)
    }

    fn check(&self, e: &[i64]) -> Result<()> {
        if e.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                found: e.len(),
            });
        }
        if !self.ranges.contains(e) {
            return Err(Error::OutOfRange {
                index: e.to_vec(),
                min: self.ranges.min.to_vec(),
                max: self.ranges.max.to_vec(),
            });
        }
        Ok(())
    }

    /// `c·e`, without the offset.
    pub fn raw_code(&self, e: &[i64]) -> Result<Code> {
        self.check(e)?;
        Ok(self.dot(e))
    }

    #[inline]
    fn dot(&self, e: &[i64]) -> Code {
        self.coding.iter().zip(e).map(|(c, v)| c * v).sum()
    }

    /// `c·e − χ`, in `0..capacity`.
    pub fn encode(&self, e: &[i64]) -> Result<Code> {
        self.check(e)?;
        Ok(self.dot(e) - self.chi)
    }

    /// Inverse of [`Codec::encode`].
    pub fn decode(&self, code: Code) -> Result<Multiindex> {
        if !(0..self.capacity).contains(&code) {
            return Err(Error::CodeOutOfRange {
                code,
                capacity: self.capacity,
            });
        }
        let mut rest = code;
        let entries = self
            .widths
            .iter()
            .zip(self.ranges.min.iter())
            .map(|(&w, &lo)| {
                let digit = rest % w;
                rest /= w;
                digit + lo
            })
            .collect();
        Ok(Multiindex(entries))
    }

    /// Inverse of [`Codec::raw_code`].
    pub fn decode_raw(&self, raw: Code) -> Result<Multiindex> {
        self.decode(self.normalize(raw))
    }

    /// Maps a raw code to its offset (array index) form.
    #[inline]
    pub fn normalize(&self, raw: Code) -> Code {
        raw - self.chi
    }
}
