//! Highly-sparse multiplication into a bucketized hash table.
//!
//! The table is one contiguous area of `n = N·m` slots split into `N`
//! buckets of at most `m` entries. A product with normalized code `e` goes to
//! bucket `e mod N`; when that bucket is full the entry spills into an
//! overflow bucket, and the table only grows once the overflow holds `s`
//! entries. Factors are ordered by code modulo `N` so consecutive writes hit
//! consecutive buckets.

use std::collections::HashMap;

use crate::coeff::Coefficient;
use crate::dense::{check_operands, BlockPlan, TraceRecord, DEFAULT_L2_BYTES};
use crate::error::{Error, Result};
use crate::kron::Code;
use crate::series::{UniTerm, UnivariateSeries};

pub const DEFAULT_BUCKET_SIZE: usize = 8;
pub const DEFAULT_GROWTH_FACTOR: usize = 4;

/// Table geometry for [`multiply_hash`]; unset fields take defaults derived
/// from the factor lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashParams {
    /// Initial bucket count `N`.
    pub buckets: Option<usize>,
    /// Bucket capacity `m`.
    pub bucket_size: usize,
    /// Overflow size `s` that triggers a rehash.
    pub overflow_threshold: Option<usize>,
    pub growth_factor: usize,
    /// Terms per block; defaults to the dense-path cache rule.
    pub block_size: Option<usize>,
}

impl Default for HashParams {
    fn default() -> Self {
        HashParams {
            buckets: None,
            bucket_size: DEFAULT_BUCKET_SIZE,
            overflow_threshold: None,
            growth_factor: DEFAULT_GROWTH_FACTOR,
            block_size: None,
        }
    }
}

impl HashParams {
    /// `(N, m, s)` for factors of the given lengths.
    pub fn resolve(&self, len1: usize, len2: usize) -> (usize, usize, usize) {
        let pairs = (len1 as f64) * (len2 as f64);
        let buckets = self
            .buckets
            .unwrap_or_else(|| (pairs.sqrt().ceil() as usize).max(1).next_power_of_two());
        let threshold = self.overflow_threshold.unwrap_or((buckets / 4).max(1));
        (buckets, self.bucket_size, threshold)
    }
}

/// Where an insertion landed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Bucket(usize),
    Overflow,
}

/// Bucketized accumulator keyed by non-negative codes.
#[derive(Debug, Clone)]
pub struct BucketTable<C> {
    bucket_count: usize,
    bucket_size: usize,
    threshold: usize,
    growth: usize,
    keys: Vec<Code>,
    values: Vec<C>,
    fill: Vec<u32>,
    overflow: Vec<(Code, C)>,
    /// Position of each code in `overflow`.
    overflow_index: HashMap<Code, usize>,
}

impl<C: Coefficient> BucketTable<C> {
    pub fn new(bucket_count: usize, bucket_size: usize, overflow_threshold: usize) -> Result<Self> {
        if bucket_count == 0 || bucket_size == 0 || overflow_threshold == 0 {
            return Err(Error::InvalidArgument(format!(
                "hash table needs N, m, s >= 1 (got {bucket_count}, {bucket_size}, {overflow_threshold})"
            )));
        }
        let slots = bucket_count.checked_mul(bucket_size).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "table of {bucket_count} x {bucket_size} slots is too large"
            ))
        })?;
        if bucket_size > u32::MAX as usize {
            return Err(Error::InvalidArgument("bucket size exceeds u32".into()));
        }
        Ok(BucketTable {
            bucket_count,
            bucket_size,
            threshold: overflow_threshold,
            growth: DEFAULT_GROWTH_FACTOR,
            keys: vec![0; slots],
            values: vec![C::zero(); slots],
            fill: vec![0; bucket_count],
            overflow: Vec::new(),
            overflow_index: HashMap::new(),
        })
    }

    pub fn with_growth_factor(mut self, growth: usize) -> Result<Self> {
        if growth < 2 {
            return Err(Error::InvalidArgument(
                "growth factor must be at least 2".into(),
            ));
        }
        self.growth = growth;
        Ok(self)
    }

    /// `N`
    pub fn bucket_count(&self) -> usize {
        self.bucket_count
    }

    /// `m`
    pub fn bucket_size(&self) -> usize {
        self.bucket_size
    }

    /// `n = N·m`
    pub fn slot_count(&self) -> usize {
        self.keys.len()
    }

    /// `s`
    pub fn overflow_threshold(&self) -> usize {
        self.threshold
    }

    pub fn overflow(&self) -> &[(Code, C)] {
        &self.overflow
    }

    pub fn len(&self) -> usize {
        self.fill.iter().map(|&f| f as usize).sum::<usize>() + self.overflow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn bucket_of(&self, code: Code) -> usize {
        debug_assert!(code >= 0, "hash keys are normalized codes");
        (code as u64 % self.bucket_count as u64) as usize
    }

    /// Stored `(code, coefficient)` pairs of bucket `b`.
    pub fn bucket(&self, b: usize) -> impl Iterator<Item = (Code, &C)> {
        let start = b * self.bucket_size;
        let end = start + self.fill[b] as usize;
        self.keys[start..end]
            .iter()
            .copied()
            .zip(&self.values[start..end])
    }

    /// Slot for `code`, created with a zero coefficient when absent.
    #[inline]
    fn slot(&mut self, code: Code) -> (&mut C, Placement) {
        let b = self.bucket_of(code);
        let start = b * self.bucket_size;
        let filled = self.fill[b] as usize;
        if let Some(i) = self.keys[start..start + filled]
            .iter()
            .position(|&k| k == code)
        {
            return (&mut self.values[start + i], Placement::Bucket(b));
        }
        if filled < self.bucket_size {
            let at = start + filled;
            self.keys[at] = code;
            self.values[at] = C::zero();
            self.fill[b] += 1;
            return (&mut self.values[at], Placement::Bucket(b));
        }
        // the bucket is full, so the code may only live in the overflow
        let next = self.overflow.len();
        let i = *self.overflow_index.entry(code).or_insert(next);
        if i == next {
            self.overflow.push((code, C::zero()));
        }
        (&mut self.overflow[i].1, Placement::Overflow)
    }

    /// Adds `coeff` to the entry for `code`.
    pub fn insert(&mut self, code: Code, coeff: &C) -> Placement {
        let (slot, place) = self.slot(code);
        slot.add_assign_ref(coeff);
        place
    }

    /// Adds `a·b` to the entry for `code`.
    #[inline]
    pub fn add_product(&mut self, code: Code, a: &C, b: &C) -> Placement {
        let (slot, place) = self.slot(code);
        slot.add_product(a, b);
        place
    }

    /// Subtracts `a·b` from the entry for `code`.
    #[inline]
    pub fn sub_product(&mut self, code: Code, a: &C, b: &C) -> Placement {
        let (slot, place) = self.slot(code);
        slot.sub_product(a, b);
        place
    }

    pub fn needs_rehash(&self) -> bool {
        self.overflow.len() >= self.threshold
    }

    /// Grows `N`, `n` and `s` by the growth factor (keeping `m`) and
    /// re-inserts every entry, repeating until the overflow is below `s`.
    pub fn rehash(&mut self) {
        loop {
            let mut grown = BucketTable {
                bucket_count: self.bucket_count * self.growth,
                bucket_size: self.bucket_size,
                threshold: self.threshold * self.growth,
                growth: self.growth,
                keys: vec![0; self.keys.len() * self.growth],
                values: vec![C::zero(); self.values.len() * self.growth],
                fill: vec![0; self.bucket_count * self.growth],
                overflow: Vec::new(),
                overflow_index: HashMap::new(),
            };
            for (code, coeff) in self.drain() {
                *grown.slot(code).0 = coeff;
            }
            *self = grown;
            if !self.needs_rehash() {
                return;
            }
        }
    }

    fn drain(&mut self) -> Vec<(Code, C)> {
        let mut out = Vec::with_capacity(self.len());
        let keys = std::mem::take(&mut self.keys);
        let mut values = std::mem::take(&mut self.values);
        for b in 0..self.bucket_count {
            let start = b * self.bucket_size;
            for i in start..start + self.fill[b] as usize {
                out.push((keys[i], std::mem::replace(&mut values[i], C::zero())));
            }
        }
        out.append(&mut self.overflow);
        self.overflow_index.clear();
        out
    }

    /// Every stored entry, zero coefficients included.
    pub fn entries(&self) -> impl Iterator<Item = (Code, &C)> {
        (0..self.bucket_count)
            .flat_map(move |b| self.bucket(b))
            .chain(self.overflow.iter().map(|(k, v)| (*k, v)))
    }

    /// Accumulation map of the table with zero coefficients removed.
    pub fn to_map(&self) -> HashMap<Code, C> {
        self.entries()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.clone()))
            .collect()
    }

    /// Checks that every bucket entry sits in bucket `code mod N` and that
    /// no code is stored twice.
    pub fn check_placement(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for b in 0..self.bucket_count {
            if self.fill[b] as usize > self.bucket_size {
                return false;
            }
            for (code, _) in self.bucket(b) {
                if self.bucket_of(code) != b || !seen.insert(code) {
                    return false;
                }
            }
        }
        self.overflow.iter().all(|(code, _)| seen.insert(*code))
    }

    /// Non-zero entries sorted by ascending code.
    pub fn into_sorted_terms(mut self) -> Vec<(Code, C)> {
        let mut out = self.drain();
        out.retain(|(_, c)| !c.is_zero());
        out.sort_unstable_by_key(|(k, _)| *k);
        out
    }
}

fn sort_mod<C>(terms: &mut [&UniTerm<C>], buckets: usize, shift: Code) {
    let n = buckets as Code;
    terms.sort_unstable_by_key(|t| ((t.code + shift).rem_euclid(n), t.code));
}

/// Block size used when `HashParams::block_size` is unset.
fn default_block<C: Coefficient>(u1: &UnivariateSeries<C>, u2: &UnivariateSeries<C>) -> usize {
    BlockPlan::for_series(u1, u2, DEFAULT_L2_BYTES).block_size()
}

fn run_hash<C: Coefficient>(
    u1: &UnivariateSeries<C>,
    u2: &UnivariateSeries<C>,
    params: &HashParams,
    mut trace: Option<&mut Vec<TraceRecord>>,
) -> Result<UnivariateSeries<C>> {
    let codec = check_operands(u1, u2)?;
    if u1.is_empty() || u2.is_empty() {
        return Ok(UnivariateSeries::from_sorted_unchecked(codec, vec![]));
    }
    let (buckets, size, threshold) = params.resolve(u1.len(), u2.len());
    let mut table =
        BucketTable::new(buckets, size, threshold)?.with_growth_factor(params.growth_factor)?;
    let chi = codec.chi();
    let block = params
        .block_size
        .unwrap_or_else(|| default_block(u1, u2))
        .max(1);

    // product key (a - chi) + b: order the first factor by a, the second by b - chi
    let mut t1: Vec<&UniTerm<C>> = u1.terms().iter().collect();
    let mut t2: Vec<&UniTerm<C>> = u2.terms().iter().collect();
    sort_mod(&mut t1, buckets, 0);
    sort_mod(&mut t2, buckets, -chi);

    let mut pos = 0;
    while pos < t1.len() {
        let row = pos..(pos + block).min(t1.len());
        let before = table.bucket_count();
        for col in (0..t2.len()).step_by(block) {
            let rhs = &t2[col..(col + block).min(t2.len())];
            for a in &t1[row.clone()] {
                let base = a.code - chi;
                for b in rhs {
                    let key = base + b.code;
                    if let Some(rec) = trace.as_deref_mut() {
                        rec.push(TraceRecord {
                            step: rec.len() as u64,
                            location: table.bucket_of(key) as i64,
                        });
                    }
                    if table.add_product(key, &a.coeff, &b.coeff) == Placement::Overflow
                        && table.needs_rehash()
                    {
                        table.rehash();
                    }
                }
            }
        }
        pos = row.end;
        // pairs done so far are t1[..pos] x t2, so both remaining orders may change
        if table.bucket_count() != before {
            sort_mod(&mut t1[pos..], table.bucket_count(), 0);
            sort_mod(&mut t2, table.bucket_count(), -chi);
        }
    }

    let terms = table
        .into_sorted_terms()
        .into_iter()
        .map(|(code, coeff)| UniTerm {
            coeff,
            code: code + chi,
        })
        .collect();
    Ok(UnivariateSeries::from_sorted_unchecked(codec, terms))
}

/// Product of two series accumulated in a [`BucketTable`].
pub fn multiply_hash<C: Coefficient>(
    u1: &UnivariateSeries<C>,
    u2: &UnivariateSeries<C>,
    params: &HashParams,
) -> Result<UnivariateSeries<C>> {
    run_hash(u1, u2, params, None)
}

/// Bucket index of every write performed by [`multiply_hash`], in order.
pub fn hash_write_trace<C: Coefficient>(
    u1: &UnivariateSeries<C>,
    u2: &UnivariateSeries<C>,
    params: &HashParams,
) -> Result<Vec<TraceRecord>> {
    let mut out = Vec::with_capacity(u1.len() * u2.len());
    run_hash(u1, u2, params, Some(&mut out))?;
    Ok(out)
}
