//! Moderately-sparse multiplication into a dense coefficient array.
//!
//! Each product `(c1, n1)·(c2, n2)` is added to the array slot of code
//! `n1 + n2`. Factors are sorted by ascending code and walked block pair by
//! block pair so that the writes of one pair land in a short, cached span.

use std::io::{self, Write};
use std::ops::Range;
use std::sync::Arc;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::kron::{Code, Codec};
use crate::series::{UniTerm, UnivariateSeries};

/// Cache size the default block size is derived from.
pub const DEFAULT_L2_BYTES: usize = 256 * 1024;

const MIN_BLOCK: usize = 16;

/// Partition of both factors into consecutive blocks of `block_size` terms;
/// the last block of each factor may be shorter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPlan {
    block_size: usize,
    first: Vec<Range<usize>>,
    second: Vec<Range<usize>>,
}

fn chunks(len: usize, size: usize) -> Vec<Range<usize>> {
    (0..len)
        .step_by(size)
        .map(|s| s..(s + size).min(len))
        .collect()
}

impl BlockPlan {
    pub fn new(block_size: usize, len1: usize, len2: usize) -> Self {
        let block_size = block_size.max(1);
        BlockPlan {
            block_size,
            first: chunks(len1, block_size),
            second: chunks(len2, block_size),
        }
    }

    /// One block per factor: the plain doubly nested loop.
    pub fn unblocked(len1: usize, len2: usize) -> Self {
        let mut plan = BlockPlan::new(len1.max(len2).max(1), len1, len2);
        plan.block_size = len1.max(len2).max(1);
        plan
    }

    /// Largest block size such that one block of each factor plus the
    /// accumulator span their products touch fit in half of `cache_bytes`.
    pub fn for_series<C: Coefficient>(
        u1: &UnivariateSeries<C>,
        u2: &UnivariateSeries<C>,
        cache_bytes: usize,
    ) -> Self {
        let coeff = std::mem::size_of::<C>().max(1);
        let term = std::mem::size_of::<UniTerm<C>>();
        let gap = |u: &UnivariateSeries<C>| match u.code_span() {
            Some((lo, hi)) if u.len() > 1 => ((hi - lo) as f64 / (u.len() - 1) as f64).max(1.0),
            _ => 1.0,
        };
        let per_term = 2.0 * term as f64 + (gap(u1) + gap(u2)) * coeff as f64;
        let size = ((cache_bytes / 2) as f64 / per_term) as usize;
        let longest = u1.len().max(u2.len()).max(1);
        BlockPlan::new(
            size.clamp(MIN_BLOCK.min(longest), longest),
            u1.len(),
            u2.len(),
        )
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn first_blocks(&self) -> &[Range<usize>] {
        &self.first
    }

    pub fn second_blocks(&self) -> &[Range<usize>] {
        &self.second
    }

    pub(crate) fn check<C>(&self, u1: &UnivariateSeries<C>, u2: &UnivariateSeries<C>) -> Result<()>
    where
        C: Coefficient,
    {
        let covers =
            |blocks: &[Range<usize>], len: usize| blocks.last().map_or(0, |b| b.end) == len;
        if covers(&self.first, u1.len()) && covers(&self.second, u2.len()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "block plan does not partition factors of length {} and {}",
                u1.len(),
                u2.len()
            )))
        }
    }
}

/// Zero-initialized coefficient array covering the normalized codes
/// `start..start + len` ("dense distributed" form).
#[derive(Debug, Clone)]
pub struct DenseAccumulator<C> {
    codec: Arc<Codec>,
    start: Code,
    coeffs: Vec<C>,
}

impl<C: Coefficient> DenseAccumulator<C> {
    /// One slot per code of the codec.
    pub fn new(codec: Arc<Codec>) -> Self {
        let len = codec.capacity();
        DenseAccumulator::window(codec, 0, len as usize)
    }

    pub fn window(codec: Arc<Codec>, start: Code, len: usize) -> Self {
        DenseAccumulator {
            codec,
            start,
            coeffs: vec![C::zero(); len],
        }
    }

    pub fn codec(&self) -> &Arc<Codec> {
        &self.codec
    }

    pub fn start(&self) -> Code {
        self.start
    }

    pub fn slots(&self) -> &[C] {
        &self.coeffs
    }

    pub fn slots_mut(&mut self) -> &mut [C] {
        &mut self.coeffs
    }

    /// Non-zero slots as a sorted sparse series.
    pub fn into_series(self) -> UnivariateSeries<C> {
        let terms = self.into_terms();
        UnivariateSeries::from_sorted_unchecked(terms.0, terms.1)
    }

    fn into_terms(self) -> (Arc<Codec>, Vec<UniTerm<C>>) {
        let base = self.start + self.codec.chi();
        let terms = self
            .coeffs
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, coeff)| UniTerm {
                coeff,
                code: base + i as Code,
            })
            .collect();
        (self.codec, terms)
    }
}

pub(crate) fn check_operands<C: Coefficient>(
    u1: &UnivariateSeries<C>,
    u2: &UnivariateSeries<C>,
) -> Result<Arc<Codec>> {
    if !Arc::ptr_eq(u1.codec(), u2.codec()) && u1.codec() != u2.codec() {
        return Err(Error::CodecMismatch);
    }
    Ok(u1.codec().clone())
}

/// Adds every product of `lhs × rhs` into `acc`, where slot `i` holds the
/// product code `i - offset`.
#[inline]
pub(crate) fn accumulate_block<C: Coefficient>(
    acc: &mut [C],
    offset: Code,
    lhs: &[UniTerm<C>],
    rhs: &[UniTerm<C>],
) {
    for a in lhs {
        let base = a.code + offset;
        for b in rhs {
            acc[(base + b.code) as usize].add_product(&a.coeff, &b.coeff);
        }
    }
}

/// Product of two series through a dense array spanning the whole codec.
pub fn multiply_dense<C: Coefficient>(
    u1: &UnivariateSeries<C>,
    u2: &UnivariateSeries<C>,
    plan: &BlockPlan,
) -> Result<UnivariateSeries<C>> {
    let codec = check_operands(u1, u2)?;
    plan.check(u1, u2)?;
    if u1.is_empty() || u2.is_empty() {
        return Ok(UnivariateSeries::from_sorted_unchecked(codec, vec![]));
    }
    let mut acc = DenseAccumulator::new(codec.clone());
    let offset = -codec.chi();
    let (t1, t2) = (u1.terms(), u2.terms());
    for b1 in plan.first_blocks() {
        for b2 in plan.second_blocks() {
            accumulate_block(&mut acc.coeffs, offset, &t1[b1.clone()], &t2[b2.clone()]);
        }
    }
    Ok(acc.into_series())
}

/// Dense multiplication with an accumulator of at most `max_slots` entries:
/// the output code range is processed window by window, and each window only
/// visits the term pairs whose product falls inside it.
pub fn multiply_dense_segmented<C: Coefficient>(
    u1: &UnivariateSeries<C>,
    u2: &UnivariateSeries<C>,
    plan: &BlockPlan,
    max_slots: usize,
) -> Result<UnivariateSeries<C>> {
    let codec = check_operands(u1, u2)?;
    plan.check(u1, u2)?;
    if max_slots == 0 {
        return Err(Error::InvalidArgument(
            "segment length must be positive".into(),
        ));
    }
    let (Some((lo1, hi1)), Some((lo2, hi2))) = (u1.code_span(), u2.code_span()) else {
        return Ok(UnivariateSeries::from_sorted_unchecked(codec, vec![]));
    };
    let chi = codec.chi();
    let (first, last) = (lo1 + lo2 - chi, hi1 + hi2 - chi);
    let (t1, t2) = (u1.terms(), u2.terms());
    let mut out = Vec::new();
    let mut start = first;
    while start <= last {
        let len = ((last - start + 1) as u64).min(max_slots as u64) as usize;
        let end = start + len as Code;
        let mut acc = DenseAccumulator::window(codec.clone(), start, len);
        let offset = -chi - start;
        for b1 in plan.first_blocks() {
            let lhs = &t1[b1.clone()];
            for b2 in plan.second_blocks() {
                let rhs = &t2[b2.clone()];
                let lo = lhs[0].code + rhs[0].code - chi;
                let hi = lhs[lhs.len() - 1].code + rhs[rhs.len() - 1].code - chi;
                if hi < start || lo >= end {
                    continue;
                }
                if lo >= start && hi < end {
                    accumulate_block(&mut acc.coeffs, offset, lhs, rhs);
                    continue;
                }
                for a in lhs {
                    // rhs codes b with start <= a + b - chi < end
                    let from = rhs.partition_point(|b| b.code < start + chi - a.code);
                    let to = rhs.partition_point(|b| b.code < end + chi - a.code);
                    accumulate_block(
                        &mut acc.coeffs,
                        offset,
                        std::slice::from_ref(a),
                        &rhs[from..to],
                    );
                }
            }
        }
        out.extend(acc.into_terms().1);
        start = end;
    }
    Ok(UnivariateSeries::from_sorted_unchecked(codec, out))
}

struct DegreeBlock<'a, C> {
    /// `(total degree, term)` sorted by degree.
    terms: Vec<(i64, &'a UniTerm<C>)>,
}

fn degree_blocks<'a, C: Coefficient>(
    u: &'a UnivariateSeries<C>,
    blocks: &[Range<usize>],
) -> Result<Vec<DegreeBlock<'a, C>>> {
    let degrees = u.degrees()?;
    Ok(blocks
        .iter()
        .map(|b| {
            let mut terms: Vec<_> = b.clone().map(|i| (degrees[i], &u.terms()[i])).collect();
            terms.sort_by_key(|(d, _)| *d);
            DegreeBlock { terms }
        })
        .collect())
}

/// Dense multiplication keeping only products of total degree `<= limit`.
///
/// Within each block, terms are reordered by total degree so the inner loop
/// stops at the first pair over the limit; discarded products are never
/// computed.
pub fn multiply_dense_truncated<C: Coefficient>(
    u1: &UnivariateSeries<C>,
    u2: &UnivariateSeries<C>,
    plan: &BlockPlan,
    limit: i64,
) -> Result<UnivariateSeries<C>> {
    let codec = check_operands(u1, u2)?;
    plan.check(u1, u2)?;
    if u1.is_empty() || u2.is_empty() {
        return Ok(UnivariateSeries::from_sorted_unchecked(codec, vec![]));
    }
    let blocks1 = degree_blocks(u1, plan.first_blocks())?;
    let blocks2 = degree_blocks(u2, plan.second_blocks())?;
    let mut acc = DenseAccumulator::<C>::new(codec.clone());
    let offset = -codec.chi();
    for b1 in &blocks1 {
        for b2 in &blocks2 {
            let min2 = b2.terms[0].0;
            for &(d1, a) in &b1.terms {
                if d1 + min2 > limit {
                    break;
                }
                let base = a.code + offset;
                for &(d2, b) in &b2.terms {
                    if d1 + d2 > limit {
                        break;
                    }
                    acc.coeffs[(base + b.code) as usize].add_product(&a.coeff, &b.coeff);
                }
            }
        }
    }
    Ok(acc.into_series())
}

/// One accumulator write: its position in execution order and its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRecord {
    pub step: u64,
    pub location: i64,
}

/// Accumulator index of every product, in the order [`multiply_dense`]
/// performs them.
pub fn write_trace<C: Coefficient>(
    u1: &UnivariateSeries<C>,
    u2: &UnivariateSeries<C>,
    plan: &BlockPlan,
) -> Result<Vec<TraceRecord>> {
    let codec = check_operands(u1, u2)?;
    plan.check(u1, u2)?;
    let chi = codec.chi();
    let mut out = Vec::with_capacity(u1.len() * u2.len());
    for b1 in plan.first_blocks() {
        for b2 in plan.second_blocks() {
            for a in &u1.terms()[b1.clone()] {
                for b in &u2.terms()[b2.clone()] {
                    out.push(TraceRecord {
                        step: out.len() as u64,
                        location: a.code + b.code - chi,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Writes `step,location` rows with a header.
pub fn write_trace_csv<W: Write>(records: &[TraceRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "step,location")?;
    for r in records {
        writeln!(out, "{},{}", r.step, r.location)?;
    }
    out.flush()
}
