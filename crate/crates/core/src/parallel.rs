//! Shared-memory parallel dense multiplication.
//!
//! With both factors sorted, block `k` of a factor holds codes strictly below
//! those of block `k + 1`, so the products of block pairs `(a, b)` and
//! `(a + 1, b + 1)` land in disjoint accumulator ranges. The schedule gives
//! `T` threads consecutive first-factor blocks and walks them diagonally over
//! the second factor; every column of the schedule is a run of consecutive
//! diagonal pairs, and a barrier separates columns. Threads idle ("silent"
//! slots) at the wrap seam so a column never mixes wrapped and unwrapped
//! pairs.

use std::sync::Barrier;

use crate::coeff::Coefficient;
use crate::dense::{check_operands, BlockPlan, DenseAccumulator};
use crate::error::{Error, Result};
use crate::kron::Code;
use crate::series::{UniTerm, UnivariateSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockPair {
    pub first: usize,
    pub second: usize,
}

/// Per-column block assignments; `None` marks a silent slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    threads: usize,
    columns: Vec<Vec<Option<BlockPair>>>,
}

impl Schedule {
    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn columns(&self) -> &[Vec<Option<BlockPair>>] {
        &self.columns
    }

    /// Slots of thread `t` across all columns.
    pub fn thread_slots(&self, t: usize) -> Vec<Option<BlockPair>> {
        self.columns.iter().map(|c| c[t]).collect()
    }
}

/// Diagonal schedule for `first_blocks × second_blocks` block pairs on
/// `threads` threads.
///
/// First-factor blocks are taken `threads` at a time. Within such a group,
/// thread `i` starts at second-factor block `i` and advances one block per
/// column; after the last block it stays silent for `threads − 1` columns
/// and then wraps around to block 0 (stopping short of its start block). Threads without a first-factor block in
/// the last group are silent throughout, and all-silent columns are dropped.
pub fn build_schedule(
    first_blocks: usize,
    second_blocks: usize,
    threads: usize,
) -> Result<Schedule> {
    if threads == 0 {
        return Err(Error::InvalidArgument(
            "thread count must be at least 1".into(),
        ));
    }
    let mut columns = Vec::new();
    if first_blocks == 0 || second_blocks == 0 {
        return Ok(Schedule { threads, columns });
    }
    let period = second_blocks + threads - 1;
    for group in (0..first_blocks).step_by(threads) {
        for k in 0..period {
            let column: Vec<Option<BlockPair>> = (0..threads)
                .map(|i| {
                    let first = group + i;
                    if first >= first_blocks {
                        return None;
                    }
                    let p = k + i;
                    let second = if p < second_blocks {
                        p
                    } else if p < period || p - period >= second_blocks {
                        return None;
                    } else {
                        p - period
                    };
                    Some(BlockPair { first, second })
                })
                .collect();
            if column.iter().any(Option::is_some) {
                columns.push(column);
            }
        }
    }
    Ok(Schedule { threads, columns })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParallelOptions {
    pub threads: usize,
    /// Record the index range every thread actually writes in every column
    /// and fail if two ranges of one column overlap.
    pub assert_disjoint: bool,
}

impl Default for ParallelOptions {
    fn default() -> Self {
        ParallelOptions {
            threads: 1,
            assert_disjoint: false,
        }
    }
}

/// Pointer to the shared accumulator slots.
struct SharedSlots<C> {
    ptr: *mut C,
    len: usize,
}

// SAFETY: threads only write through the pointer at indices that the
// schedule check below proved pairwise disjoint within a column, and columns
// are separated by a barrier.
unsafe impl<C: Send> Sync for SharedSlots<C> {}
unsafe impl<C: Send> Send for SharedSlots<C> {}

type Span = Option<(Code, Code)>;

fn block_bounds<C>(terms: &[UniTerm<C>], blocks: &[std::ops::Range<usize>]) -> Vec<(Code, Code)> {
    blocks
        .iter()
        .map(|b| (terms[b.start].code, terms[b.end - 1].code))
        .collect()
}

fn overlapping(mut spans: Vec<(Code, Code)>) -> bool {
    spans.sort_unstable();
    spans.windows(2).any(|w| w[1].0 <= w[0].1)
}

/// Dense product computed by `options.threads` threads following
/// [`build_schedule`]. Equal to [`crate::dense::multiply_dense`] for exact
/// rings.
pub fn multiply_dense_parallel<C: Coefficient>(
    u1: &UnivariateSeries<C>,
    u2: &UnivariateSeries<C>,
    plan: &BlockPlan,
    options: &ParallelOptions,
) -> Result<UnivariateSeries<C>> {
    let codec = check_operands(u1, u2)?;
    plan.check(u1, u2)?;
    let threads = options.threads;
    let schedule = build_schedule(
        plan.first_blocks().len(),
        plan.second_blocks().len(),
        threads,
    )?;
    let chi = codec.chi();
    let (t1, t2) = (u1.terms(), u2.terms());
    let bounds1 = block_bounds(t1, plan.first_blocks());
    let bounds2 = block_bounds(t2, plan.second_blocks());
    let span_of = |p: &BlockPair| {
        let (lo1, hi1) = bounds1[p.first];
        let (lo2, hi2) = bounds2[p.second];
        (lo1 + lo2 - chi, hi1 + hi2 - chi)
    };

    // Every write of a pair falls in its span, so disjoint spans per column
    // make the unsynchronized writes below race-free.
    for (c, column) in schedule.columns().iter().enumerate() {
        if overlapping(column.iter().flatten().map(span_of).collect()) {
            return Err(Error::DisjointnessViolation { column: c });
        }
    }

    let mut acc = DenseAccumulator::<C>::new(codec.clone());
    let slots = acc.slots_mut();
    let shared = SharedSlots {
        ptr: slots.as_mut_ptr(),
        len: slots.len(),
    };
    let barrier = Barrier::new(threads);
    let record = options.assert_disjoint;

    let written: Vec<Vec<Span>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let (schedule, shared, barrier, plan) = (&schedule, &shared, &barrier, plan);
                scope.spawn(move || {
                    let mut spans =
                        Vec::with_capacity(if record { schedule.columns().len() } else { 0 });
                    for column in schedule.columns() {
                        let mut span: Span = None;
                        if let Some(pair) = column[t] {
                            let lhs = &t1[plan.first_blocks()[pair.first].clone()];
                            let rhs = &t2[plan.second_blocks()[pair.second].clone()];
                            for a in lhs {
                                let base = a.code - chi;
                                for b in rhs {
                                    let idx = base + b.code;
                                    debug_assert!((idx as usize) < shared.len);
                                    // SAFETY: idx lies in this pair's span, which no other
                                    // thread of the column touches.
                                    unsafe {
                                        (*shared.ptr.add(idx as usize))
                                            .add_product(&a.coeff, &b.coeff)
                                    };
                                    if record {
                                        span = Some(span.map_or((idx, idx), |(lo, hi)| {
                                            (lo.min(idx), hi.max(idx))
                                        }));
                                    }
                                }
                            }
                        }
                        if record {
                            spans.push(span);
                        }
                        barrier.wait();
                    }
                    spans
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });

    if record {
        for c in 0..schedule.columns().len() {
            if overlapping(written.iter().filter_map(|w| w[c]).collect()) {
                return Err(Error::DisjointnessViolation { column: c });
            }
        }
    }
    Ok(acc.into_series())
}
