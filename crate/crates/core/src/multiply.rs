//! Polynomial multiplication front end: codec construction, algorithm
//! selection and kernel dispatch.

use std::sync::Arc;

use crate::coeff::Coefficient;
use crate::dense::{
    multiply_dense, multiply_dense_segmented, multiply_dense_truncated, BlockPlan, DEFAULT_L2_BYTES,
};
use crate::error::{Error, Result};
use crate::hash::{multiply_hash, HashParams};
use crate::kron::Codec;
use crate::parallel::{multiply_dense_parallel, ParallelOptions};
use crate::series::{
    density_for_codec, from_univariate, product_codec, select_algorithm, to_univariate, Algorithm,
    DensityReport, LaurentPolynomial, SelectionPolicy, UnivariateSeries,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlgorithmChoice {
    #[default]
    Auto,
    Dense,
    Hash,
}

impl std::str::FromStr for AlgorithmChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(AlgorithmChoice::Auto),
            "dense" => Ok(AlgorithmChoice::Dense),
            "hash" => Ok(AlgorithmChoice::Hash),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulOptions {
    pub algorithm: AlgorithmChoice,
    /// Defaults to [`SelectionPolicy::for_coefficient`].
    pub policy: Option<SelectionPolicy>,
    /// Terms per block; defaults to the cache rule of [`BlockPlan::for_series`].
    pub block_size: Option<usize>,
    pub cache_bytes: usize,
    pub hash: HashParams,
    pub threads: usize,
    pub truncate_degree: Option<i64>,
    pub assert_disjoint: bool,
}

impl Default for MulOptions {
    fn default() -> Self {
        MulOptions {
            algorithm: AlgorithmChoice::Auto,
            policy: None,
            block_size: None,
            cache_bytes: DEFAULT_L2_BYTES,
            hash: HashParams::default(),
            threads: 1,
            truncate_degree: None,
            assert_disjoint: false,
        }
    }
}

/// Factors encoded with their product codec, ready for a kernel run.
#[derive(Debug, Clone)]
pub struct PreparedProduct<C> {
    pub codec: Arc<Codec>,
    pub lhs: UnivariateSeries<C>,
    pub rhs: UnivariateSeries<C>,
    pub report: DensityReport,
    pub algorithm: Algorithm,
    pub plan: BlockPlan,
    policy: SelectionPolicy,
}

impl<C: Coefficient> PreparedProduct<C> {
    pub fn new(
        p1: &LaurentPolynomial<C>,
        p2: &LaurentPolynomial<C>,
        options: &MulOptions,
    ) -> Result<Self> {
        let codec = product_codec(p1, p2)?;
        let lhs = to_univariate(p1, &codec)?;
        let rhs = to_univariate(p2, &codec)?;
        let report = density_for_codec(&codec, lhs.len(), rhs.len());
        let policy = options
            .policy
            .unwrap_or_else(SelectionPolicy::for_coefficient::<C>);
        let algorithm = match (options.algorithm, options.truncate_degree) {
            (AlgorithmChoice::Hash, Some(_)) => {
                return Err(Error::InvalidArgument(
                    "degree truncation runs on the dense kernel".into(),
                ))
            }
            (_, Some(_)) | (AlgorithmChoice::Dense, None) => Algorithm::Dense,
            (AlgorithmChoice::Hash, None) => Algorithm::Hash,
            (AlgorithmChoice::Auto, None) => select_algorithm(&report, &policy),
        };
        if options.threads == 0 {
            return Err(Error::InvalidArgument(
                "thread count must be at least 1".into(),
            ));
        }
        if options.threads > 1 && algorithm == Algorithm::Hash {
            return Err(Error::InvalidArgument(
                "the hash kernel is sequential; use --threads 1".into(),
            ));
        }
        let plan = match options.block_size {
            Some(b) => BlockPlan::new(b, lhs.len(), rhs.len()),
            None => BlockPlan::for_series(&lhs, &rhs, options.cache_bytes),
        };
        Ok(PreparedProduct {
            codec,
            lhs,
            rhs,
            report,
            algorithm,
            plan,
            policy,
        })
    }

    fn fits_budget(&self) -> bool {
        self.codec.capacity() as u64 <= self.policy.max_dense_slots()
    }

    /// Runs the selected kernel.
    pub fn run(&self, options: &MulOptions) -> Result<UnivariateSeries<C>> {
        let (u1, u2, plan) = (&self.lhs, &self.rhs, &self.plan);
        match self.algorithm {
            Algorithm::Hash => multiply_hash(u1, u2, &options.hash),
            Algorithm::Dense => {
                if let Some(limit) = options.truncate_degree {
                    self.require_full_array("degree truncation")?;
                    multiply_dense_truncated(u1, u2, plan, limit)
                } else if options.threads > 1 {
                    self.require_full_array("parallel multiplication")?;
                    let par = ParallelOptions {
                        threads: options.threads,
                        assert_disjoint: options.assert_disjoint,
                    };
                    multiply_dense_parallel(u1, u2, plan, &par)
                } else if self.fits_budget() {
                    multiply_dense(u1, u2, plan)
                } else {
                    let slots =
                        self.policy.max_dense_slots().max(1).min(usize::MAX as u64) as usize;
                    multiply_dense_segmented(u1, u2, plan, slots)
                }
            }
        }
    }

    fn require_full_array(&self, what: &str) -> Result<()> {
        if self.fits_budget() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "{what} needs a dense array of {} slots, over the memory budget",
                self.codec.capacity()
            )))
        }
    }
}

/// Multiplies two Laurent polynomials.
pub fn multiply<C: Coefficient>(
    p1: &LaurentPolynomial<C>,
    p2: &LaurentPolynomial<C>,
    options: &MulOptions,
) -> Result<LaurentPolynomial<C>> {
    let prepared = PreparedProduct::new(p1, p2, options)?;
    from_univariate(&prepared.run(options)?)
}

/// `p^exponent` by repeated squaring.
pub fn power<C: Coefficient>(
    p: &LaurentPolynomial<C>,
    exponent: u32,
    options: &MulOptions,
) -> Result<LaurentPolynomial<C>> {
    let mut result = LaurentPolynomial::constant(p.num_vars(), C::one());
    let mut base = p.clone();
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            result = multiply(&result, &base, options)?;
        }
        e >>= 1;
        if e > 0 {
            base = multiply(&base, &base, options)?;
        }
    }
    Ok(result)
}
