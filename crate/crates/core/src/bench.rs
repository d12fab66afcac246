//! Benchmark inputs and timed runs.

use std::time::Instant;

use serde::Serialize;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::multiply::{power, MulOptions, PreparedProduct};
use crate::poisson::{multiply_poisson, random_fourier_series, PoissonBackend, PoissonSeries};
use crate::series::{from_univariate, Algorithm, LaurentPolynomial, PolyTerm};

fn sparse_base<C: Coefficient>(
    num_vars: usize,
    terms: &[(i64, usize, i64)],
) -> Result<LaurentPolynomial<C>> {
    let mut out = vec![PolyTerm::new(C::one(), vec![0; num_vars])];
    for &(c, var, e) in terms {
        let mut exps = vec![0; num_vars];
        exps[var] = e;
        out.push(PolyTerm::new(C::from_i64(c), exps));
    }
    LaurentPolynomial::new(num_vars, out)
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "benchmark exponent must be at least 1".into(),
        ));
    }
    Ok(())
}

/// `f = (1 + x + y + z + t)^n`, `g = f + 1`.
pub fn gen_fateman<C: Coefficient>(n: u32) -> Result<(LaurentPolynomial<C>, LaurentPolynomial<C>)> {
    check_n(n)?;
    let base = sparse_base::<C>(4, &[(1, 0, 1), (1, 1, 1), (1, 2, 1), (1, 3, 1)])?;
    let f = power(&base, n, &MulOptions::default())?;
    let g = f.add(&LaurentPolynomial::constant(4, C::one()))?;
    Ok((f, g))
}

/// `f = (1 + x + y + 2z² + 3t³ + 5u⁵)^n`, `g = (1 + u + t + 2z² + 3y³ + 5x⁵)^n`
/// over the variables `(x, y, z, t, u)`.
pub fn gen_mp_sparse<C: Coefficient>(
    n: u32,
) -> Result<(LaurentPolynomial<C>, LaurentPolynomial<C>)> {
    check_n(n)?;
    let fb = sparse_base::<C>(5, &[(1, 0, 1), (1, 1, 1), (2, 2, 2), (3, 3, 3), (5, 4, 5)])?;
    let gb = sparse_base::<C>(5, &[(1, 4, 1), (1, 3, 1), (2, 2, 2), (3, 1, 3), (5, 0, 5)])?;
    let opts = MulOptions::default();
    Ok((power(&fb, n, &opts)?, power(&gb, n, &opts)?))
}

/// A random Fourier series raised to `power`.
pub fn gen_poisson_bench(
    seed: u64,
    terms: usize,
    power: u32,
    num_vars: usize,
    max_multiplier: i64,
) -> Result<PoissonSeries<f64>> {
    check_n(power)?;
    let base = random_fourier_series(seed, num_vars, terms, max_multiplier)?;
    let mut out = base.clone();
    for _ in 1..power {
        out = multiply_poisson(&out, &base, PoissonBackend::Dense)?;
    }
    Ok(out)
}

/// Clock cycles per monomial pair.
pub fn ccpm(wall_seconds: f64, cpu_hz: f64, terms1: usize, terms2: usize) -> f64 {
    wall_seconds * cpu_hz / (terms1 as f64 * terms2 as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HashGeometry {
    pub n: usize,
    pub m: usize,
    pub s: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub benchmark: String,
    pub algorithm: Algorithm,
    pub coefficient: &'static str,
    pub threads: usize,
    pub block_size: usize,
    /// Initial table geometry; present for hash runs.
    pub hash: Option<HashGeometry>,
    pub terms_in: [usize; 2],
    pub terms_out: usize,
    pub max_density: f64,
    pub wall_seconds: f64,
    pub ccpm: f64,
    pub cpu_hz: f64,
    /// Sum of the output coefficients.
    pub checksum: String,
}

fn validate(cpu_hz: f64, len1: usize, len2: usize) -> Result<()> {
    if !(cpu_hz.is_finite() && cpu_hz > 0.0) {
        return Err(Error::InvalidArgument(
            "cpu frequency must be positive".into(),
        ));
    }
    if len1 == 0 || len2 == 0 {
        return Err(Error::InvalidArgument(
            "benchmark factors must be non-empty".into(),
        ));
    }
    Ok(())
}

fn checksum<'a, C: Coefficient>(coeffs: impl Iterator<Item = &'a C>) -> String {
    let mut sum = C::zero();
    for c in coeffs {
        sum.add_assign_ref(c);
    }
    sum.to_string()
}

/// Times `f · g` (kernel only: encoding happens before the clock starts and
/// decoding after it stops).
pub fn run_polynomial_bench<C: Coefficient>(
    name: &str,
    f: &LaurentPolynomial<C>,
    g: &LaurentPolynomial<C>,
    options: &MulOptions,
    cpu_hz: f64,
) -> Result<(BenchResult, LaurentPolynomial<C>)> {
    validate(cpu_hz, f.len(), g.len())?;
    let prepared = PreparedProduct::new(f, g, options)?;
    let start = Instant::now();
    let product = prepared.run(options)?;
    let wall = start.elapsed().as_secs_f64();
    let result = from_univariate(&product)?;
    let hash = (prepared.algorithm == Algorithm::Hash).then(|| {
        let (n, m, s) = options.hash.resolve(f.len(), g.len());
        HashGeometry { n, m, s }
    });
    let block_size = match prepared.algorithm {
        Algorithm::Hash => options
            .hash
            .block_size
            .unwrap_or(prepared.plan.block_size()),
        Algorithm::Dense => prepared.plan.block_size(),
    };
    let bench = BenchResult {
        benchmark: name.to_string(),
        algorithm: prepared.algorithm,
        coefficient: C::KIND,
        threads: options.threads,
        block_size,
        hash,
        terms_in: [f.len(), g.len()],
        terms_out: result.len(),
        max_density: prepared.report.max_density(),
        wall_seconds: wall,
        ccpm: ccpm(wall, cpu_hz, f.len(), g.len()),
        cpu_hz,
        checksum: checksum(result.terms().iter().map(|t| &t.coeff)),
    };
    Ok((bench, result))
}

pub fn run_poisson_bench(
    name: &str,
    s1: &PoissonSeries<f64>,
    s2: &PoissonSeries<f64>,
    backend: PoissonBackend,
    cpu_hz: f64,
) -> Result<(BenchResult, PoissonSeries<f64>)> {
    validate(cpu_hz, s1.len(), s2.len())?;
    let start = Instant::now();
    let product = multiply_poisson(s1, s2, backend)?;
    let wall = start.elapsed().as_secs_f64();
    let algorithm = match backend {
        PoissonBackend::Dense => Algorithm::Dense,
        PoissonBackend::Hash => Algorithm::Hash,
    };
    let bench = BenchResult {
        benchmark: name.to_string(),
        algorithm,
        coefficient: f64::KIND,
        threads: 1,
        block_size: 0,
        hash: None,
        terms_in: [s1.len(), s2.len()],
        terms_out: product.len(),
        max_density: 0.0,
        wall_seconds: wall,
        ccpm: ccpm(wall, cpu_hz, s1.len(), s2.len()),
        cpu_hz,
        checksum: checksum(product.terms().iter().map(|t| &t.coeff)),
    };
    Ok((bench, product))
}
