use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use kronmul::bench::{
    gen_fateman, gen_mp_sparse, gen_poisson_bench, run_poisson_bench, run_polynomial_bench,
    BenchResult,
};
use kronmul::dense::{write_trace, write_trace_csv};
use kronmul::hash::{hash_write_trace, HashParams};
use kronmul::reference::{
    naive_multiply, naive_poisson_multiply, poisson_match, polynomials_match,
};
use kronmul::text::{parse_poisson, parse_polynomial};
use kronmul::{
    multiply, multiply_poisson, Algorithm, AlgorithmChoice, Coefficient, CoefficientKind, Integer,
    LaurentPolynomial, MulOptions, PoissonBackend, PoissonSeries, PreparedProduct, Rational,
};

/// Factor pairs above this many monomial products are not checked naively.
const VERIFY_PAIR_LIMIT: u64 = 10_000_000;
const DOUBLE_REL_TOL: f64 = 1e-12;

#[derive(Parser)]
#[command(
    name = "kronmul",
    version,
    about = "Sparse polynomial and Poisson series multiplication benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time one multiplication and report wall time and ccpm.
    Bench {
        benchmark: Benchmark,
        #[command(flatten)]
        run: RunArgs,
        /// CPU frequency used to convert wall time into cycles.
        #[arg(long, env = "KRONMUL_CPU_GHZ")]
        cpu_ghz: f64,
        /// Emit one JSON object per run instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Check a benchmark instance against the naive multivariate product.
    Verify {
        benchmark: Benchmark,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write the accumulator access pattern of a multiplication as CSV.
    Trace {
        benchmark: Benchmark,
        #[command(flatten)]
        run: RunArgs,
        /// Destination CSV; standard output when omitted.
        #[arg(long)]
        trace_file: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Benchmark {
    Fateman,
    MpSparse,
    Poisson,
}

impl Benchmark {
    fn name(self) -> &'static str {
        match self {
            Benchmark::Fateman => "fateman",
            Benchmark::MpSparse => "mp-sparse",
            Benchmark::Poisson => "poisson",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Auto,
    Dense,
    Hash,
}

#[derive(Args)]
struct RunArgs {
    /// Exponent of the generated factors.
    #[arg(long, default_value_t = 10)]
    n: u32,
    #[arg(long, default_value = "double")]
    coeff: CoefficientKind,
    #[arg(long, value_enum, default_value = "auto")]
    algo: Algo,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Terms per cache block.
    #[arg(long)]
    block_size: Option<usize>,
    /// Initial hash bucket count N.
    #[arg(long)]
    hash_n: Option<usize>,
    /// Hash bucket capacity m.
    #[arg(long)]
    hash_m: Option<usize>,
    /// Overflow size s that triggers a rehash.
    #[arg(long)]
    hash_s: Option<usize>,
    /// Drop product terms of total degree above this bound.
    #[arg(long)]
    truncate_degree: Option<i64>,
    /// Record written ranges in parallel runs and fail on overlap.
    #[arg(long)]
    assert_disjoint: bool,
    /// Seed of the Poisson generator; the second factor uses seed + 1.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Terms of each generated Fourier series.
    #[arg(long, default_value_t = 100)]
    terms: usize,
    /// Trigonometric variables of the generated series.
    #[arg(long, default_value_t = 4)]
    vars: usize,
    /// Multipliers are drawn from [-max-multiplier, max-multiplier].
    #[arg(long, default_value_t = 8)]
    max_multiplier: i64,
    /// Power the generated Fourier series is raised to.
    #[arg(long, default_value_t = 1)]
    power: u32,
    /// Read the two factors from text files instead of generating them.
    #[arg(long, num_args = 2, value_names = ["FIRST", "SECOND"])]
    input: Option<Vec<PathBuf>>,
}

impl RunArgs {
    fn options(&self) -> MulOptions {
        let defaults = HashParams::default();
        MulOptions {
            algorithm: match self.algo {
                Algo::Auto => AlgorithmChoice::Auto,
                Algo::Dense => AlgorithmChoice::Dense,
                Algo::Hash => AlgorithmChoice::Hash,
            },
            block_size: self.block_size,
            hash: HashParams {
                buckets: self.hash_n,
                bucket_size: self.hash_m.unwrap_or(defaults.bucket_size),
                overflow_threshold: self.hash_s,
                block_size: self.block_size,
                ..defaults
            },
            threads: self.threads,
            truncate_degree: self.truncate_degree,
            assert_disjoint: self.assert_disjoint,
            ..MulOptions::default()
        }
    }

    fn polynomials<C: Coefficient>(
        &self,
        benchmark: Benchmark,
    ) -> anyhow::Result<(LaurentPolynomial<C>, LaurentPolynomial<C>)> {
        if let Some(paths) = &self.input {
            let f = parse_polynomial(&read(&paths[0])?, None)
                .with_context(|| paths[0].display().to_string())?;
            let g = parse_polynomial(&read(&paths[1])?, Some(f.num_vars()))
                .with_context(|| paths[1].display().to_string())?;
            return Ok((f, g));
        }
        Ok(match benchmark {
            Benchmark::Fateman => gen_fateman(self.n)?,
            Benchmark::MpSparse => gen_mp_sparse(self.n)?,
            Benchmark::Poisson => unreachable!("handled by the Poisson path"),
        })
    }

    fn fourier_pair(&self) -> anyhow::Result<(PoissonSeries<f64>, PoissonSeries<f64>)> {
        if self.coeff != CoefficientKind::Double {
            bail!("the poisson benchmark uses double coefficients");
        }
        if let Some(paths) = &self.input {
            let a = parse_poisson(&read(&paths[0])?, None)
                .with_context(|| paths[0].display().to_string())?;
            let b = parse_poisson(&read(&paths[1])?, Some(a.num_vars()))
                .with_context(|| paths[1].display().to_string())?;
            return Ok((a, b));
        }
        let make =
            |seed| gen_poisson_bench(seed, self.terms, self.power, self.vars, self.max_multiplier);
        Ok((make(self.seed)?, make(self.seed.wrapping_add(1))?))
    }

    fn poisson_backend(&self) -> anyhow::Result<PoissonBackend> {
        if self.threads != 1 || self.truncate_degree.is_some() {
            bail!("Poisson multiplication is sequential and untruncated");
        }
        Ok(match self.algo {
            Algo::Auto | Algo::Dense => PoissonBackend::Dense,
            Algo::Hash => PoissonBackend::Hash,
        })
    }

    fn label(&self, benchmark: Benchmark) -> String {
        if self.input.is_some() {
            "input".to_string()
        } else if benchmark == Benchmark::Poisson {
            format!("poisson-p{}", self.power)
        } else {
            format!("{}-{}", benchmark.name(), self.n)
        }
    }
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn print_results(results: &[BenchResult], json: bool) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    if json {
        for r in results {
            writeln!(out, "{}", serde_json::to_string(r)?)?;
        }
        return Ok(());
    }
    writeln!(
        out,
        "{:<14} {:<6} {:<9} {:>3} {:>6} {:>9} {:>9} {:>10} {:>11} {:>9}",
        "benchmark", "algo", "coeff", "T", "block", "in1", "in2", "out", "seconds", "ccpm"
    )?;
    for r in results {
        writeln!(
            out,
            "{:<14} {:<6} {:<9} {:>3} {:>6} {:>9} {:>9} {:>10} {:>11.4} {:>9.3}",
            r.benchmark,
            r.algorithm,
            r.coefficient,
            r.threads,
            r.block_size,
            r.terms_in[0],
            r.terms_in[1],
            r.terms_out,
            r.wall_seconds,
            r.ccpm
        )?;
        if let Some(h) = &r.hash {
            writeln!(out, "  hash N={} m={} s={}", h.n, h.m, h.s)?;
        }
        writeln!(out, "  checksum {}", r.checksum)?;
    }
    Ok(())
}

fn bench_poly<C: Coefficient>(b: Benchmark, run: &RunArgs, hz: f64) -> anyhow::Result<BenchResult> {
    let (f, g) = run.polynomials::<C>(b)?;
    Ok(run_polynomial_bench(&run.label(b), &f, &g, &run.options(), hz)?.0)
}

fn verify_poly<C: Coefficient>(b: Benchmark, run: &RunArgs, rel_tol: f64) -> anyhow::Result<bool> {
    let (f, g) = run.polynomials::<C>(b)?;
    check_pair_budget(f.len(), g.len())?;
    let fast = multiply(&f, &g, &run.options())?;
    let mut naive = naive_multiply(&f, &g)?;
    if let Some(limit) = run.truncate_degree {
        naive = naive.truncated(limit);
    }
    let ok = polynomials_match(&fast, &naive, rel_tol);
    println!(
        "{} {}: {} terms x {} terms -> {} terms, {}",
        run.label(b),
        C::KIND,
        f.len(),
        g.len(),
        fast.len(),
        if ok {
            "matches the naive product"
        } else {
            "MISMATCH"
        }
    );
    Ok(ok)
}

fn check_pair_budget(len1: usize, len2: usize) -> anyhow::Result<()> {
    let pairs = len1 as u64 * len2 as u64;
    if pairs > VERIFY_PAIR_LIMIT {
        bail!("{pairs} monomial pairs exceed the verification limit of {VERIFY_PAIR_LIMIT}");
    }
    Ok(())
}

fn trace_poly<C: Coefficient>(
    b: Benchmark,
    run: &RunArgs,
) -> anyhow::Result<Vec<kronmul::dense::TraceRecord>> {
    let (f, g) = run.polynomials::<C>(b)?;
    let opts = run.options();
    if opts.threads != 1 || opts.truncate_degree.is_some() {
        bail!("traces follow the sequential untruncated kernels");
    }
    let prepared = PreparedProduct::new(&f, &g, &opts)?;
    Ok(match prepared.algorithm {
        Algorithm::Dense => write_trace(&prepared.lhs, &prepared.rhs, &prepared.plan)?,
        Algorithm::Hash => hash_write_trace(&prepared.lhs, &prepared.rhs, &opts.hash)?,
    })
}

macro_rules! by_coeff {
    ($kind:expr, $f:ident ( $($arg:expr),* )) => {
        match $kind {
            CoefficientKind::Double => $f::<f64>($($arg),*),
            CoefficientKind::Int => $f::<Integer>($($arg),*),
            CoefficientKind::Rational => $f::<Rational>($($arg),*),
        }
    };
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Bench {
            benchmark,
            run,
            cpu_ghz,
            json,
        } => {
            let hz = cpu_ghz * 1e9;
            let result = if benchmark == Benchmark::Poisson {
                let (a, b) = run.fourier_pair()?;
                run_poisson_bench(&run.label(benchmark), &a, &b, run.poisson_backend()?, hz)?.0
            } else {
                by_coeff!(run.coeff, bench_poly(benchmark, &run, hz))?
            };
            print_results(&[result], json)?;
            Ok(true)
        }
        Command::Verify { benchmark, run } => {
            if benchmark == Benchmark::Poisson {
                let (a, b) = run.fourier_pair()?;
                check_pair_budget(a.len(), b.len())?;
                let fast = multiply_poisson(&a, &b, run.poisson_backend()?)?;
                let ok = poisson_match(&fast, &naive_poisson_multiply(&a, &b)?, DOUBLE_REL_TOL);
                println!(
                    "{}: {} terms x {} terms -> {} terms, {}",
                    run.label(benchmark),
                    a.len(),
                    b.len(),
                    fast.len(),
                    if ok {
                        "matches the naive product"
                    } else {
                        "MISMATCH"
                    }
                );
                return Ok(ok);
            }
            let tol = if run.coeff == CoefficientKind::Double {
                DOUBLE_REL_TOL
            } else {
                0.0
            };
            by_coeff!(run.coeff, verify_poly(benchmark, &run, tol))
        }
        Command::Trace {
            benchmark,
            run,
            trace_file,
        } => {
            if benchmark == Benchmark::Poisson {
                bail!("traces cover polynomial benchmarks only");
            }
            let records = by_coeff!(run.coeff, trace_poly(benchmark, &run))?;
            match trace_file {
                Some(path) => {
                    let file = fs::File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    write_trace_csv(&records, io::BufWriter::new(file))?;
                    eprintln!("wrote {} records to {}", records.len(), path.display());
                }
                None => write_trace_csv(&records, io::stdout().lock())?,
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
