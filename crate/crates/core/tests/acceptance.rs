//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the report is printed even when output capture
//! is on; exits non-zero when any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{binomial, dict_product, dict_truncate, random_poly, to_dict};
use kronmul::bench::{ccpm, gen_fateman, gen_mp_sparse, run_polynomial_bench};
use kronmul::hash::{BucketTable, HashParams};
use kronmul::kron::{Codec, RangeSpec};
use kronmul::poisson::random_fourier_series;
use kronmul::series::from_univariate;
use kronmul::{
    multiply, multiply_poisson, Algorithm, AlgorithmChoice, Integer, MulOptions, PoissonBackend,
    PoissonSeries, PreparedProduct, Rational, TrigTerm,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion: pass flag and a one-line detail.
type Outcome = (bool, String);

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (
        elapsed < limit,
        format!("{:.2}s of {}s", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn kronecker() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0usize;
    for _ in 0..100_000 {
        let m = rng.gen_range(1..=6);
        let min: Vec<i64> = (0..m).map(|_| rng.gen_range(-30..=10)).collect();
        let max: Vec<i64> = min.iter().map(|lo| lo + rng.gen_range(0..=40)).collect();
        let codec = Codec::new(RangeSpec::new(min.clone(), max.clone()).unwrap()).unwrap();
        let e: Vec<i64> = min
            .iter()
            .zip(&max)
            .map(|(lo, hi)| rng.gen_range(*lo..=*hi))
            .collect();
        let code = codec.encode(&e).unwrap();
        if codec.decode(code).unwrap().to_vec() != e || !(0..codec.capacity()).contains(&code) {
            bad += 1;
        }
    }
    // symmetric box [-2B, 2B] holds sums and negations of points in [-B, B]
    for _ in 0..10_000 {
        let m = rng.gen_range(1..=5);
        let bound: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=20)).collect();
        let lo: Vec<i64> = bound.iter().map(|b| -2 * b).collect();
        let hi: Vec<i64> = bound.iter().map(|b| 2 * b).collect();
        let codec = Codec::new(RangeSpec::new(lo, hi).unwrap()).unwrap();
        let pick = |rng: &mut ChaCha8Rng| {
            bound
                .iter()
                .map(|b| rng.gen_range(-b..=*b))
                .collect::<Vec<i64>>()
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let neg: Vec<i64> = a.iter().map(|x| -x).collect();
        let raw = |e: &[i64]| codec.raw_code(e).unwrap();
        if raw(&sum) != raw(&a) + raw(&b) || raw(&neg) != -raw(&a) {
            bad += 1;
        }
    }
    // multiindex (x, y, z) = (3, 1, 0), each exponent in [0, 3]
    let table = Codec::new(RangeSpec::uniform(3, 0, 3).unwrap()).unwrap();
    let row = table.encode(&[3, 1, 0]).unwrap();
    let (cx, cy) = (
        table.raw_code(&[3, 0, 0]).unwrap(),
        table.raw_code(&[0, 1, 0]).unwrap(),
    );
    let paper_ok = row == 7 && (cx, cy) == (3, 4) && cx + cy == 7;
    let (fast, time) = within(start.elapsed(), Duration::from_secs(10));
    (
        bad == 0 && paper_ok && fast,
        format!("{bad} failures in 1e5 roundtrips + 1e4 pairs; (0,1,3)->{row}, {cx}+{cy}; {time}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = Vec::new();
    for instance in 0..200 {
        let m = rng.gen_range(1..=4);
        let f = random_poly(&mut rng, m, 50, 5);
        let g = random_poly(&mut rng, m, 50, 5);
        let expected = dict_product(&to_dict(&f), &to_dict(&g));
        let limit = rng.gen_range(-10..=10);
        let block = Some(rng.gen_range(1..=8));
        let runs = [
            ("dense", AlgorithmChoice::Dense, 1, None),
            ("hash", AlgorithmChoice::Hash, 1, None),
            ("truncated", AlgorithmChoice::Dense, 1, Some(limit)),
            ("parallel T=2", AlgorithmChoice::Dense, 2, None),
            ("parallel T=4", AlgorithmChoice::Dense, 4, None),
        ];
        for (name, algorithm, threads, truncate_degree) in runs {
            let opts = MulOptions {
                algorithm,
                threads,
                truncate_degree,
                block_size: block,
                assert_disjoint: threads > 1,
                ..MulOptions::default()
            };
            let want = match truncate_degree {
                Some(l) => dict_truncate(&expected, l),
                None => expected.clone(),
            };
            if to_dict(&multiply(&f, &g, &opts).unwrap()) != want {
                mismatches.push(format!("#{instance} {name}"));
            }
        }
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(120));
    (
        mismatches.is_empty() && fast,
        format!(
            "200 instances x 5 routes, mismatches: {:?}; {time}",
            mismatches
        ),
    )
}

/// Fateman shape checks; also returns the n = 30 factor density and wall time.
fn fateman_shapes() -> (Outcome, f64, f64) {
    let mut small_ok = true;
    for n in 1..=6u32 {
        let (f, g) = gen_fateman::<Integer>(n).unwrap();
        let p = multiply(&f, &g, &MulOptions::default()).unwrap();
        small_ok &= p.len() as u64 == binomial(2 * n as u64 + 4, 4)
            && to_dict(&p) == dict_product(&to_dict(&f), &to_dict(&g));
    }
    let (f15, g15) = gen_fateman::<f64>(15).unwrap();
    let p15 = multiply(&f15, &g15, &MulOptions::default()).unwrap();
    let (f, g) = gen_fateman::<f64>(30).unwrap();
    let (bench, _) =
        run_polynomial_bench("fateman-30", &f, &g, &MulOptions::default(), 1e9).unwrap();
    let ok = small_ok
        && f15.len() == 3876
        && p15.len() == 46376
        && f.len() == 46376
        && bench.terms_out == 635376;
    let detail = format!(
        "n=30: {} -> {} terms; n=15: {} -> {} terms; oracle n<=6 {}",
        f.len(),
        bench.terms_out,
        f15.len(),
        p15.len(),
        if small_ok { "ok" } else { "MISMATCH" }
    );
    ((ok, detail), bench.max_density, bench.wall_seconds)
}

fn mp_sparse_shapes() -> Outcome {
    let (f, g) = gen_mp_sparse::<Integer>(12).unwrap();
    let auto = PreparedProduct::new(&f, &g, &MulOptions::default()).unwrap();
    let hashed = auto.run(&MulOptions::default()).unwrap();
    let dense_opts = MulOptions {
        algorithm: AlgorithmChoice::Dense,
        ..MulOptions::default()
    };
    let forced = PreparedProduct::new(&f, &g, &dense_opts).unwrap();
    let dense = forced.run(&dense_opts).unwrap();
    let equal = hashed.terms() == dense.terms();
    let out = from_univariate(&hashed).unwrap().len();
    (
        f.len() == 6188 && g.len() == 6188 && auto.algorithm == Algorithm::Hash && equal,
        format!(
            "factors {} / {}; auto -> {}; hash and dense (windowed, capacity {}) outputs {} ({out} terms)",
            f.len(),
            g.len(),
            auto.algorithm,
            forced.codec.capacity(),
            if equal { "identical" } else { "DIFFER" }
        ),
    )
}

fn density(d: f64) -> Outcome {
    (
        (1.0 / 350.0..=1.0 / 250.0).contains(&d),
        format!("one term per {:.1} slots", 1.0 / d),
    )
}

fn ccpm_check(fateman_seconds: f64) -> Outcome {
    let v = ccpm(4.29, 2.4e9, 46376, 46376);
    (
        (v - 4.8).abs() <= 0.05,
        format!(
            "ccpm {v:.3}; informational: Fateman n=30 double kernel {fateman_seconds:.2}s ({} 60s)",
            if fateman_seconds < 60.0 { "<" } else { ">=" }
        ),
    )
}

fn parallel_determinism() -> Outcome {
    let (f, g) = gen_fateman::<Integer>(10).unwrap();
    let mut outputs = Vec::new();
    let mut times = Vec::new();
    for threads in [1, 2, 4] {
        let opts = MulOptions {
            algorithm: AlgorithmChoice::Dense,
            threads,
            assert_disjoint: true,
            ..MulOptions::default()
        };
        let start = Instant::now();
        outputs.push(multiply(&f, &g, &opts));
        times.push(start.elapsed().as_secs_f64());
    }
    let all_ok = outputs.iter().all(Result::is_ok);
    let identical = all_ok
        && outputs
            .windows(2)
            .all(|w| w[0].as_ref().unwrap() == w[1].as_ref().unwrap());
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let soft = if cores >= 2 {
        format!("speedup T=2 {:.2} (soft target 1.4)", times[0] / times[1])
    } else {
        format!("speedup not applicable: {cores} core available")
    };
    (
        identical,
        format!(
            "T=1,2,4 {}; disjointness checks {}; {soft}",
            if identical { "identical" } else { "DIFFER" },
            if all_ok { "quiet" } else { "FIRED" }
        ),
    )
}

fn poisson_homomorphism() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for pair in 0..50u64 {
        let vars = rng.gen_range(1..=4);
        let terms = rng.gen_range(1..=100).min(15usize.pow(vars as u32));
        let a = random_fourier_series(2 * pair, vars, terms, 7).unwrap();
        let b = random_fourier_series(2 * pair + 1, vars, terms, 7).unwrap();
        let p = multiply_poisson(&a, &b, PoissonBackend::Dense).unwrap();
        for _ in 0..20 {
            let theta: Vec<f64> = (0..vars).map(|_| rng.gen_range(-3.2..3.2)).collect();
            let expect = a.evaluate(&theta) * b.evaluate(&theta);
            worst = worst.max((p.evaluate(&theta) - expect).abs() / (1.0 + expect.abs()));
        }
    }
    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let series = |v: usize, t: Vec<TrigTerm<Rational>>| PoissonSeries::new(v, t).unwrap();
    let mul = |a: &PoissonSeries<Rational>, b: &PoissonSeries<Rational>| {
        multiply_poisson(a, b, PoissonBackend::Dense).unwrap()
    };
    let cos_y = series(1, vec![TrigTerm::cos(r(1, 1), [1])]);
    let sin_y = series(1, vec![TrigTerm::sin(r(1, 1), [1])]);
    let cos_cos = mul(&cos_y, &cos_y)
        == series(
            1,
            vec![TrigTerm::cos(r(1, 2), [0]), TrigTerm::cos(r(1, 2), [2])],
        );
    let sin_cos = mul(&sin_y, &cos_y) == series(1, vec![TrigTerm::sin(r(1, 2), [2])]);
    let negative = mul(
        &series(2, vec![TrigTerm::cos(r(1, 1), [1, -1])]),
        &series(2, vec![TrigTerm::sin(r(1, 1), [1, 1])]),
    ) == series(
        2,
        vec![
            TrigTerm::sin(r(1, 2), [2, 0]),
            TrigTerm::sin(r(1, 2), [0, 2]),
        ],
    );
    let (fast, time) = within(start.elapsed(), Duration::from_secs(30));
    (
        worst <= 1e-9 && cos_cos && sin_cos && negative && fast,
        format!(
            "worst relative error {worst:.2e}; hand cases {cos_cos}/{sin_cos}/{negative}; {time}"
        ),
    )
}

fn hash_conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    for _ in 0..300 {
        let (n, m, s) = (
            rng.gen_range(1..=8),
            rng.gen_range(1..=4),
            rng.gen_range(1..=6),
        );
        let mut table = BucketTable::<Integer>::new(n, m, s).unwrap();
        let mut model = std::collections::HashMap::<i64, Integer>::new();
        for _ in 0..rng.gen_range(0..400) {
            let code = rng.gen_range(0..60) * n as i64;
            let v = rng.gen_range(-5i64..=5);
            table.insert(code, &Integer::from(v));
            *model.entry(code).or_default() += v;
            if table.needs_rehash() {
                table.rehash();
            }
        }
        model.retain(|_, c| *c != Integer::from(0));
        if !table.check_placement() || table.to_map() != model {
            violations += 1;
        }
    }
    let f = random_poly(&mut rng, 3, 50, 5);
    let g = random_poly(&mut rng, 3, 50, 5);
    let expected = dict_product(&to_dict(&f), &to_dict(&g));
    let mut grid_bad = 0;
    for n in [1, 16, 256] {
        for m in [1, 4, 8] {
            for s in [1, 8, 64] {
                let opts = MulOptions {
                    algorithm: AlgorithmChoice::Hash,
                    hash: HashParams {
                        buckets: Some(n),
                        bucket_size: m,
                        overflow_threshold: Some(s),
                        ..HashParams::default()
                    },
                    ..MulOptions::default()
                };
                if to_dict(&multiply(&f, &g, &opts).unwrap()) != expected {
                    grid_bad += 1;
                }
            }
        }
    }
    (
        violations == 0 && grid_bad == 0,
        format!("{violations} of 300 single-bucket streams diverged; {grid_bad} of 27 (N,m,s) settings differ"),
    )
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        (false, format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "Kronecker properties", guarded(kronecker)));
    results.push((2, "oracle equivalence", guarded(oracle_equivalence)));
    let shapes = catch_unwind(fateman_shapes);
    let (fateman, dens, secs) = match shapes {
        Ok(v) => v,
        Err(_) => ((false, "panicked".into()), f64::NAN, f64::NAN),
    };
    results.push((3, "Fateman shapes", fateman));
    results.push((4, "MP-sparse shapes", guarded(mp_sparse_shapes)));
    results.push((5, "Fateman density", guarded(|| density(dens))));
    results.push((6, "ccpm formula", guarded(|| ccpm_check(secs))));
    results.push((7, "parallel determinism", guarded(parallel_determinism)));
    results.push((8, "Poisson homomorphism", guarded(poisson_homomorphism)));
    results.push((9, "hash conservation", guarded(hash_conservation)));

    let mut failed = 0;
    for (id, name, (ok, detail)) in &results {
        println!(
            "criterion {id} [{name}]: {} - {detail}",
            if *ok { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!ok);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
