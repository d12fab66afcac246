mod common;

use common::{binomial, brute_power, dict_product, to_dict};
use kronmul::bench::{gen_fateman, gen_mp_sparse, gen_poisson_bench, run_polynomial_bench};
use kronmul::text::{format_polynomial, parse_polynomial};
use kronmul::{multiply, Algorithm, AlgorithmChoice, Integer, MulOptions};

fn fateman_base() -> Vec<(i64, Vec<i64>)> {
    let mut base = vec![(1, vec![0, 0, 0, 0])];
    for v in 0..4 {
        let mut e = vec![0; 4];
        e[v] = 1;
        base.push((1, e));
    }
    base
}

#[test]
fn fateman_factors_match_brute_expansion() {
    for n in 1..=6 {
        let (f, g) = gen_fateman::<Integer>(n).unwrap();
        assert_eq!(to_dict(&f), brute_power(4, &fateman_base(), n));
        assert_eq!(f.len() as u64, binomial(n as u64 + 4, 4));
        assert_eq!(g.len(), f.len());
    }
}

#[test]
fn fateman_products_match_schoolbook() {
    for n in 1..=6u32 {
        let (f, g) = gen_fateman::<Integer>(n).unwrap();
        let p = multiply(&f, &g, &MulOptions::default()).unwrap();
        assert_eq!(
            to_dict(&p),
            dict_product(&to_dict(&f), &to_dict(&g)),
            "n={n}"
        );
        assert_eq!(p.len() as u64, binomial(2 * n as u64 + 4, 4));
    }
}

#[test]
fn fateman_fifteen_counts() {
    let (f, g) = gen_fateman::<f64>(15).unwrap();
    assert_eq!(f.len(), 3876);
    let p = multiply(&f, &g, &MulOptions::default()).unwrap();
    assert_eq!(p.len(), 46376);
}

#[test]
fn mp_sparse_four_matches_brute_expansion() {
    let fb = vec![
        (1, vec![0, 0, 0, 0, 0]),
        (1, vec![1, 0, 0, 0, 0]),
        (1, vec![0, 1, 0, 0, 0]),
        (2, vec![0, 0, 2, 0, 0]),
        (3, vec![0, 0, 0, 3, 0]),
        (5, vec![0, 0, 0, 0, 5]),
    ];
    let gb = vec![
        (1, vec![0, 0, 0, 0, 0]),
        (1, vec![0, 0, 0, 0, 1]),
        (1, vec![0, 0, 0, 1, 0]),
        (2, vec![0, 0, 2, 0, 0]),
        (3, vec![0, 3, 0, 0, 0]),
        (5, vec![5, 0, 0, 0, 0]),
    ];
    let (f, g) = gen_mp_sparse::<Integer>(4).unwrap();
    let (ef, eg) = (brute_power(5, &fb, 4), brute_power(5, &gb, 4));
    assert_eq!(to_dict(&f), ef);
    assert_eq!(to_dict(&g), eg);
    assert_eq!(f.len() as u64, binomial(4 + 5, 5));
    for algorithm in [AlgorithmChoice::Dense, AlgorithmChoice::Hash] {
        let opts = MulOptions {
            algorithm,
            ..MulOptions::default()
        };
        assert_eq!(
            to_dict(&multiply(&f, &g, &opts).unwrap()),
            dict_product(&ef, &eg)
        );
    }
}

#[test]
fn auto_selection_on_both_shapes() {
    let (f, g) = gen_fateman::<f64>(8).unwrap();
    let (r, _) = run_polynomial_bench("fateman", &f, &g, &MulOptions::default(), 1e9).unwrap();
    assert_eq!(r.algorithm, Algorithm::Dense);
    let (f, g) = gen_mp_sparse::<f64>(8).unwrap();
    let (r, _) = run_polynomial_bench("mp-sparse", &f, &g, &MulOptions::default(), 1e9).unwrap();
    assert_eq!(r.algorithm, Algorithm::Hash);
}

#[test]
fn exact_runs_are_deterministic() {
    let (f, g) = gen_mp_sparse::<Integer>(5).unwrap();
    let run = || {
        run_polynomial_bench("mp", &f, &g, &MulOptions::default(), 1e9)
            .unwrap()
            .0
    };
    let (a, b) = (run(), run());
    assert_eq!((a.terms_out, &a.checksum), (b.terms_out, &b.checksum));
}

#[test]
fn generated_inputs_roundtrip_through_text() {
    let (f, _) = gen_mp_sparse::<Integer>(3).unwrap();
    assert_eq!(
        parse_polynomial::<Integer>(&format_polynomial(&f), Some(5)).unwrap(),
        f
    );
}

#[test]
fn poisson_generator_is_reproducible() {
    let a = gen_poisson_bench(42, 25, 2, 3, 4).unwrap();
    assert_eq!(a, gen_poisson_bench(42, 25, 2, 3, 4).unwrap());
}
