//! Plain-text series formats.
//!
//! Polynomials: one term per line, `coefficient e_0 e_1 … e_{m−1}`.
//! Poisson series: one term per line, `coefficient c|s j_0 j_1 … j_{m−1}`.
//! Fields are whitespace separated; blank lines and lines starting with `#`
//! are ignored.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::poisson::{Flavor, PoissonSeries, TrigTerm};
use crate::series::{LaurentPolynomial, PolyTerm};

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        (!line.is_empty() && !line.starts_with('#'))
            .then(|| (i + 1, line.split_whitespace().collect()))
    })
}

fn parse_coeff<C: Coefficient>(line: usize, field: &str) -> Result<C> {
    C::from_str(field).map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {} coefficient `{field}`", C::KIND),
    })
}

fn parse_ints(line: usize, fields: &[&str]) -> Result<Vec<i64>> {
    fields
        .iter()
        .map(|f| {
            i64::from_str(f).map_err(|_| Error::Parse {
                line,
                msg: format!("invalid integer `{f}`"),
            })
        })
        .collect()
}

fn check_width(line: usize, expected: &mut Option<usize>, found: usize) -> Result<usize> {
    match *expected {
        Some(n) if n != found => Err(Error::Parse {
            line,
            msg: format!("expected {n} variables, found {found}"),
        }),
        _ => {
            *expected = Some(found);
            Ok(found)
        }
    }
}

/// Parses a polynomial; `num_vars` is inferred from the first term when not given.
pub fn parse_polynomial<C: Coefficient>(
    text: &str,
    num_vars: Option<usize>,
) -> Result<LaurentPolynomial<C>> {
    let mut width = num_vars;
    let mut terms = Vec::new();
    for (line, fields) in data_lines(text) {
        let coeff = parse_coeff::<C>(line, fields[0])?;
        check_width(line, &mut width, fields.len() - 1)?;
        terms.push(PolyTerm::new(coeff, parse_ints(line, &fields[1..])?));
    }
    LaurentPolynomial::new(width.unwrap_or(0), terms)
}

pub fn format_polynomial<C: Coefficient>(p: &LaurentPolynomial<C>) -> String {
    let mut out = String::new();
    for t in p.terms() {
        write!(out, "{}", t.coeff).unwrap();
        for e in t.exponents.iter() {
            write!(out, " {e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_poisson<C: Coefficient>(
    text: &str,
    num_vars: Option<usize>,
) -> Result<PoissonSeries<C>> {
    let mut width = num_vars;
    let mut terms = Vec::new();
    for (line, fields) in data_lines(text) {
        if fields.len() < 2 {
            return Err(Error::Parse {
                line,
                msg: "expected `coefficient c|s multipliers...`".into(),
            });
        }
        let coeff = parse_coeff::<C>(line, fields[0])?;
        let flavor = match fields[1] {
            "c" => Flavor::Cos,
            "s" => Flavor::Sin,
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("flavor must be `c` or `s`, found `{other}`"),
                })
            }
        };
        check_width(line, &mut width, fields.len() - 2)?;
        terms.push(TrigTerm::new(
            coeff,
            parse_ints(line, &fields[2..])?,
            flavor,
        ));
    }
    PoissonSeries::new(width.unwrap_or(0), terms)
}

pub fn format_poisson<C: Coefficient>(s: &PoissonSeries<C>) -> String {
    let mut out = String::new();
    for t in s.terms() {
        write!(out, "{} {}", t.coeff, t.flavor.symbol()).unwrap();
        for j in t.multipliers.iter() {
            write!(out, " {j}").unwrap();
        }
        out.push('\n');
    }
    out
}
