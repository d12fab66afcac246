//! Sparse multiplication of multivariate Laurent polynomials and Poisson
//! series via Kronecker substitution.
//!
//! Multivariate exponents are packed into one integer code ([`kron`]), the
//! factors become sorted univariate series ([`series`]), and the product runs
//! on a dense lookup array ([`dense`], [`parallel`]) or a bucketized hash
//! table ([`hash`]). [`multiply()`] picks between them from the predicted
//! density.

pub mod bench;
pub mod coeff;
pub mod dense;
pub mod error;
pub mod hash;
pub mod kron;
pub mod multiply;
pub mod parallel;
pub mod poisson;
pub mod reference;
pub mod series;
pub mod text;

pub use coeff::{Coefficient, CoefficientKind, Integer, Rational};
pub use error::{Error, Result};
pub use kron::{Code, Codec, Multiindex, ProductMode, RangeSpec};
pub use multiply::{multiply, power, AlgorithmChoice, MulOptions, PreparedProduct};
pub use poisson::{multiply_poisson, Flavor, PoissonBackend, PoissonSeries, TrigTerm};
pub use series::{Algorithm, LaurentPolynomial, PolyTerm, SelectionPolicy, UnivariateSeries};
