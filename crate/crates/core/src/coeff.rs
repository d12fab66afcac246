//! Coefficient rings.
//!
//! The kernels are generic over [`Coefficient`], which asks for the handful of
//! ring operations schoolbook multiplication needs plus an exact halving used
//! by the product-to-sum rules of Poisson series.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision integer coefficients.
pub type Integer = BigInt;
/// Exact rational coefficients.
pub type Rational = BigRational;

/// Ring operations required of a coefficient type.
pub trait Coefficient:
    Clone + PartialEq + Debug + Display + FromStr + Send + Sync + 'static
{
    /// Short name used in reports (`double`, `int`, `rational`).
    const KIND: &'static str;

    fn zero() -> Self;

    fn from_i64(value: i64) -> Self;

    fn is_zero(&self) -> bool;

    fn add_assign_ref(&mut self, other: &Self);

    fn mul_ref(&self, other: &Self) -> Self;

    fn neg_ref(&self) -> Self;

    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self) {
        let p = a.mul_ref(b);
        self.add_assign_ref(&p);
    }

    /// `self -= a * b`
    fn sub_product(&mut self, a: &Self, b: &Self) {
        let p = a.mul_ref(b).neg_ref();
        self.add_assign_ref(&p);
    }

    /// Exact division by two, `None` when the ring cannot represent the result.
    fn halve(&self) -> Option<Self>;

    /// Floating-point approximation, used by evaluation and reporting.
    fn to_f64(&self) -> f64;

    fn one() -> Self {
        Self::from_i64(1)
    }
}

impl Coefficient for f64 {
    const KIND: &'static str = "double";

    #[inline]
    fn zero() -> Self {
        0.0
    }

    fn from_i64(value: i64) -> Self {
        value as f64
    }

    #[inline]
    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    #[inline]
    fn add_assign_ref(&mut self, other: &Self) {
        *self += *other;
    }

    #[inline]
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    #[inline]
    fn neg_ref(&self) -> Self {
        -self
    }

    #[inline]
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    #[inline]
    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn halve(&self) -> Option<Self> {
        Some(self * 0.5)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coefficient for Integer {
    const KIND: &'static str = "int";

    fn zero() -> Self {
        Zero::zero()
    }

    fn from_i64(value: i64) -> Self {
        BigInt::from(value)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn neg_ref(&self) -> Self {
        -self
    }

    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn halve(&self) -> Option<Self> {
        if self.bit(0) {
            None
        } else {
            // arithmetic shift is exact on even values of either sign
            Some(self >> 1u32)
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(if self.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        })
    }
}

impl Coefficient for Rational {
    const KIND: &'static str = "rational";

    fn zero() -> Self {
        Zero::zero()
    }

    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn neg_ref(&self) -> Self {
        -self
    }

    fn halve(&self) -> Option<Self> {
        Some(self / BigRational::from_integer(BigInt::from(2)))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn one() -> Self {
        One::one()
    }
}

/// Which coefficient ring a benchmark or input file uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientKind {
    Double,
    Int,
    Rational,
}

impl CoefficientKind {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientKind::Double => f64::KIND,
            CoefficientKind::Int => Integer::KIND,
            CoefficientKind::Rational => Rational::KIND,
        }
    }
}

impl FromStr for CoefficientKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "double" => Ok(CoefficientKind::Double),
            "int" => Ok(CoefficientKind::Int),
            "rational" => Ok(CoefficientKind::Rational),
            other => Err(format!("unknown coefficient kind `{other}`")),
        }
    }
}

impl Display for CoefficientKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
