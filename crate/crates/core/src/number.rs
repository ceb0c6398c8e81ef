//! Scalar fields used by the exact and floating-point code paths.
//!
//! Everything that must run both in `f64` and in exact rational arithmetic
//! (the simplex engine, the metric validator, Wolfe's min-norm routine) is
//! written against [`Number`].

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// An ordered field with an optional zero tolerance.
pub trait Number: Clone + Debug + PartialEq + Send + Sync + 'static {
    /// True for exact arithmetic (rationals).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn from_int(x: i64) -> Self;
    fn to_f64(&self) -> f64;

    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;

    /// Exact comparison (no tolerance).
    fn cmp_exact(&self, other: &Self) -> Ordering;

    /// Sign with the type's pivot tolerance applied.
    fn is_zero_tol(&self) -> bool;

    fn is_pos_tol(&self) -> bool {
        !self.is_zero_tol() && self.cmp_exact(&Self::zero()) == Ordering::Greater
    }

    fn is_neg_tol(&self) -> bool {
        !self.is_zero_tol() && self.cmp_exact(&Self::zero()) == Ordering::Less
    }

    fn max_of(self, other: Self) -> Self {
        if self.cmp_exact(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if self.cmp_exact(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }
}

/// Pivot tolerance for the floating-point simplex.
pub const F64_PIVOT_TOL: f64 = 1e-10;

impl Number for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_int(x: i64) -> Self {
        x as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn cmp_exact(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
    fn is_zero_tol(&self) -> bool {
        f64::abs(*self) <= F64_PIVOT_TOL
    }
}

impl Number for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    /// Exact binary expansion of the float; panics on non-finite input.
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }
    fn from_int(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // very large numerators/denominators overflow the direct path
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn cmp_exact(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn is_zero_tol(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// `num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
