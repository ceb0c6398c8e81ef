use std::cmp::Ordering;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::number::{Number, Rational};

/// A margin threshold with an exact form for rational comparisons.
///
/// Thresholds such as `1/sqrt(8)` are irrational, so the exact form is kept
/// as the square; values compared against it are nonnegative norms or are
/// handled by sign first.
#[derive(Clone, Debug, PartialEq)]
pub struct Gamma {
    value: f64,
    exact: Option<Rational>,
    exact_sq: Rational,
}

impl Gamma {
    /// The threshold with the exact binary value of `value`.
    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::input(format!("gamma must be positive and finite, got {value}")));
        }
        Ok(Self::rational(Rational::from_f64(value)))
    }

    pub fn rational(exact: Rational) -> Self {
        let exact_sq = exact.mul(&exact);
        Gamma { value: exact.to_f64(), exact: Some(exact), exact_sq }
    }

    /// `sqrt(square)` for a positive rational `square`.
    pub fn sqrt_of(square: Rational) -> Result<Self> {
        if square.cmp_exact(&Rational::zero()) != Ordering::Greater {
            return Err(Error::input("gamma^2 must be positive"));
        }
        Ok(Gamma { value: square.to_f64().sqrt(), exact: None, exact_sq: square })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// The exact rational threshold, when there is one.
    pub fn exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn exact_sq(&self) -> &Rational {
        &self.exact_sq
    }

    /// Exact comparison `x` vs `gamma`.
    pub fn cmp_value(&self, x: &Rational) -> Ordering {
        if let Some(g) = &self.exact {
            return x.cmp_exact(g);
        }
        if x.cmp_exact(&Rational::zero()) != Ordering::Greater {
            return Ordering::Less;
        }
        x.mul(x).cmp_exact(&self.exact_sq)
    }

    /// Exact comparison `sqrt(x_sq)` vs `gamma` for `x_sq >= 0`.
    pub fn cmp_square(&self, x_sq: &Rational) -> Ordering {
        x_sq.cmp_exact(&self.exact_sq)
    }
}

impl Serialize for Gamma {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value)
    }
}
