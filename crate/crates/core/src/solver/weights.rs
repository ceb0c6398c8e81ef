use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Convex-combination weights: nonnegative, summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::input("simplex weights must be nonempty"));
        }
        if let Some(i) = mu.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::input(format!("weight {i} is negative or not finite")));
        }
        let s: f64 = mu.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::input(format!("weights sum to {s}, expected 1")));
        }
        Ok(SimplexWeights(mu))
    }

    /// Clamps negatives to zero and rescales to sum one.
    pub fn normalized(mut mu: Vec<f64>) -> Result<Self> {
        for x in mu.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let s: f64 = mu.iter().sum();
        if !(s > 0.0) {
            return Err(Error::degenerate("weights have no positive mass"));
        }
        for x in mu.iter_mut() {
            *x /= s;
        }
        Self::new(mu)
    }

    pub fn uniform(n: usize) -> Self {
        SimplexWeights(vec![1.0 / n as f64; n])
    }

    pub fn vertex(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        SimplexWeights(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `t * self + (1 - t) * other`.
    pub fn mix(&self, other: &SimplexWeights, t: f64) -> Result<SimplexWeights> {
        if self.len() != other.len() {
            return Err(Error::input("weight vectors differ in length"));
        }
        SimplexWeights::normalized(self.0.iter().zip(&other.0).map(|(a, b)| t * a + (1.0 - t) * b).collect())
    }
}

/// Signed weights with unit `l_1` mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignedWeights(Vec<f64>);

impl SignedWeights {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if let Some(i) = lambda.iter().position(|x| !x.is_finite()) {
            return Err(Error::input(format!("weight {i} is not finite")));
        }
        let s: f64 = lambda.iter().map(|x| x.abs()).sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::input(format!("signed weights have l1 mass {s}, expected 1")));
        }
        Ok(SignedWeights(lambda))
    }

    /// Rescales a nonzero vector to unit `l_1` mass.
    pub fn normalized(lambda: Vec<f64>) -> Result<Self> {
        let s: f64 = lambda.iter().map(|x| x.abs()).sum();
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::degenerate("cannot normalize a zero weight vector"));
        }
        Self::new(lambda.into_iter().map(|x| x / s).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Checks that every label is `+1` or `-1`.
pub fn check_labels(y: &[i8]) -> Result<()> {
    match y.iter().position(|&s| s != 1 && s != -1) {
        Some(i) => Err(Error::input(format!("label {i} is {} (expected +1 or -1)", y[i]))),
        None => Ok(()),
    }
}

/// `lambda_i = y_i * mu_i`.
pub fn fold_signs(mu: &SimplexWeights, y: &[i8]) -> Result<SignedWeights> {
    if mu.len() != y.len() {
        return Err(Error::input(format!("{} weights but {} signs", mu.len(), y.len())));
    }
    check_labels(y)?;
    Ok(SignedWeights(mu.0.iter().zip(y).map(|(m, &s)| m * f64::from(s)).collect()))
}
