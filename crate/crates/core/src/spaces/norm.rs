use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An `l_p` norm with `p` in `[1, inf]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSpec {
    p: f64,
}

impl NormSpec {
    pub const L1: NormSpec = NormSpec { p: 1.0 };
    pub const L2: NormSpec = NormSpec { p: 2.0 };
    pub const LINF: NormSpec = NormSpec { p: f64::INFINITY };

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::input(format!("norm exponent must lie in [1, inf], got {p}")));
        }
        Ok(NormSpec { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_l1(&self) -> bool {
        self.p == 1.0
    }

    pub fn is_linf(&self) -> bool {
        self.p.is_infinite()
    }

    pub fn is_l2(&self) -> bool {
        self.p == 2.0
    }

    /// True when the norm is smooth away from the origin (`1 < p < inf`).
    pub fn is_smooth(&self) -> bool {
        !self.is_l1() && !self.is_linf()
    }

    /// Hölder conjugate `q` with `1/p + 1/q = 1`.
    pub fn dual_exponent(&self) -> f64 {
        if self.is_l1() {
            f64::INFINITY
        } else if self.is_linf() {
            1.0
        } else {
            self.p / (self.p - 1.0)
        }
    }

    pub fn dual(&self) -> NormSpec {
        NormSpec { p: self.dual_exponent() }
    }

    /// Norm of a slice without input validation.
    pub fn eval(&self, v: &[f64]) -> f64 {
        let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if scale == 0.0 || self.is_linf() {
            return scale;
        }
        if self.is_l1() {
            return v.iter().map(|x| x.abs()).sum();
        }
        if self.is_l2() {
            let s: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
            return scale * s.sqrt();
        }
        let s: f64 = v.iter().map(|x| (x.abs() / scale).powf(self.p)).sum();
        scale * s.powf(1.0 / self.p)
    }

    /// Norming functional of `v` without input validation; `None` for the zero vector.
    pub fn norming_functional(&self, v: &[f64]) -> Option<Vec<f64>> {
        let nv = self.eval(v);
        if nv == 0.0 {
            return None;
        }
        let w = if self.is_l1() {
            v.iter()
                .map(|&x| {
                    if x > 0.0 {
                        1.0
                    } else if x < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        } else if self.is_linf() {
            // first coordinate of largest magnitude
            let mut best = 0;
            for (j, x) in v.iter().enumerate() {
                if x.abs() > v[best].abs() {
                    best = j;
                }
            }
            let mut w = vec![0.0; v.len()];
            w[best] = v[best].signum();
            w
        } else if self.is_l2() {
            v.iter().map(|x| x / nv).collect()
        } else {
            v.iter()
                .map(|&x| {
                    let m = (x.abs() / nv).powf(self.p - 1.0);
                    if x < 0.0 {
                        -m
                    } else {
                        m
                    }
                })
                .collect()
        };
        Some(w)
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_linf() {
            write!(f, "l_inf")
        } else {
            write!(f, "l_{}", self.p)
        }
    }
}

impl Serialize for NormSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_linf() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.p)
        }
    }
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Num(p) => p,
            Raw::Str(s) => match s.as_str() {
                "inf" | "infinity" | "Infinity" => f64::INFINITY,
                other => other.parse().map_err(serde::de::Error::custom)?,
            },
        };
        NormSpec::new(p).map_err(serde::de::Error::custom)
    }
}

/// A finite-coordinate vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorPoint {
    coords: Vec<f64>,
}

impl VectorPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_coords(&coords)?;
        Ok(VectorPoint { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl AsRef<[f64]> for VectorPoint {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

fn check_coords(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::input("vector must have at least one coordinate"));
    }
    if let Some(j) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::input(format!("coordinate {j} is not finite")));
    }
    Ok(())
}

/// `l_p` norm of `v`: `(sum |v_j|^p)^(1/p)`, or `max |v_j|` for `p = inf`.
pub fn norm(v: &[f64], n: NormSpec) -> Result<f64> {
    check_coords(v)?;
    Ok(n.eval(v))
}

/// Norm in the Hölder-dual space.
pub fn dual_norm(w: &[f64], n: NormSpec) -> Result<f64> {
    norm(w, n.dual())
}

pub fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unit-dual-norm functional `w` with `<w, v> = ||v||`.
///
/// For `1 < p < inf` this is `sign(v_j) |v_j|^(p-1) / ||v||^(p-1)`. On the
/// non-smooth ends a fixed subgradient is selected: `sign(v)` for `p = 1`,
/// and the signed unit vector on the first largest coordinate for `p = inf`.
pub fn duality_map(v: &[f64], n: NormSpec) -> Result<Vec<f64>> {
    check_coords(v)?;
    n.norming_functional(v).ok_or_else(|| Error::degenerate("duality map of the zero vector is undefined"))
}
