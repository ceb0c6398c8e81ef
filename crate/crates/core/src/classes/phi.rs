use serde::{Deserialize, Serialize};

use super::{LabeledSample, Member, Support};
use crate::error::{Error, Result};
use crate::solver::SimplexWeights;

/// Absorbs the rounding of `gamma` when flooring values that are integers in
/// exact arithmetic (`1 / 0.1^2` is `99.99999999999997` in binary).
const FLOOR_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiPreset {
    /// `floor(1 / gamma^k)`
    InversePower { k: u32 },
    /// `floor(exp(1 / gamma))`
    Exponential,
}

/// The class `{f in (-1,1)^N : phi(|f(n)|) >= n for all n}` truncated to
/// the domain `1..=N`. Ground index `i` stands for the natural number `i + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiSpec {
    pub preset: PhiPreset,
    #[serde(rename = "n")]
    n_max: u64,
}

impl PhiSpec {
    pub fn new(preset: PhiPreset, n_max: u64) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::input("phi-class truncation bound must be at least 1"));
        }
        if let PhiPreset::InversePower { k: 0 } = preset {
            return Err(Error::input("inverse-power preset needs k >= 1"));
        }
        Ok(PhiSpec { preset, n_max })
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// `phi(gamma)`, saturating at `u64::MAX`.
    pub fn phi(&self, gamma: f64) -> u64 {
        let raw = match self.preset {
            PhiPreset::InversePower { k } => gamma.powi(-(k as i32)),
            PhiPreset::Exponential => (1.0 / gamma).exp(),
        };
        let v = (raw * (1.0 + FLOOR_SLACK)).floor();
        if v >= u64::MAX as f64 {
            u64::MAX
        } else {
            v as u64
        }
    }

    /// `min(phi(gamma), N)`: the largest shattered prefix.
    pub fn dim(&self, gamma: f64) -> u64 {
        self.phi(gamma).min(self.n_max)
    }

    /// Largest admissible `|f(n)|`: `sup { t < 1 : phi(t) >= n }`.
    pub fn tau(&self, n: u64) -> f64 {
        let n = n as f64;
        let t = match self.preset {
            PhiPreset::InversePower { k } => n.powf(-1.0 / k as f64),
            PhiPreset::Exponential => 1.0 / n.ln(),
        };
        t.min(1.0)
    }

    /// Coordinates are independent, so the support is `sum |c_n| tau(n)`.
    pub fn support(&self, sample: &LabeledSample, mu: &SimplexWeights) -> Support {
        let mut coeff: Vec<(usize, f64)> = vec![];
        for ((&x, &y), m) in sample.points.iter().zip(&sample.labels).zip(mu.as_slice()) {
            match coeff.iter_mut().find(|(p, _)| *p == x) {
                Some(e) => e.1 += f64::from(y) * m,
                None => coeff.push((x, f64::from(y) * m)),
            }
        }
        let values: Vec<(usize, f64)> = coeff.iter().map(|&(x, c)| (x, c.signum() * self.tau(x as u64 + 1))).collect();
        let value = coeff.iter().zip(&values).map(|((_, c), (_, v))| c * v).sum();
        Support { value, maximizer: Some(Member::PhiTable { values }) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PhiVerdict {
    Yes {
        witness: Member,
    },
    /// Largest sample point (as a natural number) exceeding `phi(gamma)`.
    No {
        point: u64,
    },
}

impl PhiVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, PhiVerdict::Yes { .. })
    }
}

/// Realizable iff `phi(gamma) >= n` for every sample point `n`.
pub fn phi_realizable(spec: &PhiSpec, sample: &LabeledSample, gamma: f64) -> PhiVerdict {
    // members take values in (-1, 1)
    let phi = if gamma >= 1.0 { 0 } else { spec.phi(gamma) };
    match sample.points.iter().map(|&x| x as u64 + 1).filter(|&n| n > phi).max() {
        Some(point) => PhiVerdict::No { point },
        None => {
            let values = sample.points.iter().zip(&sample.labels).map(|(&x, &y)| (x, f64::from(y) * gamma)).collect();
            PhiVerdict::Yes { witness: Member::PhiTable { values } }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::ConceptClass;

    fn exp_spec() -> PhiSpec {
        PhiSpec::new(PhiPreset::Exponential, 100).unwrap()
    }

    #[test]
    fn exponential_values() {
        let s = exp_spec();
        let got: Vec<u64> = [2.0, 3.0, 4.0, 5.0].iter().map(|k| s.dim(1.0 / k)).collect();
        assert_eq!(got, vec![7, 20, 54, 100]);
        assert_eq!(PhiSpec::new(PhiPreset::Exponential, 1000).unwrap().dim(0.2), 148);
        assert_eq!(PhiSpec::new(PhiPreset::InversePower { k: 2 }, 1000).unwrap().phi(0.1), 100);
    }

    #[test]
    fn realizability_threshold() {
        let s = exp_spec();
        let seven = LabeledSample::new((0..7).collect(), vec![1, -1, 1, 1, -1, -1, 1]).unwrap();
        assert!(phi_realizable(&s, &seven, 0.5).is_yes());
        let eight = LabeledSample::new(vec![7], vec![1]).unwrap();
        assert_eq!(phi_realizable(&s, &eight, 0.5), PhiVerdict::No { point: 8 });
        let inv = PhiSpec::new(PhiPreset::InversePower { k: 1 }, 10).unwrap();
        assert!(phi_realizable(&inv, &LabeledSample::new(vec![0], vec![-1]).unwrap(), 0.9).is_yes());
        assert!(!phi_realizable(&inv, &LabeledSample::new(vec![1], vec![-1]).unwrap(), 0.9).is_yes());
    }

    #[test]
    fn witness_margin_and_membership() {
        let spec = exp_spec();
        let sample = LabeledSample::new(vec![0, 3, 6], vec![-1, 1, -1]).unwrap();
        let PhiVerdict::Yes { witness } = phi_realizable(&spec, &sample, 0.5) else { panic!() };
        let class = ConceptClass::Phi(spec);
        assert_eq!(class.margin(&witness, &sample).unwrap(), 0.5);
        for n in 1..=7u64 {
            assert!(spec.tau(n) >= 0.5 - 1e-12);
        }
    }

    #[test]
    fn phi_is_monotone() {
        for spec in [exp_spec(), PhiSpec::new(PhiPreset::InversePower { k: 3 }, 10).unwrap()] {
            let grid: Vec<u64> = (1..100).map(|i| spec.phi(i as f64 / 100.0)).collect();
            assert!(grid.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
