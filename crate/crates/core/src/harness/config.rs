use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::certify::Gamma;
use crate::classes::{PhiPreset, PhiSpec};
use crate::error::{Error, Result};
use crate::number::Rational;
use crate::solver::{Arithmetic, SolverConfig};
use crate::spaces::NormSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    LpProfile,
    SubmultiAudit,
    MetricDichotomy,
    LipPacking,
    EquivalenceFuzz,
    PhiGrowth,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::LpProfile,
        ExperimentId::SubmultiAudit,
        ExperimentId::MetricDichotomy,
        ExperimentId::LipPacking,
        ExperimentId::EquivalenceFuzz,
        ExperimentId::PhiGrowth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::LpProfile => "lp-profile",
            ExperimentId::SubmultiAudit => "submulti-audit",
            ExperimentId::MetricDichotomy => "metric-dichotomy",
            ExperimentId::LipPacking => "lip-packing",
            ExperimentId::EquivalenceFuzz => "equivalence-fuzz",
            ExperimentId::PhiGrowth => "phi-growth",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|e| e.name()).collect();
            Error::input(format!("unknown experiment '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

/// Parses a margin written as a fraction (`"1/3"`) or a decimal (`"0.36"`),
/// keeping the exact rational value.
pub fn parse_gamma(s: &str) -> Result<Gamma> {
    let bad = || Error::input(format!("cannot parse margin '{s}'"));
    let s = s.trim();
    let r = if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b == BigInt::from(0) {
            return Err(bad());
        }
        Rational::new(a, b)
    } else {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.chars().any(|c| !c.is_ascii_digit()) || int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let digits: BigInt = format!("{}{frac}", if int.is_empty() { "0" } else { int }).parse().map_err(|_| bad())?;
        Rational::new(digits, BigInt::from(10).pow(frac.len() as u32))
    };
    if r <= Rational::from_integer(BigInt::from(0)) {
        return Err(Error::input(format!("margin must be positive, got '{s}'")));
    }
    Ok(Gamma::rational(r))
}

/// Parameters of one experiment run. Fields left out of a JSON config take
/// the experiment's defaults (see [`ExperimentConfig::new`]).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    /// Margins, as fractions or decimals.
    pub gammas: Vec<String>,
    pub p: Vec<NormSpec>,
    /// Size caps; the meaning depends on the experiment.
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub arithmetic: Arithmetic,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    pub keep_going: bool,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentId,
    gammas: Option<Vec<serde_json::Value>>,
    p: Option<Vec<NormSpec>>,
    sizes: Option<Vec<usize>>,
    trials: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    arithmetic: Option<Arithmetic>,
    phi: Option<PhiSpec>,
    keep_going: Option<bool>,
    output: Option<PathBuf>,
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl ExperimentConfig {
    /// Defaults for each experiment:
    ///
    /// | experiment | gammas | sizes | trials |
    /// |---|---|---|---|
    /// | lp-profile | 1/2 .. 1/5 | basis cap 128 | - |
    /// | submulti-audit | 0.3 .. 0.8 | ground size 8 | - |
    /// | metric-dichotomy | 103/300 | max points 12 | 200 |
    /// | lip-packing | 0.1, 0.25, 0.4 (of the diameter) | max points 10 | 100 |
    /// | equivalence-fuzz | drawn per trial | max points 5 | 500 (+100 grid) |
    /// | phi-growth | 1/2 .. 1/5 | - | - |
    pub fn new(experiment: ExperimentId) -> Self {
        let mut c = ExperimentConfig {
            experiment,
            gammas: vec![],
            p: vec![],
            sizes: vec![],
            trials: 0,
            seed: 0,
            tol: SolverConfig::default().tol,
            arithmetic: Arithmetic::Float,
            phi: None,
            keep_going: false,
            output: None,
        };
        match experiment {
            ExperimentId::LpProfile => {
                c.gammas = strings(&["1/2", "1/3", "1/4", "1/5"]);
                c.p = [1.5, 2.0, 3.0].iter().map(|&p| NormSpec::new(p).expect("valid p")).collect();
                c.sizes = vec![128];
                c.arithmetic = Arithmetic::Rational;
            }
            ExperimentId::SubmultiAudit => {
                c.gammas = strings(&["0.3", "0.36", "0.4", "0.5", "0.6", "0.8"]);
                c.sizes = vec![8];
                c.arithmetic = Arithmetic::Rational;
                c.phi = Some(PhiSpec::new(PhiPreset::Exponential, 100).expect("valid spec"));
            }
            ExperimentId::MetricDichotomy => {
                c.gammas = strings(&["103/300"]);
                c.sizes = vec![12];
                c.trials = 200;
            }
            ExperimentId::LipPacking => {
                c.gammas = strings(&["0.1", "0.25", "0.4"]);
                c.sizes = vec![10];
                c.trials = 100;
            }
            ExperimentId::EquivalenceFuzz => {
                c.sizes = vec![5];
                c.trials = 500;
                c.arithmetic = Arithmetic::Rational;
            }
            ExperimentId::PhiGrowth => {
                c.gammas = strings(&["1/2", "1/3", "1/4", "1/5"]);
                c.phi = Some(PhiSpec::new(PhiPreset::Exponential, 1000).expect("valid spec"));
            }
        }
        c
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(s)?;
        let mut c = ExperimentConfig::new(raw.experiment);
        if let Some(g) = raw.gammas {
            c.gammas = g
                .into_iter()
                .map(|v| match v {
                    serde_json::Value::String(s) => s,
                    other => other.to_string(),
                })
                .collect();
        }
        c.p = raw.p.unwrap_or(c.p);
        c.sizes = raw.sizes.unwrap_or(c.sizes);
        c.trials = raw.trials.unwrap_or(c.trials);
        c.seed = raw.seed.unwrap_or(c.seed);
        c.tol = raw.tol.unwrap_or(c.tol);
        c.arithmetic = raw.arithmetic.unwrap_or(c.arithmetic);
        c.phi = raw.phi.or(c.phi);
        c.keep_going = raw.keep_going.unwrap_or(c.keep_going);
        c.output = raw.output;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver()?;
        self.gamma_grid()?;
        Ok(())
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        SolverConfig::new(self.tol, SolverConfig::default().max_iter, self.arithmetic)
    }

    pub fn float_solver(&self) -> Result<SolverConfig> {
        SolverConfig::new(self.tol, SolverConfig::default().max_iter, Arithmetic::Float)
    }

    pub fn gamma_grid(&self) -> Result<Vec<Gamma>> {
        self.gammas.iter().map(|s| parse_gamma(s)).collect()
    }

    pub fn size(&self, i: usize, default: usize) -> usize {
        self.sizes.get(i).copied().unwrap_or(default)
    }

    /// Canonical JSON used for the config hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("serializable config")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::ratio;

    #[test]
    fn gamma_parsing_is_exact() {
        assert_eq!(parse_gamma("1/3").unwrap(), Gamma::rational(ratio(1, 3)));
        assert_eq!(parse_gamma("0.36").unwrap(), Gamma::rational(ratio(9, 25)));
        assert_eq!(parse_gamma(".5").unwrap(), Gamma::rational(ratio(1, 2)));
        assert_eq!(parse_gamma("2").unwrap(), Gamma::rational(ratio(2, 1)));
        for bad in ["", "x", "1/0", "-0.5", "0", "1e-3", "0.5.1"] {
            assert!(parse_gamma(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn json_overrides_defaults() {
        let c = ExperimentConfig::from_json(r#"{"experiment": "lip-packing", "trials": 3, "gammas": [0.2, "1/4"]}"#)
            .unwrap();
        assert_eq!(c.trials, 3);
        assert_eq!(c.gammas, vec!["0.2", "1/4"]);
        assert_eq!(c.sizes, vec![10]);
        assert!(ExperimentConfig::from_json(r#"{"experiment": "lip-packing", "bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "nope"}"#).is_err());
    }

    #[test]
    fn ids_round_trip() {
        for e in ExperimentId::ALL {
            assert_eq!(e.name().parse::<ExperimentId>().unwrap(), e);
        }
    }
}
