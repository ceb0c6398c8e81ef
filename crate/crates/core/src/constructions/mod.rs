//! Explicit point sets and metric spaces with their predicted verdicts.

mod hadamard;
mod metric_spaces;

use serde::{Deserialize, Serialize};

use crate::classes::{BallPairParams, ConceptClass, DistanceClass, DistanceVariant, DualBall, Member, PhiSpec};
use crate::error::{Error, Result};
use crate::spaces::{FiniteMetricSpace, NormSpec, Violation};

pub use hadamard::{hadamard_shattered_set, standard_basis_set, sylvester_hadamard, HadamardMatrix};
pub use metric_spaces::{
    gamma_counterexample_metric, gamma_counterexample_space, intro_counterexample_metric, intro_counterexample_space,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictedStatus {
    Shattered,
    NotShattered,
    MetricValid,
    MetricInvalid,
}

/// Class member that realizes one labeling of the bundle's shattered set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedWitness {
    pub name: String,
    pub labels: Vec<i8>,
    pub member: Member,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedDim {
    pub gamma: f64,
    pub dim: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstructionObject {
    PointSet {
        p: NormSpec,
        points: Vec<Vec<f64>>,
    },
    MetricSpace {
        ids: Vec<String>,
        dist: Vec<Vec<f64>>,
        /// Class the `shattered` indices are predicted to be shattered by.
        class: MetricClass,
        shattered: Vec<usize>,
    },
    Phi {
        spec: PhiSpec,
        dims: Vec<PredictedDim>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricClass {
    BallPair { params: BallPairParams },
    DistanceCombination { variant: DistanceVariant },
}

/// A construction together with the verdict the certifiers should reproduce.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionBundle {
    pub name: String,
    pub object: ConstructionObject,
    pub predicted_gamma: f64,
    pub predicted_status: PredictedStatus,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<NamedWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

impl ConstructionBundle {
    /// Concept class over the constructed ground set.
    ///
    /// Metric bundles whose matrix is not a metric fail here.
    pub fn class(&self) -> Result<ConceptClass> {
        match &self.object {
            ConstructionObject::PointSet { p, points } => {
                Ok(ConceptClass::DualBall(DualBall::new(points.clone(), *p)?))
            }
            ConstructionObject::MetricSpace { ids, dist, class, .. } => {
                let space = FiniteMetricSpace::new(ids.clone(), dist.clone())?;
                Ok(match *class {
                    MetricClass::BallPair { params } => ConceptClass::BallPair { space, params },
                    MetricClass::DistanceCombination { variant } => {
                        ConceptClass::DistanceCombination(DistanceClass::all_centers(space, variant)?)
                    }
                })
            }
            ConstructionObject::Phi { spec, .. } => Ok(ConceptClass::Phi(*spec)),
        }
    }

    /// Ground indices predicted to be shattered at `predicted_gamma`.
    pub fn shattered_set(&self) -> Vec<usize> {
        match &self.object {
            ConstructionObject::PointSet { points, .. } => (0..points.len()).collect(),
            ConstructionObject::MetricSpace { shattered, .. } => shattered.clone(),
            ConstructionObject::Phi { spec, .. } => (0..spec.dim(self.predicted_gamma) as usize).collect(),
        }
    }

    pub fn points(&self) -> Option<&[Vec<f64>]> {
        match &self.object {
            ConstructionObject::PointSet { points, .. } => Some(points),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::input(format!("not a construction bundle: {e}")))
    }
}

/// Largest truncation handled by [`phi_class_truncation`].
pub const PHI_MAX_N: u64 = 1_000_000;

/// The φ-class on `1..=N` with predicted dimensions `min(phi(gamma), N)` on
/// the grid `1/2, 1/3, 1/4, 1/5`.
pub fn phi_class_truncation(spec: PhiSpec) -> Result<ConstructionBundle> {
    if spec.n_max() > PHI_MAX_N {
        return Err(Error::input(format!("truncation bound {} exceeds {PHI_MAX_N}", spec.n_max())));
    }
    let dims = [2.0, 3.0, 4.0, 5.0].iter().map(|k| PredictedDim { gamma: 1.0 / k, dim: spec.dim(1.0 / k) }).collect();
    Ok(ConstructionBundle {
        name: "phi_class".into(),
        object: ConstructionObject::Phi { spec, dims },
        predicted_gamma: 0.5,
        predicted_status: PredictedStatus::Shattered,
        provenance:
            "coordinatewise class with |f(n)| <= tau(n); the prefix 1..phi(gamma) is shattered and nothing larger"
                .into(),
        witnesses: vec![],
        violation: None,
        notice: None,
    })
}
