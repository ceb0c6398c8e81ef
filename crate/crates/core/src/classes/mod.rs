//! Concept classes presented through their sample-restricted support
//! function `(mu, y) -> sup_f sum_i mu_i y_i f(x_i)`.
//!
//! Sample points are always indices into the class's ground set: the vector
//! list of a [`DualBall`], the points of a metric space, or `1..=N` for the
//! φ-class.

mod ball_pair;
mod distance;
mod dual_ball;
mod lipschitz;
mod phi;
mod polytope;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::solver::{check_labels, SimplexWeights};
use crate::spaces::{FiniteMetricSpace, MetricSpaceDoc, NormSpec, PointSetDoc};

pub use ball_pair::{ball_pair_realizable, BallPairParams, BallPairVerdict};
pub use distance::{distance_max_margin, support_distance_combination, DistanceClass, DistanceVariant, MaxMargin};
pub use dual_ball::{support_dual_ball, DualBall};
pub use lipschitz::{closest_cross_pair, lip_extension_eval, lip_realizable, lip_support, LipVerdict};
pub use phi::{phi_realizable, PhiPreset, PhiSpec, PhiVerdict};
pub use polytope::{polytope_max_margin, FunctionPolytope};

/// Labeled sample: ground indices with `+1`/`-1` labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub points: Vec<usize>,
    pub labels: Vec<i8>,
}

impl LabeledSample {
    pub fn new(points: Vec<usize>, labels: Vec<i8>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::input(format!("{} points but {} labels", points.len(), labels.len())));
        }
        if points.is_empty() {
            return Err(Error::input("labeled sample is empty"));
        }
        check_labels(&labels)?;
        Ok(LabeledSample { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positives(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.iter().zip(&self.labels).filter(|(_, &y)| y > 0).map(|(&p, _)| p)
    }

    pub fn negatives(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.iter().zip(&self.labels).filter(|(_, &y)| y < 0).map(|(&p, _)| p)
    }

    pub fn flipped(&self) -> LabeledSample {
        LabeledSample { points: self.points.clone(), labels: self.labels.iter().map(|y| -y).collect() }
    }
}

/// A concrete class member, used both as a support maximizer and as a
/// realization witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Member {
    /// Linear functional `x -> <w, x>`.
    Linear {
        w: Vec<f64>,
    },
    /// `x -> sum_c a_c d(c, x)` over `(center, a_c)` pairs.
    DistanceCombination {
        coefficients: Vec<(usize, f64)>,
    },
    /// `x -> (d(S-, x) - d(S+, x)) / 2`.
    LipschitzExtension {
        positives: Vec<usize>,
        negatives: Vec<usize>,
    },
    /// Smallest 1-Lipschitz extension `x -> min_j (v_j + d(x_j, x))` of a table.
    LipschitzTable {
        values: Vec<(usize, f64)>,
    },
    Constant {
        value: f64,
    },
    /// Ball-pair concept centered at a point of the space.
    BallCenter {
        center: usize,
    },
    /// Function on `1..=N` given on listed points, zero elsewhere.
    PhiTable {
        values: Vec<(usize, f64)>,
    },
    /// Convex combination of polytope vertices.
    PolytopeMix {
        weights: Vec<f64>,
    },
}

/// Support-function value together with a maximizing member (when the
/// supremum is attained).
#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    pub value: f64,
    pub maximizer: Option<Member>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    DualBall,
    DistanceCombination,
    DistanceCombinationPos,
    DistanceCombinationNeg,
    Lipschitz,
    BallPair,
    Phi,
    FunctionPolytope,
}

/// A concept class with its ground set.
#[derive(Clone, Debug, PartialEq)]
pub enum ConceptClass {
    DualBall(DualBall),
    DistanceCombination(DistanceClass),
    Lipschitz(FiniteMetricSpace),
    BallPair { space: FiniteMetricSpace, params: BallPairParams },
    Phi(PhiSpec),
    FunctionPolytope(FunctionPolytope),
}

impl ConceptClass {
    pub fn kind(&self) -> ClassKind {
        match self {
            ConceptClass::DualBall(_) => ClassKind::DualBall,
            ConceptClass::DistanceCombination(c) => match c.variant {
                DistanceVariant::Full => ClassKind::DistanceCombination,
                DistanceVariant::Pos => ClassKind::DistanceCombinationPos,
                DistanceVariant::Neg => ClassKind::DistanceCombinationNeg,
            },
            ConceptClass::Lipschitz(_) => ClassKind::Lipschitz,
            ConceptClass::BallPair { .. } => ClassKind::BallPair,
            ConceptClass::Phi(_) => ClassKind::Phi,
            ConceptClass::FunctionPolytope(_) => ClassKind::FunctionPolytope,
        }
    }

    /// Number of ground points.
    pub fn ground_size(&self) -> usize {
        match self {
            ConceptClass::DualBall(c) => c.points().len(),
            ConceptClass::DistanceCombination(c) => c.space.len(),
            ConceptClass::Lipschitz(s) => s.len(),
            ConceptClass::BallPair { space, .. } => space.len(),
            ConceptClass::Phi(s) => s.n_max() as usize,
            ConceptClass::FunctionPolytope(p) => p.num_points(),
        }
    }

    /// Whether `F = -F`, so realizability is invariant under a global label flip.
    pub fn is_symmetric(&self) -> bool {
        match self {
            ConceptClass::DualBall(_) | ConceptClass::Lipschitz(_) | ConceptClass::Phi(_) => true,
            ConceptClass::DistanceCombination(c) => c.variant == DistanceVariant::Full,
            ConceptClass::BallPair { .. } => false,
            ConceptClass::FunctionPolytope(p) => p.is_symmetric(),
        }
    }

    pub fn check_sample(&self, sample: &LabeledSample) -> Result<()> {
        let n = self.ground_size();
        if let Some(&p) = sample.points.iter().find(|&&p| p >= n) {
            return Err(Error::input(format!("sample point {p} outside ground set of size {n}")));
        }
        check_labels(&sample.labels)
    }

    /// `sup_{f in F} sum_i mu_i y_i f(x_i)`.
    pub fn support(&self, sample: &LabeledSample, mu: &SimplexWeights) -> Result<Support> {
        self.check_sample(sample)?;
        if mu.len() != sample.len() {
            return Err(Error::input(format!("{} weights for {} sample points", mu.len(), sample.len())));
        }
        match self {
            ConceptClass::DualBall(c) => support_dual_ball(c, sample, mu),
            ConceptClass::DistanceCombination(c) => support_distance_combination(c, sample, mu),
            ConceptClass::Lipschitz(space) => lip_support(space, sample, mu),
            ConceptClass::BallPair { .. } => {
                Err(Error::input("the ball-pair class is not convex; it is decided by direct center search"))
            }
            ConceptClass::Phi(spec) => Ok(spec.support(sample, mu)),
            ConceptClass::FunctionPolytope(p) => Ok(p.support(sample, mu)),
        }
    }

    /// `f(x)` for a member of this class at ground point `point`.
    ///
    /// Ball-pair members evaluate to `+1`, `-1`, or `0` on the undefined
    /// margin region.
    pub fn evaluate(&self, member: &Member, point: usize) -> Result<f64> {
        if point >= self.ground_size() {
            return Err(Error::input(format!("point {point} outside the ground set")));
        }
        let mismatch = || Error::input(format!("member {member:?} does not belong to a {:?} class", self.kind()));
        match (self, member) {
            (ConceptClass::DualBall(c), Member::Linear { w }) => Ok(crate::spaces::inner(w, &c.points()[point])),
            (ConceptClass::DistanceCombination(c), Member::DistanceCombination { coefficients }) => {
                Ok(coefficients.iter().map(|&(ctr, a)| a * c.space.dist(ctr, point)).sum())
            }
            (ConceptClass::Lipschitz(space), Member::LipschitzExtension { positives, negatives }) => {
                lipschitz::extension_value(space, positives, negatives, point)
            }
            (ConceptClass::Lipschitz(space), Member::LipschitzTable { values }) => {
                Ok(lipschitz::table_extension(space, values, point))
            }
            (_, Member::Constant { value }) if !matches!(self, ConceptClass::BallPair { .. }) => Ok(*value),
            (ConceptClass::BallPair { space, params }, Member::BallCenter { center }) => {
                Ok(params.label(space.dist(*center, point)) as f64)
            }
            (ConceptClass::Phi(_), Member::PhiTable { values }) => {
                Ok(values.iter().find(|(p, _)| *p == point).map_or(0.0, |(_, v)| *v))
            }
            (ConceptClass::FunctionPolytope(p), Member::PolytopeMix { weights }) => p.evaluate(weights, point),
            _ => Err(mismatch()),
        }
    }

    /// Smallest `y_i f(x_i)` over the sample.
    pub fn margin(&self, member: &Member, sample: &LabeledSample) -> Result<f64> {
        let mut m = f64::INFINITY;
        for (&p, &y) in sample.points.iter().zip(&sample.labels) {
            m = m.min(f64::from(y) * self.evaluate(member, p)?);
        }
        Ok(m)
    }

    /// `sum_i mu_i y_i f(x_i)` for a fixed member.
    pub fn pairing(&self, member: &Member, sample: &LabeledSample, mu: &SimplexWeights) -> Result<f64> {
        let mut s = 0.0;
        for ((&p, &y), &m) in sample.points.iter().zip(&sample.labels).zip(mu.as_slice()) {
            s += m * f64::from(y) * self.evaluate(member, p)?;
        }
        Ok(s)
    }
}

impl ConceptClass {
    /// Inverse of [`ClassDescriptor::build`].
    pub fn descriptor(&self) -> ClassDescriptor {
        let metric = |m: &FiniteMetricSpace| serde_json::to_value(MetricSpaceDoc::from(m)).expect("serializable");
        let (params, space) = match self {
            ConceptClass::DualBall(c) => (json!({ "p": c.norm() }), json!({ "points": c.points() })),
            ConceptClass::DistanceCombination(c) => (json!({ "centers": c.centers }), metric(&c.space)),
            ConceptClass::Lipschitz(m) => (Value::Null, metric(m)),
            ConceptClass::BallPair { space, params } => (json!({ "r": params.r, "R": params.big_r }), metric(space)),
            ConceptClass::Phi(spec) => (json!({ "preset": spec.preset, "n": spec.n_max() }), Value::Null),
            ConceptClass::FunctionPolytope(p) => (json!({ "vertices": p.vertices() }), Value::Null),
        };
        ClassDescriptor { kind: self.kind(), params, space }
    }
}

/// JSON class descriptor `{"kind": "...", "params": {...}, "space": ...}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassDescriptor {
    pub kind: ClassKind,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub space: serde_json::Value,
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct RawParams {
    p: Option<NormSpec>,
    centers: Option<Vec<usize>>,
    r: Option<f64>,
    #[serde(rename = "R")]
    big_r: Option<f64>,
    preset: Option<PhiPreset>,
    n: Option<u64>,
    vertices: Option<Vec<Vec<f64>>>,
}

impl ClassDescriptor {
    pub fn build(&self) -> Result<ConceptClass> {
        let params: RawParams =
            if self.params.is_null() { RawParams::default() } else { serde_json::from_value(self.params.clone())? };
        let metric = || -> Result<FiniteMetricSpace> {
            let doc: MetricSpaceDoc = serde_json::from_value(self.space.clone())?;
            doc.try_into()
        };
        let missing = |what: &str| Error::input(format!("class descriptor is missing '{what}'"));
        Ok(match self.kind {
            ClassKind::DualBall => {
                let doc: PointSetDoc = serde_json::from_value(self.space.clone())?;
                let pts = doc.into_points()?.into_iter().map(|p| p.into_coords()).collect();
                ConceptClass::DualBall(DualBall::new(pts, params.p.unwrap_or(NormSpec::L2))?)
            }
            ClassKind::DistanceCombination | ClassKind::DistanceCombinationPos | ClassKind::DistanceCombinationNeg => {
                let space = metric()?;
                let variant = match self.kind {
                    ClassKind::DistanceCombinationPos => DistanceVariant::Pos,
                    ClassKind::DistanceCombinationNeg => DistanceVariant::Neg,
                    _ => DistanceVariant::Full,
                };
                let centers = params.centers.unwrap_or_else(|| (0..space.len()).collect());
                ConceptClass::DistanceCombination(DistanceClass::new(space, centers, variant)?)
            }
            ClassKind::Lipschitz => ConceptClass::Lipschitz(metric()?),
            ClassKind::BallPair => ConceptClass::BallPair {
                space: metric()?,
                params: BallPairParams::new(
                    params.r.ok_or_else(|| missing("r"))?,
                    params.big_r.ok_or_else(|| missing("R"))?,
                )?,
            },
            ClassKind::Phi => ConceptClass::Phi(PhiSpec::new(
                params.preset.ok_or_else(|| missing("preset"))?,
                params.n.ok_or_else(|| missing("n"))?,
            )?),
            ClassKind::FunctionPolytope => ConceptClass::FunctionPolytope(FunctionPolytope::from_f64(
                params.vertices.ok_or_else(|| missing("vertices"))?,
            )?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_validation() {
        assert!(LabeledSample::new(vec![0, 1], vec![1]).is_err());
        assert!(LabeledSample::new(vec![], vec![]).is_err());
        assert!(LabeledSample::new(vec![0], vec![2]).is_err());
        let s = LabeledSample::new(vec![0, 1, 2], vec![1, -1, 1]).unwrap();
        assert_eq!(s.positives().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(s.flipped().labels, vec![-1, 1, -1]);
    }

    #[test]
    fn descriptor_round_trip() {
        let json = r#"{"kind": "ball_pair", "params": {"r": 0.25, "R": 0.75},
                       "space": {"ids": ["a", "b"], "dist": [[0, 1], [1, 0]]}}"#;
        let d: ClassDescriptor = serde_json::from_str(json).unwrap();
        let c = d.build().unwrap();
        assert_eq!(c.kind(), ClassKind::BallPair);
        assert!(!c.is_symmetric());

        let json = r#"{"kind": "dual_ball", "params": {"p": "inf"}, "space": {"points": [[1, 0], [0, 1]]}}"#;
        let c = serde_json::from_str::<ClassDescriptor>(json).unwrap().build().unwrap();
        assert_eq!(c.ground_size(), 2);

        let json = r#"{"kind": "phi", "params": {"preset": "exponential", "n": 100}}"#;
        assert!(serde_json::from_str::<ClassDescriptor>(json).unwrap().build().is_ok());
    }

    #[test]
    fn descriptor_inverts_build() {
        let classes = vec![
            ConceptClass::DualBall(
                DualBall::new(vec![vec![1.0, 0.0], vec![0.0, -0.5]], NormSpec::new(3.0).unwrap()).unwrap(),
            ),
            ConceptClass::Phi(PhiSpec::new(PhiPreset::InversePower { k: 2 }, 9).unwrap()),
            ConceptClass::FunctionPolytope(FunctionPolytope::from_f64(vec![vec![0.5, -1.0], vec![0.25, 0.0]]).unwrap()),
            ConceptClass::BallPair {
                space: FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
                params: BallPairParams::new(0.25, 0.75).unwrap(),
            },
        ];
        for c in classes {
            let json = serde_json::to_string(&c.descriptor()).unwrap();
            let back = serde_json::from_str::<ClassDescriptor>(&json).unwrap().build().unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn member_kind_mismatch_rejected() {
        let c = ConceptClass::Phi(PhiSpec::new(PhiPreset::InversePower { k: 1 }, 5).unwrap());
        assert!(c.evaluate(&Member::BallCenter { center: 0 }, 0).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn classes() -> Vec<ConceptClass> {
            let pts = vec![vec![0.6, 0.8, 0.0], vec![-0.5, 0.5, 0.5], vec![0.0, 0.0, 1.0], vec![0.3, -0.3, 0.3]];
            let m = vec![
                vec![0.0, 0.5, 0.75, 1.0],
                vec![0.5, 0.0, 0.5, 0.75],
                vec![0.75, 0.5, 0.0, 0.5],
                vec![1.0, 0.75, 0.5, 0.0],
            ];
            let space = FiniteMetricSpace::from_matrix(m).unwrap();
            let mut out = vec![
                ConceptClass::DualBall(DualBall::new(pts.clone(), NormSpec::L2).unwrap()),
                ConceptClass::DualBall(DualBall::new(pts, NormSpec::new(3.0).unwrap()).unwrap()),
                ConceptClass::Phi(PhiSpec::new(PhiPreset::Exponential, 4).unwrap()),
                ConceptClass::FunctionPolytope(
                    FunctionPolytope::from_f64(vec![vec![1.0, 0.5, -0.25, 0.0], vec![0.0, -1.0, 0.5, 0.75]]).unwrap(),
                ),
            ];
            for v in [DistanceVariant::Full, DistanceVariant::Pos, DistanceVariant::Neg] {
                out.push(ConceptClass::DistanceCombination(DistanceClass::all_centers(space.clone(), v).unwrap()));
            }
            out
        }

        fn weights() -> impl Strategy<Value = SimplexWeights> {
            prop::collection::vec(0.0f64..1.0, 4).prop_filter_map("zero mass", |v| SimplexWeights::normalized(v).ok())
        }

        proptest! {
            #[test]
            fn support_convex_and_maximizer_sound(
                m1 in weights(), m2 in weights(), t in 0.0f64..1.0, bits in 0u8..16,
            ) {
                let labels = (0..4).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
                let sample = LabeledSample::new(vec![0, 1, 2, 3], labels).unwrap();
                let mid = m1.mix(&m2, t).unwrap();
                for c in classes() {
                    let s1 = c.support(&sample, &m1).unwrap();
                    let s2 = c.support(&sample, &m2).unwrap();
                    let sm = c.support(&sample, &mid).unwrap();
                    prop_assert!(sm.value <= t * s1.value + (1.0 - t) * s2.value + 1e-9, "{:?}", c.kind());
                    if let Some(f) = &s1.maximizer {
                        let again = c.pairing(f, &sample, &m1).unwrap();
                        prop_assert!((again - s1.value).abs() < 1e-9, "{:?}", c.kind());
                    }
                    if c.is_symmetric() {
                        let flipped = c.support(&sample.flipped(), &m1).unwrap();
                        prop_assert!((flipped.value - s1.value).abs() < 1e-9, "{:?}", c.kind());
                    }
                }
            }

            #[test]
            fn pos_and_neg_swap_under_flip(m in weights(), bits in 0u8..16) {
                let labels = (0..4).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
                let sample = LabeledSample::new(vec![0, 1, 2, 3], labels).unwrap();
                let cs = classes();
                let (pos, neg) = (&cs[5], &cs[6]);
                let a = pos.support(&sample, &m).unwrap().value;
                let b = neg.support(&sample.flipped(), &m).unwrap().value;
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
