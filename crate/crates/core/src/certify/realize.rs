use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::Gamma;
use crate::classes::{
    ball_pair_realizable, distance_max_margin, lip_realizable, phi_realizable, polytope_max_margin, BallPairVerdict,
    ConceptClass, DualBall, LabeledSample, LipVerdict, MaxMargin, Member, PhiVerdict,
};
use crate::error::Result;
use crate::number::{Number, Rational};
use crate::solver::{min_norm_point_exact, min_norm_point_until, Arithmetic, SimplexWeights, SolverConfig};
use crate::spaces::NormSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizeStatus {
    Realized,
    NotRealized,
    Marginal,
}

/// Weights on the sample whose support value falls below `gamma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Collapse {
    pub mu: SimplexWeights,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizeVerdict {
    pub status: RealizeStatus,
    /// Estimate of `min_mu support(mu, y)` (an upper bound for float solves).
    pub value: f64,
    /// Certified bound on `value - min`.
    pub gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Member>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collapse: Option<Collapse>,
    /// Undecided band used; zero on exact paths.
    pub band: f64,
}

impl RealizeVerdict {
    fn exact(ok: bool, value: f64, witness: Option<Member>, collapse: Option<Collapse>) -> Self {
        RealizeVerdict {
            status: if ok { RealizeStatus::Realized } else { RealizeStatus::NotRealized },
            value,
            gap: 0.0,
            witness: if ok { witness } else { None },
            collapse: if ok { None } else { collapse },
            band: 0.0,
        }
    }
}

/// Float decision: realized when the certified lower bound clears the band,
/// not realized when the achieved value is below it.
fn banded(value: f64, gap: f64, gamma: f64, band: f64) -> RealizeStatus {
    if value - gap > gamma + band {
        RealizeStatus::Realized
    } else if value < gamma - band {
        RealizeStatus::NotRealized
    } else {
        RealizeStatus::Marginal
    }
}

/// Decides whether the class realizes the labeled sample with margin
/// `gamma`.
///
/// A labeling is not realized iff some `mu` in the simplex has
/// `support(mu, y) < gamma`; `realize` computes `m* = min_mu support(mu, y)`
/// by a min-norm solve for dual balls and by a max-margin LP for the
/// polyhedral classes. Lipschitz, ball-pair and φ-classes use their closed
/// forms.
pub fn realize(
    class: &ConceptClass,
    sample: &LabeledSample,
    gamma: &Gamma,
    cfg: &SolverConfig,
) -> Result<RealizeVerdict> {
    cfg.validate()?;
    class.check_sample(sample)?;
    let g = gamma.value();
    match class {
        ConceptClass::DualBall(c) => realize_dual_ball(c, sample, gamma, cfg),
        ConceptClass::DistanceCombination(c) => {
            if cfg.is_exact() {
                decide_exact_lp(distance_max_margin::<Rational>(c, sample, cfg)?, gamma)
            } else {
                decide_float_lp(distance_max_margin::<f64>(c, sample, cfg)?, g, cfg)
            }
        }
        ConceptClass::FunctionPolytope(p) => {
            if cfg.is_exact() {
                decide_exact_lp(polytope_max_margin::<Rational>(p, sample, cfg)?, gamma)
            } else {
                decide_float_lp(polytope_max_margin::<f64>(p, sample, cfg)?, g, cfg)
            }
        }
        ConceptClass::Lipschitz(space) => Ok(match lip_realizable(space, sample, g) {
            LipVerdict::Yes { witness } => {
                let m = crate::classes::closest_cross_pair(space, sample).map_or(f64::INFINITY, |t| t.2 / 2.0);
                RealizeVerdict::exact(true, m, Some(witness), None)
            }
            LipVerdict::No { positive, negative, distance } => {
                let mu = pair_weights(sample, positive, negative)?;
                RealizeVerdict::exact(false, distance / 2.0, None, Some(Collapse { mu, value: distance / 2.0 }))
            }
        }),
        ConceptClass::BallPair { space, params } => Ok(match ball_pair_realizable(space, sample, *params) {
            BallPairVerdict::Yes { center } => {
                RealizeVerdict::exact(true, 1.0, Some(Member::BallCenter { center }), None)
            }
            BallPairVerdict::No => {
                // best `min_i y_i f(x_i)` over all centers, with the undefined band as 0
                let best = (0..space.len())
                    .map(|c| {
                        sample
                            .points
                            .iter()
                            .zip(&sample.labels)
                            .map(|(&x, &y)| i32::from(y) * i32::from(params.label(space.dist(c, x))))
                            .min()
                            .unwrap_or(1)
                    })
                    .max()
                    .unwrap_or(-1);
                RealizeVerdict::exact(false, f64::from(best), None, None)
            }
        }),
        ConceptClass::Phi(spec) => Ok(match phi_realizable(spec, sample, g) {
            PhiVerdict::Yes { witness } => RealizeVerdict::exact(true, g, Some(witness), None),
            PhiVerdict::No { point } => {
                let i = sample.points.iter().position(|&x| x as u64 + 1 == point).expect("violating point in sample");
                let mu = SimplexWeights::vertex(sample.len(), i);
                let value = spec.tau(point);
                RealizeVerdict::exact(false, value, None, Some(Collapse { mu, value }))
            }
        }),
    }
}

/// Half the mass on each point of a violating cross pair.
fn pair_weights(sample: &LabeledSample, positive: usize, negative: usize) -> Result<SimplexWeights> {
    let mut mu = vec![0.0; sample.len()];
    let p = sample.points.iter().zip(&sample.labels).position(|(&x, &y)| x == positive && y > 0);
    let q = sample.points.iter().zip(&sample.labels).position(|(&x, &y)| x == negative && y < 0);
    mu[p.expect("positive in sample")] += 0.5;
    mu[q.expect("negative in sample")] += 0.5;
    SimplexWeights::new(mu)
}

fn realize_dual_ball(
    c: &DualBall,
    sample: &LabeledSample,
    gamma: &Gamma,
    cfg: &SolverConfig,
) -> Result<RealizeVerdict> {
    let u = c.signed_points(sample);
    let n = c.norm();
    let exact_norm = n.is_l1() || n.is_l2() || n.is_linf();
    if cfg.is_exact() && exact_norm {
        if !n.is_l2() {
            if let Some(v) = polyhedral_shortcut(&u, n, gamma, cfg)? {
                return Ok(v);
            }
        }
        let mn = min_norm_point_exact(&u, n, cfg)?;
        let ex = mn.exact.as_ref().expect("exact solve");
        let ok = gamma.cmp_square(&ex.value_sq) != Ordering::Less;
        let collapse = Collapse { mu: mn.mu.clone(), value: mn.value };
        return Ok(RealizeVerdict::exact(ok, mn.value, mn.witness.map(|w| Member::Linear { w }), Some(collapse)));
    }
    let band = cfg.band();
    let mn = min_norm_point_until(&u, n, cfg, Some(gamma.value() + band))?;
    let status = banded(mn.value, mn.gap, gamma.value(), band);
    Ok(RealizeVerdict {
        status,
        value: mn.value,
        gap: mn.gap,
        witness: if status == RealizeStatus::Realized { mn.witness.map(|w| Member::Linear { w }) } else { None },
        collapse: (status == RealizeStatus::NotRealized).then_some(Collapse { mu: mn.mu, value: mn.value }),
        band,
    })
}

/// Float solve for `p` in `{1, inf}` whose dual witness or collapse is then
/// checked exactly at the binary values of the floats. `None` when neither
/// certificate survives the exact check.
fn polyhedral_shortcut(
    u: &[Vec<f64>],
    n: NormSpec,
    gamma: &Gamma,
    cfg: &SolverConfig,
) -> Result<Option<RealizeVerdict>> {
    let fcfg = SolverConfig { arithmetic: Arithmetic::Float, ..*cfg };
    let mn = min_norm_point_until(u, n, &fcfg, None)?;
    let rat = |v: &[f64]| -> Vec<Rational> { v.iter().map(|&x| Rational::from_f64(x)).collect() };
    let pts: Vec<Vec<Rational>> = u.iter().map(|v| rat(v)).collect();
    if let Some(w) = &mn.witness {
        let wr = rat(w);
        let dual = if n.is_l1() {
            wr.iter().fold(<Rational as Number>::zero(), |m, x| m.max_of(x.abs()))
        } else {
            wr.iter().fold(<Rational as Number>::zero(), |s, x| s.add(&x.abs()))
        };
        let certified = dual.cmp_exact(&<Rational as Number>::one()) != Ordering::Greater
            && pts.iter().all(|p| {
                let m = p.iter().zip(&wr).fold(<Rational as Number>::zero(), |s, (a, b)| s.add(&a.mul(b)));
                gamma.cmp_value(&m) != Ordering::Less
            });
        if certified {
            return Ok(Some(RealizeVerdict::exact(true, mn.value, Some(Member::Linear { w: w.clone() }), None)));
        }
    }
    let mu = rat(mn.mu.as_slice());
    let total = mu.iter().fold(<Rational as Number>::zero(), |s, x| s.add(x));
    if total.cmp_exact(&<Rational as Number>::zero()) == Ordering::Greater {
        let d = pts[0].len();
        let z: Vec<Rational> = (0..d)
            .map(|j| {
                pts.iter().zip(&mu).fold(<Rational as Number>::zero(), |s, (p, m)| s.add(&m.mul(&p[j]))).div(&total)
            })
            .collect();
        let norm = if n.is_l1() {
            z.iter().fold(<Rational as Number>::zero(), |s, x| s.add(&x.abs()))
        } else {
            z.iter().fold(<Rational as Number>::zero(), |m, x| m.max_of(x.abs()))
        };
        if gamma.cmp_value(&norm) == Ordering::Less {
            let collapse = Collapse { mu: mn.mu.clone(), value: norm.to_f64() };
            return Ok(Some(RealizeVerdict::exact(false, norm.to_f64(), None, Some(collapse))));
        }
    }
    Ok(None)
}

fn collapse_from(mu: &[f64], value: f64) -> Result<Collapse> {
    Ok(Collapse { mu: SimplexWeights::normalized(mu.to_vec())?, value })
}

fn decide_exact_lp(mm: MaxMargin<Rational>, gamma: &Gamma) -> Result<RealizeVerdict> {
    let ok = gamma.cmp_value(&mm.value) != Ordering::Less;
    let value = mm.value.to_f64();
    let mu: Vec<f64> = mm.mu.iter().map(Number::to_f64).collect();
    let collapse = if ok { None } else { Some(collapse_from(&mu, value)?) };
    Ok(RealizeVerdict::exact(ok, value, Some(mm.member), collapse))
}

fn decide_float_lp(mm: MaxMargin<f64>, gamma: f64, cfg: &SolverConfig) -> Result<RealizeVerdict> {
    let band = cfg.band();
    let status = banded(mm.value, 0.0, gamma, band);
    Ok(RealizeVerdict {
        status,
        value: mm.value,
        gap: 0.0,
        witness: (status == RealizeStatus::Realized).then_some(mm.member),
        collapse: if status == RealizeStatus::NotRealized { Some(collapse_from(&mm.mu, mm.value)?) } else { None },
        band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{DistanceClass, DistanceVariant};
    use crate::number::ratio;
    use crate::spaces::{FiniteMetricSpace, NormSpec};

    fn ball(points: Vec<Vec<f64>>, p: NormSpec) -> ConceptClass {
        ConceptClass::DualBall(DualBall::new(points, p).unwrap())
    }

    #[test]
    fn antipodal_same_label() {
        let c = ball(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], NormSpec::L2);
        let s = LabeledSample::new(vec![0, 1], vec![1, 1]).unwrap();
        let v = realize(&c, &s, &Gamma::new(0.1).unwrap(), &SolverConfig::default()).unwrap();
        assert_eq!(v.status, RealizeStatus::NotRealized);
        let col = v.collapse.unwrap();
        assert!((col.mu.as_slice()[0] - 0.5).abs() < 1e-9);
        assert!(col.value < 1e-7);
    }

    #[test]
    fn lipschitz_pair() {
        let space = FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = ConceptClass::Lipschitz(space);
        let s = LabeledSample::new(vec![0, 1], vec![1, -1]).unwrap();
        let v = realize(&c, &s, &Gamma::new(0.4).unwrap(), &SolverConfig::default()).unwrap();
        assert_eq!(v.status, RealizeStatus::Realized);
        assert!(c.margin(v.witness.as_ref().unwrap(), &s).unwrap() >= 0.4);
        let v = realize(&c, &s, &Gamma::new(0.6).unwrap(), &SolverConfig::default()).unwrap();
        assert_eq!(v.status, RealizeStatus::NotRealized);
        let col = v.collapse.unwrap();
        assert_eq!(col.mu.as_slice(), &[0.5, 0.5]);
        assert_eq!(col.value, 0.5);
    }

    #[test]
    fn exact_boundary_counts() {
        let c = ball(vec![vec![1.0, 0.0], vec![0.0, 1.0]], NormSpec::L2);
        let s = LabeledSample::new(vec![0, 1], vec![1, -1]).unwrap();
        let at = Gamma::sqrt_of(ratio(1, 2)).unwrap();
        let v = realize(&c, &s, &at, &SolverConfig::exact()).unwrap();
        assert_eq!(v.status, RealizeStatus::Realized);
        let above = Gamma::sqrt_of(ratio(1, 2) + ratio(1, 1_000_000)).unwrap();
        assert_eq!(realize(&c, &s, &above, &SolverConfig::exact()).unwrap().status, RealizeStatus::NotRealized);
        // float cannot resolve the boundary
        assert_eq!(realize(&c, &s, &at, &SolverConfig::default()).unwrap().status, RealizeStatus::Marginal);
    }

    #[test]
    fn distance_lp_paths_agree() {
        let m = vec![vec![0.0, 0.5, 1.0], vec![0.5, 0.0, 0.5], vec![1.0, 0.5, 0.0]];
        let space = FiniteMetricSpace::from_matrix(m).unwrap();
        let c = ConceptClass::DistanceCombination(DistanceClass::all_centers(space, DistanceVariant::Pos).unwrap());
        let s = LabeledSample::new(vec![0, 2], vec![1, -1]).unwrap();
        for gamma in [0.1, 0.3, 0.6] {
            let g = Gamma::new(gamma).unwrap();
            let a = realize(&c, &s, &g, &SolverConfig::default()).unwrap();
            let b = realize(&c, &s, &g, &SolverConfig::exact()).unwrap();
            assert_eq!(a.status, b.status, "gamma {gamma}");
            if let Some(w) = &a.witness {
                assert!(c.margin(w, &s).unwrap() >= gamma - 1e-7);
            }
            if let Some(col) = &b.collapse {
                assert!(c.support(&s, &col.mu).unwrap().value < gamma);
            }
        }
    }
}
