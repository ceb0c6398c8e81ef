use serde::Serialize;

use super::{LabeledSample, Member, Support};
use crate::error::{Error, Result};
use crate::solver::{lp_solve, Bound, LinearProgram, LpOutcome, SimplexWeights, SolverConfig};
use crate::spaces::FiniteMetricSpace;

/// Outcome of the separation test for the 1-Lipschitz class.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LipVerdict {
    /// A realizing member: the half-difference extension, or a constant
    /// for one-sided samples.
    Yes { witness: Member },
    /// Closest positive/negative pair, closer than `2 gamma`.
    No { positive: usize, negative: usize, distance: f64 },
}

impl LipVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, LipVerdict::Yes { .. })
    }
}

/// Closest cross pair `(x+, x-, d)`, first in index order on ties.
pub fn closest_cross_pair(space: &FiniteMetricSpace, sample: &LabeledSample) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for p in sample.positives() {
        for q in sample.negatives() {
            let d = space.dist(p, q);
            if best.is_none_or(|(_, _, b)| d < b) {
                best = Some((p, q, d));
            }
        }
    }
    best
}

/// Realizable with margin `gamma` iff `d(S+, S-) >= 2 gamma`.
pub fn lip_realizable(space: &FiniteMetricSpace, sample: &LabeledSample, gamma: f64) -> LipVerdict {
    let pos: Vec<usize> = sample.positives().collect();
    let neg: Vec<usize> = sample.negatives().collect();
    match closest_cross_pair(space, sample) {
        None => {
            let value = if neg.is_empty() { gamma } else { -gamma };
            LipVerdict::Yes { witness: Member::Constant { value } }
        }
        Some((positive, negative, distance)) if distance < 2.0 * gamma => {
            LipVerdict::No { positive, negative, distance }
        }
        Some(_) => LipVerdict::Yes { witness: Member::LipschitzExtension { positives: pos, negatives: neg } },
    }
}

fn set_distance(space: &FiniteMetricSpace, set: &[usize], x: usize) -> f64 {
    set.iter().map(|&s| space.dist(s, x)).fold(f64::INFINITY, f64::min)
}

pub(super) fn extension_value(space: &FiniteMetricSpace, pos: &[usize], neg: &[usize], x: usize) -> Result<f64> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::degenerate(
            "the half-difference extension needs both labels; one-sided samples are realized by a constant",
        ));
    }
    Ok((set_distance(space, neg, x) - set_distance(space, pos, x)) / 2.0)
}

/// `(d(S-, x) - d(S+, x)) / 2`.
pub fn lip_extension_eval(space: &FiniteMetricSpace, sample: &LabeledSample, x: usize) -> Result<f64> {
    if x >= space.len() {
        return Err(Error::input(format!("query point {x} outside the space")));
    }
    let pos: Vec<usize> = sample.positives().collect();
    let neg: Vec<usize> = sample.negatives().collect();
    extension_value(space, &pos, &neg, x)
}

/// Support function of the 1-Lipschitz class.
///
/// Constants belong to the class, so the value is `+inf` unless the signed
/// weights sum to zero; then it is the transport LP over the sample values,
/// and the maximizer is the smallest 1-Lipschitz extension of the optimum.
pub fn lip_support(space: &FiniteMetricSpace, sample: &LabeledSample, mu: &SimplexWeights) -> Result<Support> {
    let mut pts: Vec<usize> = sample.points.clone();
    pts.sort_unstable();
    pts.dedup();
    let mut c = vec![0.0; pts.len()];
    for ((&x, &y), m) in sample.points.iter().zip(&sample.labels).zip(mu.as_slice()) {
        let j = pts.binary_search(&x).expect("sample point present");
        c[j] += f64::from(y) * m;
    }
    if c.iter().sum::<f64>().abs() > 1e-12 {
        return Ok(Support { value: f64::INFINITY, maximizer: None });
    }
    let n = pts.len();
    let mut lp = LinearProgram::maximize(c);
    for j in 0..n {
        lp = lp.bound(j, Bound::free());
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let mut row = vec![0.0; n];
                row[a] = 1.0;
                row[b] = -1.0;
                lp = lp.le(row, space.dist(pts[a], pts[b]));
            }
        }
    }
    match lp_solve(&lp, &SolverConfig::default())? {
        LpOutcome::Optimal(o) => {
            let values = pts.iter().copied().zip(o.x.iter().copied()).collect();
            Ok(Support { value: o.value, maximizer: Some(Member::LipschitzTable { values }) })
        }
        LpOutcome::Unbounded(_) => Ok(Support { value: f64::INFINITY, maximizer: None }),
        LpOutcome::Infeasible(_) => Err(Error::degenerate("Lipschitz support LP infeasible")),
    }
}

/// `min_j (f_j + d(x_j, x))`.
pub(super) fn table_extension(space: &FiniteMetricSpace, values: &[(usize, f64)], x: usize) -> f64 {
    values.iter().map(|&(p, v)| v + space.dist(p, x)).fold(f64::INFINITY, f64::min)
}
