use serde::{Deserialize, Serialize};

use super::{LabeledSample, Member, Support};
use crate::error::{Error, Result};
use crate::number::Number;
use crate::solver::{lp_solve, Bound, LinearProgram, LpOutcome, SimplexWeights, SolverConfig};
use crate::spaces::FiniteMetricSpace;

/// Which part of the distance-combination class.
///
/// `Pos` keeps coefficient vectors whose positive mass is at least one half,
/// after splitting `a = a+ - a-` with `sum(a+ + a-) <= 1`. Minimizing over
/// the split this is exactly `{sum |a| <= 1, sum a >= 0}`. `Neg` is its
/// negation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceVariant {
    Full,
    Pos,
    Neg,
}

/// `{ sum_c a_c d(c, .) : sum |a_c| <= 1 }` over a finite center set.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceClass {
    pub space: FiniteMetricSpace,
    pub centers: Vec<usize>,
    pub variant: DistanceVariant,
}

impl DistanceClass {
    pub fn new(space: FiniteMetricSpace, centers: Vec<usize>, variant: DistanceVariant) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::input("distance-combination class needs at least one center"));
        }
        if let Some(&c) = centers.iter().find(|&&c| c >= space.len()) {
            return Err(Error::input(format!("center {c} outside the space")));
        }
        Ok(DistanceClass { space, centers, variant })
    }

    /// All points of the space as centers.
    pub fn all_centers(space: FiniteMetricSpace, variant: DistanceVariant) -> Result<Self> {
        let centers = (0..space.len()).collect();
        Self::new(space, centers, variant)
    }

    /// `g_c = sum_i mu_i y_i d(c, x_i)` for every center.
    fn pairings(&self, sample: &LabeledSample, mu: &SimplexWeights) -> Vec<f64> {
        self.centers
            .iter()
            .map(|&c| {
                sample
                    .points
                    .iter()
                    .zip(&sample.labels)
                    .zip(mu.as_slice())
                    .map(|((&x, &y), m)| m * f64::from(y) * self.space.dist(c, x))
                    .sum()
            })
            .collect()
    }

    /// Split-coefficient constraints shared by the support and margin LPs.
    /// Variables `0..k` are `a+`, `k..2k` are `a-`; `extra` more columns follow.
    fn coefficient_rows<T: Number>(&self, extra: usize) -> Vec<(Vec<T>, T)> {
        let k = self.centers.len();
        let width = 2 * k + extra;
        let mut rows = vec![];
        let mut mass = vec![T::zero(); width];
        mass[..2 * k].iter_mut().for_each(|v| *v = T::one());
        rows.push((mass, T::one()));
        let half = T::one().div(&T::from_int(2));
        let side = match self.variant {
            DistanceVariant::Full => None,
            DistanceVariant::Pos => Some(0..k),
            DistanceVariant::Neg => Some(k..2 * k),
        };
        if let Some(range) = side {
            let mut r = vec![T::zero(); width];
            r[range].iter_mut().for_each(|v| *v = T::one().neg());
            rows.push((r, half.neg()));
        }
        rows
    }

    fn member_from_split(&self, x: &[f64]) -> Member {
        let k = self.centers.len();
        let coefficients =
            self.centers.iter().enumerate().map(|(j, &c)| (c, x[j] - x[k + j])).filter(|&(_, a)| a != 0.0).collect();
        Member::DistanceCombination { coefficients }
    }
}

/// Support function of the class on a labeled sample.
///
/// The full class is the convex hull of `+-d_c`, so the support is the
/// largest `|g_c|`. The halves go through the LP.
pub fn support_distance_combination(
    class: &DistanceClass,
    sample: &LabeledSample,
    mu: &SimplexWeights,
) -> Result<Support> {
    let g = class.pairings(sample, mu);
    if class.variant == DistanceVariant::Full {
        let (j, best) =
            g.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (j, v)| if v.abs() > acc.1 { (j, v.abs()) } else { acc });
        let sign = if g[j] < 0.0 { -1.0 } else { 1.0 };
        let maximizer = Member::DistanceCombination { coefficients: vec![(class.centers[j], sign)] };
        return Ok(Support { value: best, maximizer: Some(maximizer) });
    }
    let k = class.centers.len();
    let objective: Vec<f64> = g.iter().copied().chain(g.iter().map(|v| -v)).collect();
    let mut lp = LinearProgram::maximize(objective);
    for (row, rhs) in class.coefficient_rows::<f64>(0) {
        lp = lp.le(row, rhs);
    }
    let opt = match lp_solve(&lp, &SolverConfig::default())? {
        LpOutcome::Optimal(o) => o,
        other => return Err(Error::degenerate(format!("distance support LP did not reach an optimum: {other:?}"))),
    };
    debug_assert_eq!(opt.x.len(), 2 * k);
    Ok(Support { value: opt.value, maximizer: Some(class.member_from_split(&opt.x)) })
}

/// Optimum of a max-margin LP: the best margin, the dual collapse weights on
/// the sample, and an optimal member.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxMargin<T> {
    pub value: T,
    pub mu: Vec<T>,
    pub member: Member,
}

/// Solves an LP whose last column is the free margin variable `t` and whose
/// first `sample.len()` rows are the margin rows; reads `mu` off their duals.
pub(crate) fn solve_margin_lp<T: Number>(
    lp: &LinearProgram<T>,
    n: usize,
    cfg: &SolverConfig,
) -> Result<(T, Vec<T>, Vec<f64>)> {
    let opt = match lp_solve(lp, cfg)? {
        LpOutcome::Optimal(o) => o,
        other => return Err(Error::degenerate(format!("margin LP has no optimum: {other:?}"))),
    };
    let mu: Vec<T> = opt.dual_ub[..n].iter().map(|v| v.clone().max_of(T::zero())).collect();
    let x = opt.x.iter().map(Number::to_f64).collect();
    Ok((opt.value, mu, x))
}

/// `max_{f in F} min_i y_i f(x_i)`, which by LP duality equals
/// `min_mu support(mu, y)`.
pub fn distance_max_margin<T: Number>(
    class: &DistanceClass,
    sample: &LabeledSample,
    cfg: &SolverConfig,
) -> Result<MaxMargin<T>> {
    let k = class.centers.len();
    let width = 2 * k + 1;
    let mut objective = vec![T::zero(); width];
    objective[2 * k] = T::one();
    let mut lp = LinearProgram::maximize(objective).bound(2 * k, Bound::free());
    for (&x, &y) in sample.points.iter().zip(&sample.labels) {
        let mut row = vec![T::zero(); width];
        for (j, &c) in class.centers.iter().enumerate() {
            let d = T::from_f64(class.space.dist(c, x));
            let yd = if y > 0 { d } else { d.neg() };
            row[j] = yd.neg();
            row[k + j] = yd;
        }
        row[2 * k] = T::one();
        lp = lp.le(row, T::zero());
    }
    for (row, rhs) in class.coefficient_rows::<T>(1) {
        lp = lp.le(row, rhs);
    }
    let (value, mu, x) = solve_margin_lp(&lp, sample.len(), cfg)?;
    Ok(MaxMargin { value, mu, member: class.member_from_split(&x) })
}
