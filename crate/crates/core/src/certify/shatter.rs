use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::realize::{realize, RealizeStatus, RealizeVerdict};
use super::Gamma;
use crate::classes::{ConceptClass, LabeledSample, Member};
use crate::error::{Error, Result};
use crate::number::{Number, Rational};
use crate::solver::{fold_signs, SignedWeights, SimplexWeights, SolverConfig};
use crate::spaces::NormSpec;

/// Largest point set `is_shattered` enumerates.
pub const MAX_SHATTER_POINTS: usize = 20;
/// Largest ground set `max_shattered_subset` searches.
pub const MAX_SEARCH_GROUND: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShatterStatus {
    Shattered,
    NotShattered,
    Marginal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternWitness {
    pub labels: Vec<i8>,
    pub witness: Option<Member>,
}

/// First failing labeling with its collapse weights `lambda_i = y_i mu_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub labels: Vec<i8>,
    /// Absent for the ball-pair class, which has no convex certificate.
    pub lambda: Option<SignedWeights>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShatterVerdict {
    pub status: ShatterStatus,
    pub gamma: f64,
    pub points: Vec<usize>,
    pub band: f64,
    /// One witness per enumerated labeling; for symmetric classes only the
    /// labelings with a leading `+1` are enumerated (negate for the rest).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<PatternWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// First labeling whose verdict fell in the undecided band.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marginal_pattern: Option<Vec<i8>>,
}

impl ShatterVerdict {
    /// Re-evaluates the stored certificates: every witness reaches margin
    /// `gamma - tol`, and the counterexample's support is at most `gamma`.
    pub fn recheck(&self, class: &ConceptClass, tol: f64) -> Result<bool> {
        for pw in &self.witnesses {
            let Some(w) = &pw.witness else { return Ok(false) };
            let s = LabeledSample::new(self.points.clone(), pw.labels.clone())?;
            if class.margin(w, &s)? < self.gamma - tol {
                return Ok(false);
            }
        }
        if let Some(cex) = &self.counterexample {
            if let Some(lambda) = &cex.lambda {
                let mu = SimplexWeights::normalized(lambda.as_slice().iter().map(|l| l.abs()).collect())?;
                let s = LabeledSample::new(self.points.clone(), cex.labels.clone())?;
                if class.support(&s, &mu)?.value > self.gamma + tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Labels of pattern `t`: point `i` is negative when bit `n - 1 - i` is set,
/// so numeric order is lexicographic order with `+1` before `-1`.
pub(crate) fn pattern_labels(t: usize, n: usize) -> Vec<i8> {
    (0..n).map(|i| if t >> (n - 1 - i) & 1 == 1 { -1 } else { 1 }).collect()
}

/// Decides whether every labeling of `points` is realized with margin
/// `gamma`. Labelings are checked in parallel; the reported counterexample
/// is the first failing labeling in pattern order regardless of scheduling.
pub fn is_shattered(
    class: &ConceptClass,
    points: &[usize],
    gamma: &Gamma,
    cfg: &SolverConfig,
) -> Result<ShatterVerdict> {
    let n = points.len();
    if n == 0 {
        return Err(Error::input("cannot test shattering of an empty point set"));
    }
    if n > MAX_SHATTER_POINTS {
        return Err(Error::input(format!(
            "{n} points exceed the enumeration cap of {MAX_SHATTER_POINTS}; use max_shattered_subset on a ground set"
        )));
    }
    let count = if class.is_symmetric() { 1usize << (n - 1) } else { 1usize << n };
    let first_stop = AtomicUsize::new(usize::MAX);
    let results: Vec<Option<Result<RealizeVerdict>>> = (0..count)
        .into_par_iter()
        .map(|t| {
            if t > first_stop.load(AtomicOrdering::Relaxed) {
                return None;
            }
            let sample = LabeledSample::new(points.to_vec(), pattern_labels(t, n));
            let r = sample.and_then(|s| realize(class, &s, gamma, cfg));
            if !matches!(&r, Ok(v) if v.status != RealizeStatus::NotRealized) {
                first_stop.fetch_min(t, AtomicOrdering::Relaxed);
            }
            Some(r)
        })
        .collect();

    let mut verdict = ShatterVerdict {
        status: ShatterStatus::Shattered,
        gamma: gamma.value(),
        points: points.to_vec(),
        band: 0.0,
        witnesses: Vec::with_capacity(count),
        counterexample: None,
        marginal_pattern: None,
    };
    for (t, r) in results.into_iter().enumerate() {
        let Some(r) = r else { continue };
        let v = r?;
        verdict.band = verdict.band.max(v.band);
        let labels = pattern_labels(t, n);
        match v.status {
            RealizeStatus::Realized => verdict.witnesses.push(PatternWitness { labels, witness: v.witness }),
            RealizeStatus::Marginal => {
                if verdict.marginal_pattern.is_none() {
                    verdict.marginal_pattern = Some(labels);
                }
            }
            RealizeStatus::NotRealized => {
                let lambda = v.collapse.as_ref().map(|c| fold_signs(&c.mu, &labels)).transpose()?;
                let value = v.collapse.as_ref().map_or(v.value, |c| c.value);
                verdict.status = ShatterStatus::NotShattered;
                verdict.counterexample = Some(Counterexample { labels, lambda, value });
                verdict.witnesses.clear();
                return Ok(verdict);
            }
        }
    }
    if verdict.marginal_pattern.is_some() {
        verdict.status = ShatterStatus::Marginal;
        verdict.witnesses.clear();
    }
    Ok(verdict)
}

/// Whether flipping the sign of any single point's values is an automorphism
/// of the class restricted to `points`: true for dual balls over points with
/// pairwise disjoint coordinate supports (coordinate sign flips are `l_p`
/// isometries) and for the φ-class, which is a box.
pub fn sign_invariant(class: &ConceptClass, points: &[usize]) -> bool {
    match class {
        ConceptClass::Phi(_) => true,
        ConceptClass::DualBall(c) => {
            let mut used = vec![false; c.dim()];
            for &p in points {
                for (j, &x) in c.points()[p].iter().enumerate() {
                    if x != 0.0 {
                        if used[j] {
                            return false;
                        }
                        used[j] = true;
                    }
                }
            }
            true
        }
        _ => false,
    }
}

/// Shattering test for sign-invariant point sets (see [`sign_invariant`]):
/// every labeling is the image of the all-positive one under a class
/// automorphism, so that labeling alone decides. The verdict carries a
/// single witness or counterexample; there is no cap on `points`.
pub fn is_shattered_sign_invariant(
    class: &ConceptClass,
    points: &[usize],
    gamma: &Gamma,
    cfg: &SolverConfig,
) -> Result<ShatterVerdict> {
    if points.is_empty() {
        return Err(Error::input("cannot test shattering of an empty point set"));
    }
    if !sign_invariant(class, points) {
        return Err(Error::input("point set is not sign-invariant for this class"));
    }
    let labels = vec![1i8; points.len()];
    let v = realize(class, &LabeledSample::new(points.to_vec(), labels.clone())?, gamma, cfg)?;
    let mut verdict = ShatterVerdict {
        status: ShatterStatus::Shattered,
        gamma: gamma.value(),
        points: points.to_vec(),
        band: v.band,
        witnesses: vec![],
        counterexample: None,
        marginal_pattern: None,
    };
    match v.status {
        RealizeStatus::Realized => verdict.witnesses.push(PatternWitness { labels, witness: v.witness }),
        RealizeStatus::Marginal => {
            verdict.status = ShatterStatus::Marginal;
            verdict.marginal_pattern = Some(labels);
        }
        RealizeStatus::NotRealized => {
            let lambda = v.collapse.as_ref().map(|c| fold_signs(&c.mu, &labels)).transpose()?;
            let value = v.collapse.as_ref().map_or(v.value, |c| c.value);
            verdict.status = ShatterStatus::NotShattered;
            verdict.counterexample = Some(Counterexample { labels, lambda, value });
        }
    }
    Ok(verdict)
}

fn signed_sum(points: &[Vec<f64>], lambda: &[f64]) -> Result<Vec<f64>> {
    if points.len() != lambda.len() || points.is_empty() {
        return Err(Error::input(format!("{} points for {} weights", points.len(), lambda.len())));
    }
    let d = points[0].len();
    let mut z = vec![0.0; d];
    for (x, l) in points.iter().zip(lambda) {
        if x.len() != d {
            return Err(Error::input("points differ in dimension"));
        }
        for (zj, xj) in z.iter_mut().zip(x) {
            *zj += l * xj;
        }
    }
    Ok(z)
}

/// `||sum lambda_i x_i|| <= gamma`, by direct evaluation.
pub fn verify_collapse(points: &[Vec<f64>], n: NormSpec, lambda: &SignedWeights, gamma: f64) -> Result<bool> {
    Ok(n.eval(&signed_sum(points, lambda.as_slice())?) <= gamma)
}

/// Exact version of [`verify_collapse`] for `p` in `{1, 2, inf}`.
pub fn verify_collapse_exact(points: &[Vec<f64>], n: NormSpec, lambda: &[Rational], gamma: &Gamma) -> Result<bool> {
    if points.len() != lambda.len() || points.is_empty() {
        return Err(Error::input(format!("{} points for {} weights", points.len(), lambda.len())));
    }
    let d = points[0].len();
    let mut z = vec![Rational::zero(); d];
    for (x, l) in points.iter().zip(lambda) {
        for (zj, &xj) in z.iter_mut().zip(x) {
            *zj = zj.add(&l.mul(&Rational::from_f64(xj)));
        }
    }
    let cmp = if n.is_l2() {
        gamma.cmp_square(&z.iter().fold(Rational::zero(), |acc, v| acc.add(&v.mul(v))))
    } else if n.is_l1() {
        gamma.cmp_value(&z.iter().fold(Rational::zero(), |acc, v| acc.add(&v.abs())))
    } else if n.is_linf() {
        gamma.cmp_value(&z.iter().fold(Rational::zero(), |acc, v| acc.max_of(v.abs())))
    } else {
        return Err(Error::input(format!("exact collapse check needs p in {{1, 2, inf}}, got {n}")));
    };
    Ok(cmp != std::cmp::Ordering::Greater)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of `is_shattered` calls before giving up.
    pub max_tests: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_tests: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionSearch {
    pub size: usize,
    /// Ground indices of a maximum shattered subset.
    pub subset: Vec<usize>,
    /// Verdict for `subset` (absent when it is empty).
    pub verdict: Option<ShatterVerdict>,
    /// Certificates for every tested extension that was not shattered.
    pub rejected: Vec<ShatterVerdict>,
    /// The search stopped early; `size` is only a lower bound.
    pub lower_bound_only: bool,
    /// Some tested subset fell in the undecided band (treated as not shattered).
    pub marginal: bool,
    pub tests: usize,
}

struct Search<'a> {
    class: &'a ConceptClass,
    ground: &'a [usize],
    gamma: &'a Gamma,
    cfg: &'a SolverConfig,
    max_tests: usize,
    memo: HashMap<u64, bool>,
    shattered: HashMap<u64, ShatterVerdict>,
    out: DimensionSearch,
}

impl Search<'_> {
    fn members(&self, mask: u64) -> Vec<usize> {
        (0..self.ground.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.ground[i]).collect()
    }

    /// `None` once the budget is spent.
    fn test(&mut self, mask: u64) -> Result<Option<bool>> {
        if let Some(&b) = self.memo.get(&mask) {
            return Ok(Some(b));
        }
        if self.out.tests >= self.max_tests || mask.count_ones() as usize > MAX_SHATTER_POINTS {
            self.out.lower_bound_only = true;
            return Ok(None);
        }
        self.out.tests += 1;
        let v = is_shattered(self.class, &self.members(mask), self.gamma, self.cfg)?;
        let ok = v.status == ShatterStatus::Shattered;
        match v.status {
            ShatterStatus::Shattered => {
                self.shattered.insert(mask, v);
            }
            ShatterStatus::Marginal => self.out.marginal = true,
            ShatterStatus::NotShattered => self.out.rejected.push(v),
        }
        self.memo.insert(mask, ok);
        Ok(Some(ok))
    }

    /// Some one-smaller subset is already known not to be shattered.
    fn has_failed_face(&self, mask: u64) -> bool {
        let mut rest = mask;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            rest &= rest - 1;
            let face = mask & !bit;
            if face != 0 && self.memo.get(&face) == Some(&false) {
                return true;
            }
        }
        false
    }

    fn dfs(&mut self, mask: u64, next: usize, best: &mut u64) -> Result<()> {
        let m = self.ground.len();
        for p in next..m {
            let size = mask.count_ones() as usize + 1;
            if size + (m - p - 1) <= best.count_ones() as usize {
                break;
            }
            let cand = mask | 1 << p;
            if self.has_failed_face(cand) {
                continue;
            }
            match self.test(cand)? {
                None => return Ok(()),
                Some(false) => {}
                Some(true) => {
                    if cand.count_ones() > best.count_ones() {
                        *best = cand;
                    }
                    self.dfs(cand, p + 1, best)?;
                }
            }
        }
        Ok(())
    }
}

/// Exact `gamma`-dimension of the class restricted to `ground`.
///
/// A greedy pass seeds the bound; depth-first search then extends only
/// shattered sets (every subset of a shattered set is shattered) and skips
/// candidates with a known non-shattered face.
pub fn max_shattered_subset(
    class: &ConceptClass,
    ground: &[usize],
    gamma: &Gamma,
    cfg: &SolverConfig,
    opts: SearchOptions,
) -> Result<DimensionSearch> {
    if ground.len() > MAX_SEARCH_GROUND {
        return Err(Error::input(format!("ground set of {} exceeds {MAX_SEARCH_GROUND}", ground.len())));
    }
    let mut s = Search {
        class,
        ground,
        gamma,
        cfg,
        max_tests: opts.max_tests,
        memo: HashMap::new(),
        shattered: HashMap::new(),
        out: DimensionSearch {
            size: 0,
            subset: vec![],
            verdict: None,
            rejected: vec![],
            lower_bound_only: false,
            marginal: false,
            tests: 0,
        },
    };
    let mut best = 0u64;
    for p in 0..ground.len() {
        match s.test(best | 1 << p)? {
            Some(true) => best |= 1 << p,
            Some(false) => {}
            None => break,
        }
    }
    if !s.out.lower_bound_only {
        s.dfs(0, 0, &mut best)?;
    }
    s.out.size = best.count_ones() as usize;
    s.out.subset = s.members(best);
    s.out.verdict = s.shattered.remove(&best);
    Ok(s.out)
}
