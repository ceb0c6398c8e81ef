//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Generic over [`Number`], so the same pivoting code runs in `f64` and in
//! exact rationals. Problems are stated as
//!
//! ```text
//! maximize    c'x
//! subject to  A_ub x <= b_ub,  A_eq x = b_eq,  lower <= x <= upper
//! ```
//!
//! and every outcome carries something checkable: dual multipliers for an
//! optimum, a Farkas multiplier vector for infeasibility, a feasible point
//! plus improving ray for unboundedness.

use std::cmp::Ordering;

use serde::Serialize;

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::number::Number;

/// Bounds on one variable; `None` means unbounded on that side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bound<T> {
    pub lower: Option<T>,
    pub upper: Option<T>,
}

impl<T: Number> Bound<T> {
    pub fn nonneg() -> Self {
        Bound { lower: Some(T::zero()), upper: None }
    }

    pub fn free() -> Self {
        Bound { lower: None, upper: None }
    }

    pub fn between(lower: T, upper: T) -> Self {
        Bound { lower: Some(lower), upper: Some(upper) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T> {
    /// Maximized.
    pub objective: Vec<T>,
    pub a_ub: Vec<Vec<T>>,
    pub b_ub: Vec<T>,
    pub a_eq: Vec<Vec<T>>,
    pub b_eq: Vec<T>,
    pub bounds: Vec<Bound<T>>,
}

impl<T: Number> LinearProgram<T> {
    /// `maximize c'x` over `x >= 0` with no constraints yet.
    pub fn maximize(objective: Vec<T>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            a_ub: Vec::new(),
            b_ub: Vec::new(),
            a_eq: Vec::new(),
            b_eq: Vec::new(),
            bounds: vec![Bound::nonneg(); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn le(mut self, row: Vec<T>, rhs: T) -> Self {
        self.a_ub.push(row);
        self.b_ub.push(rhs);
        self
    }

    pub fn eq(mut self, row: Vec<T>, rhs: T) -> Self {
        self.a_eq.push(row);
        self.b_eq.push(rhs);
        self
    }

    pub fn bound(mut self, j: usize, b: Bound<T>) -> Self {
        self.bounds[j] = b;
        self
    }

    fn check_dims(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::input(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        if self.a_ub.len() != self.b_ub.len() || self.a_eq.len() != self.b_eq.len() {
            return Err(Error::input("constraint rows and right-hand sides differ in count"));
        }
        for (k, row) in self.a_ub.iter().chain(&self.a_eq).enumerate() {
            if row.len() != n {
                return Err(Error::input(format!("constraint row {k} has {} entries, expected {n}", row.len())));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if let (Some(l), Some(u)) = (&b.lower, &b.upper) {
                if l.cmp_exact(u) == Ordering::Greater {
                    return Err(Error::input(format!("variable {j} has lower bound above upper bound")));
                }
            }
        }
        if !T::EXACT {
            let finite = |x: &T| x.to_f64().is_finite();
            let all = self.objective.iter().chain(self.b_ub.iter()).chain(self.b_eq.iter()).all(finite)
                && self.a_ub.iter().chain(&self.a_eq).all(|r| r.iter().all(finite));
            if !all {
                return Err(Error::input("non-finite LP coefficient"));
            }
        }
        Ok(())
    }

    /// `A_ub' y_ub + A_eq' y_eq`.
    fn transpose_times(&self, y_ub: &[T], y_eq: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.num_vars()];
        for (row, y) in self.a_ub.iter().zip(y_ub).chain(self.a_eq.iter().zip(y_eq)) {
            if y.cmp_exact(&T::zero()) == Ordering::Equal {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                *o = o.add(&a.mul(y));
            }
        }
        out
    }

    fn rhs_dot(&self, y_ub: &[T], y_eq: &[T]) -> T {
        self.b_ub.iter().zip(y_ub).chain(self.b_eq.iter().zip(y_eq)).fold(T::zero(), |s, (b, y)| s.add(&b.mul(y)))
    }

    /// `min over the bound box of coeffs'x`; `None` when it is `-inf`.
    fn box_min(&self, coeffs: &[T]) -> Option<T> {
        let mut total = T::zero();
        for (c, b) in coeffs.iter().zip(&self.bounds) {
            let side = if c.is_zero_tol() {
                continue;
            } else if c.is_pos_tol() {
                &b.lower
            } else {
                &b.upper
            };
            total = total.add(&c.mul(side.as_ref()?));
        }
        Some(total)
    }

    /// Maximum violation of the constraints and bounds at `x`.
    pub fn infeasibility(&self, x: &[T]) -> f64 {
        let mut worst = 0.0_f64;
        for (row, b) in self.a_ub.iter().zip(&self.b_ub) {
            worst = worst.max(dot(row, x).sub(b).to_f64());
        }
        for (row, b) in self.a_eq.iter().zip(&self.b_eq) {
            worst = worst.max(dot(row, x).sub(b).to_f64().abs());
        }
        for (xj, b) in x.iter().zip(&self.bounds) {
            if let Some(l) = &b.lower {
                worst = worst.max(l.sub(xj).to_f64());
            }
            if let Some(u) = &b.upper {
                worst = worst.max(xj.sub(u).to_f64());
            }
        }
        worst
    }
}

fn dot<T: Number>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s.add(&x.mul(y)))
}

/// Optimal basic solution with its dual multipliers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpOptimum<T> {
    pub x: Vec<T>,
    pub value: T,
    /// Multipliers of the `<=` rows (nonnegative).
    pub dual_ub: Vec<T>,
    /// Multipliers of the equality rows.
    pub dual_eq: Vec<T>,
    /// `b'y + max over the bound box of (c - A'y)'x`; equals `value` at optimality.
    pub dual_value: T,
    /// Max of primal infeasibility and `|value - dual_value|` (0 in exact mode).
    pub residual: f64,
}

/// Multipliers proving `{A_ub x <= b_ub, A_eq x = b_eq, bounds}` is empty.
///
/// Valid when `y_ub >= 0` and the minimum of `(A'y)'x` over the bound box
/// exceeds `b'y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FarkasCertificate<T> {
    pub y_ub: Vec<T>,
    pub y_eq: Vec<T>,
}

impl<T: Number> FarkasCertificate<T> {
    pub fn verify(&self, lp: &LinearProgram<T>) -> bool {
        if self.y_ub.len() != lp.b_ub.len() || self.y_eq.len() != lp.b_eq.len() {
            return false;
        }
        if self.y_ub.iter().any(|y| y.is_neg_tol()) {
            return false;
        }
        let combined = lp.transpose_times(&self.y_ub, &self.y_eq);
        match lp.box_min(&combined) {
            Some(lhs) => lhs.sub(&lp.rhs_dot(&self.y_ub, &self.y_eq)).is_pos_tol(),
            None => false,
        }
    }
}

/// Feasible point and a recession direction along which the objective grows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnboundedRay<T> {
    pub point: Vec<T>,
    pub direction: Vec<T>,
}

impl<T: Number> UnboundedRay<T> {
    pub fn verify(&self, lp: &LinearProgram<T>) -> bool {
        let d = &self.direction;
        let rows_ok =
            lp.a_ub.iter().all(|r| !dot(r, d).is_pos_tol()) && lp.a_eq.iter().all(|r| dot(r, d).is_zero_tol());
        let bounds_ok = d
            .iter()
            .zip(&lp.bounds)
            .all(|(dj, b)| !(b.lower.is_some() && dj.is_neg_tol()) && !(b.upper.is_some() && dj.is_pos_tol()));
        rows_ok && bounds_ok && dot(&lp.objective, d).is_pos_tol() && lp.infeasibility(&self.point) <= 1e-7
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LpOutcome<T> {
    Optimal(LpOptimum<T>),
    Infeasible(FarkasCertificate<T>),
    Unbounded(UnboundedRay<T>),
}

impl<T> LpOutcome<T> {
    pub fn optimal(self) -> Option<LpOptimum<T>> {
        match self {
            LpOutcome::Optimal(o) => Some(o),
            _ => None,
        }
    }
}

/// How an original variable is expressed in nonnegative standard columns.
enum VarMap<T> {
    /// `x = offset + x'`
    Shifted { col: usize, offset: T },
    /// `x = offset - x'`
    Flipped { col: usize, offset: T },
    /// `x = x+ - x-`
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    /// Column that formed the identity basis for each row.
    id_col: Vec<usize>,
    iterations: usize,
}

enum PivotResult {
    Optimal,
    Unbounded(usize),
}

impl<T: Number> Tableau<T> {
    fn ncols(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = x.div(&p);
        }
        self.rhs[r] = self.rhs[r].div(&p);
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.cmp_exact(&T::zero()) == Ordering::Equal {
                continue;
            }
            for (x, pr) in self.rows[i].iter_mut().zip(&pivot_row) {
                if pr.cmp_exact(&T::zero()) != Ordering::Equal {
                    *x = x.sub(&f.mul(pr));
                }
            }
            self.rows[i][c] = T::zero();
            self.rhs[i] = self.rhs[i].sub(&f.mul(&pivot_rhs));
            if !T::EXACT && self.rhs[i].is_zero_tol() {
                self.rhs[i] = T::zero();
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs `c_j - c_B' B^{-1} A_j` for the current basis.
    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let mut r = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.cmp_exact(&T::zero()) == Ordering::Equal {
                continue;
            }
            for (rj, a) in r.iter_mut().zip(&self.rows[i]) {
                *rj = rj.sub(&cb.mul(a));
            }
        }
        r
    }

    fn run(&mut self, cost: &[T], allow: &dyn Fn(ColKind) -> bool, max_iter: usize) -> Result<PivotResult> {
        loop {
            let r = self.reduced_costs(cost);
            let in_basis = {
                let mut v = vec![false; self.ncols()];
                for &b in &self.basis {
                    v[b] = true;
                }
                v
            };
            // Bland: lowest-index improving column
            let enter = (0..self.ncols()).find(|&j| !in_basis[j] && allow(self.kinds[j]) && r[j].is_pos_tol());
            let Some(c) = enter else {
                return Ok(PivotResult::Optimal);
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_pos_tol() {
                    continue;
                }
                let ratio = self.rhs[i].div(a);
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => match ratio.cmp_exact(&br) {
                        Ordering::Less => Some((i, ratio)),
                        Ordering::Equal if self.basis[i] < self.basis[bi] => Some((i, ratio)),
                        _ => Some((bi, br)),
                    },
                };
            }
            let Some((row, _)) = leave else {
                return Ok(PivotResult::Unbounded(c));
            };
            if self.iterations >= max_iter {
                return Err(Error::SolverFailure {
                    message: "simplex iteration limit reached (retry in rational mode)".into(),
                    iterations: self.iterations,
                    best_value: f64::NAN,
                    gap: f64::NAN,
                });
            }
            self.iterations += 1;
            self.pivot(row, c);
        }
    }

    fn column_values(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.ncols()];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i].clone();
        }
        x
    }
}

/// Solves the LP. In exact arithmetic the result is an exact optimal basic
/// solution; in `f64` the optimum's `residual` is checked against `cfg.tol`.
pub fn lp_solve<T: Number>(lp: &LinearProgram<T>, cfg: &SolverConfig) -> Result<LpOutcome<T>> {
    lp.check_dims()?;
    let n = lp.num_vars();

    // standard-form columns
    let mut maps = Vec::with_capacity(n);
    let mut n_std = 0;
    let mut extra_rows: Vec<(usize, T)> = Vec::new();
    for b in &lp.bounds {
        let m = match (&b.lower, &b.upper) {
            (Some(l), u) => {
                if let Some(u) = u {
                    extra_rows.push((n_std, u.sub(l)));
                }
                VarMap::Shifted { col: n_std, offset: l.clone() }
            }
            (None, Some(u)) => VarMap::Flipped { col: n_std, offset: u.clone() },
            (None, None) => {
                n_std += 1;
                VarMap::Split { pos: n_std - 1, neg: n_std }
            }
        };
        n_std += 1;
        maps.push(m);
    }

    let to_std = |row: &[T], rhs: &T| -> (Vec<T>, T) {
        let mut out = vec![T::zero(); n_std];
        let mut b = rhs.clone();
        for (a, m) in row.iter().zip(&maps) {
            match m {
                VarMap::Shifted { col, offset } => {
                    out[*col] = a.clone();
                    b = b.sub(&a.mul(offset));
                }
                VarMap::Flipped { col, offset } => {
                    out[*col] = a.neg();
                    b = b.sub(&a.mul(offset));
                }
                VarMap::Split { pos, neg } => {
                    out[*pos] = a.clone();
                    out[*neg] = a.neg();
                }
            }
        }
        (out, b)
    };

    // (row, rhs, is_equality)
    let mut std_rows: Vec<(Vec<T>, T, bool)> = Vec::new();
    for (row, b) in lp.a_ub.iter().zip(&lp.b_ub) {
        let (r, b) = to_std(row, b);
        std_rows.push((r, b, false));
    }
    for (row, b) in lp.a_eq.iter().zip(&lp.b_eq) {
        let (r, b) = to_std(row, b);
        std_rows.push((r, b, true));
    }
    for (col, cap) in &extra_rows {
        let mut r = vec![T::zero(); n_std];
        r[*col] = T::one();
        std_rows.push((r, cap.clone(), false));
    }
    let m = std_rows.len();
    let n_ub = lp.a_ub.len();
    let n_eq = lp.a_eq.len();

    let mut std_cost = vec![T::zero(); n_std];
    for (c, mp) in lp.objective.iter().zip(&maps) {
        match mp {
            VarMap::Shifted { col, .. } => std_cost[*col] = c.clone(),
            VarMap::Flipped { col, .. } => std_cost[*col] = c.neg(),
            VarMap::Split { pos, neg } => {
                std_cost[*pos] = c.clone();
                std_cost[*neg] = c.neg();
            }
        }
    }

    // layout: structural | one slack per inequality | artificials
    let n_slack = std_rows.iter().filter(|r| !r.2).count();
    let mut kinds = vec![ColKind::Structural; n_std];
    kinds.extend(std::iter::repeat_n(ColKind::Slack, n_slack));
    let mut sign = vec![T::one(); m];
    let mut needs_art = vec![false; m];
    for (i, (_, b, is_eq)) in std_rows.iter().enumerate() {
        if b.cmp_exact(&T::zero()) == Ordering::Less {
            sign[i] = T::one().neg();
        }
        needs_art[i] = *is_eq || b.cmp_exact(&T::zero()) == Ordering::Less;
    }
    let n_art = needs_art.iter().filter(|&&x| x).count();
    kinds.extend(std::iter::repeat_n(ColKind::Artificial, n_art));
    let ncols = kinds.len();

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut id_col = Vec::with_capacity(m);
    let mut slack_at = n_std;
    let mut art_at = n_std + n_slack;
    for (i, (r, b, is_eq)) in std_rows.into_iter().enumerate() {
        let s = &sign[i];
        let mut row: Vec<T> = r.iter().map(|a| a.mul(s)).collect();
        row.resize(ncols, T::zero());
        if !is_eq {
            row[slack_at] = s.clone();
            if !needs_art[i] {
                basis.push(slack_at);
                id_col.push(slack_at);
            }
            slack_at += 1;
        }
        if needs_art[i] {
            row[art_at] = T::one();
            basis.push(art_at);
            id_col.push(art_at);
            art_at += 1;
        }
        rows.push(row);
        rhs.push(b.mul(s));
    }

    let mut tab = Tableau { rows, rhs, basis, kinds, id_col, iterations: 0 };

    // phase 1: maximize -sum(artificials)
    if n_art > 0 {
        let cost1: Vec<T> =
            tab.kinds.iter().map(|k| if *k == ColKind::Artificial { T::one().neg() } else { T::zero() }).collect();
        tab.run(&cost1, &|_| true, cfg.max_iter)?;
        let infeas = tab
            .basis
            .iter()
            .zip(&tab.rhs)
            .filter(|(b, _)| tab.kinds[**b] == ColKind::Artificial)
            .fold(T::zero(), |s, (_, v)| s.add(v));
        if infeas.is_pos_tol() {
            let r = tab.reduced_costs(&cost1);
            // y_hat_i = c_idcol - r_idcol
            let y: Vec<T> = (0..m)
                .map(|i| {
                    let c = tab.id_col[i];
                    cost1[c].sub(&r[c]).mul(&sign[i])
                })
                .collect();
            let cert = FarkasCertificate { y_ub: y[..n_ub].to_vec(), y_eq: y[n_ub..n_ub + n_eq].to_vec() };
            return Ok(LpOutcome::Infeasible(cert));
        }
        // drive zero-level artificials out of the basis
        for i in 0..m {
            if tab.kinds[tab.basis[i]] != ColKind::Artificial {
                continue;
            }
            if let Some(c) = (0..ncols).find(|&j| tab.kinds[j] != ColKind::Artificial && !tab.rows[i][j].is_zero_tol())
            {
                tab.pivot(i, c);
            }
        }
    }

    // phase 2
    let mut cost2 = std_cost.clone();
    cost2.resize(ncols, T::zero());
    let outcome = tab.run(&cost2, &|k| k != ColKind::Artificial, cfg.max_iter)?;
    let cols = tab.column_values();
    let from_std = |v: &[T], with_offset: bool| -> Vec<T> {
        maps.iter()
            .map(|mp| match mp {
                VarMap::Shifted { col, offset } => {
                    if with_offset {
                        offset.add(&v[*col])
                    } else {
                        v[*col].clone()
                    }
                }
                VarMap::Flipped { col, offset } => {
                    if with_offset {
                        offset.sub(&v[*col])
                    } else {
                        v[*col].neg()
                    }
                }
                VarMap::Split { pos, neg } => v[*pos].sub(&v[*neg]),
            })
            .collect()
    };
    let x = from_std(&cols, true);

    match outcome {
        PivotResult::Unbounded(c) => {
            let mut d = vec![T::zero(); ncols];
            d[c] = T::one();
            for (i, &b) in tab.basis.iter().enumerate() {
                d[b] = tab.rows[i][c].neg();
            }
            let direction = from_std(&d, false);
            Ok(LpOutcome::Unbounded(UnboundedRay { point: x, direction }))
        }
        PivotResult::Optimal => {
            let r = tab.reduced_costs(&cost2);
            let y: Vec<T> = (0..m)
                .map(|i| {
                    let c = tab.id_col[i];
                    cost2[c].sub(&r[c]).mul(&sign[i])
                })
                .collect();
            let mut dual_ub = y[..n_ub].to_vec();
            let dual_eq = y[n_ub..n_ub + n_eq].to_vec();
            if !T::EXACT {
                for v in dual_ub.iter_mut() {
                    if v.is_neg_tol() || v.is_zero_tol() {
                        *v = v.clone().max_of(T::zero());
                    }
                }
            }
            let value = dot(&lp.objective, &x);
            let aty = lp.transpose_times(&dual_ub, &dual_eq);
            let reduced: Vec<T> = lp.objective.iter().zip(&aty).map(|(c, a)| c.sub(a)).collect();
            let neg_reduced: Vec<T> = reduced.iter().map(Number::neg).collect();
            let dual_value = match lp.box_min(&neg_reduced) {
                Some(mn) => lp.rhs_dot(&dual_ub, &dual_eq).sub(&mn),
                None => {
                    return Err(Error::SolverFailure {
                        message: "dual multipliers not feasible".into(),
                        iterations: tab.iterations,
                        best_value: value.to_f64(),
                        gap: f64::INFINITY,
                    })
                }
            };
            let residual = if T::EXACT { 0.0 } else { lp.infeasibility(&x).max(value.sub(&dual_value).to_f64().abs()) };
            if !T::EXACT && residual > cfg.tol * (1.0 + value.to_f64().abs()) {
                return Err(Error::SolverFailure {
                    message: format!("complementary slackness residual {residual:e} above tolerance"),
                    iterations: tab.iterations,
                    best_value: value.to_f64(),
                    gap: residual,
                });
            }
            Ok(LpOutcome::Optimal(LpOptimum { x, value, dual_ub, dual_eq, dual_value, residual }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{ratio, Rational};

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn single_constraint() {
        let lp = LinearProgram::maximize(vec![1.0]).bound(0, Bound::free()).le(vec![1.0], 1.0);
        let o = lp_solve(&lp, &cfg()).unwrap().optimal().unwrap();
        assert_eq!(o.x, vec![1.0]);
        assert_eq!(o.value, 1.0);
        assert_eq!(o.dual_ub, vec![1.0]);
    }

    #[test]
    fn simplex_face() {
        let lp = LinearProgram::maximize(vec![1.0, 1.0]).le(vec![1.0, 1.0], 1.0);
        let o = lp_solve(&lp, &cfg()).unwrap().optimal().unwrap();
        assert!((o.value - 1.0).abs() < 1e-12);
        assert!((o.dual_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_with_certificate() {
        // x >= 2 and x <= 1
        let lp = LinearProgram::maximize(vec![1.0]).le(vec![-1.0], -2.0).le(vec![1.0], 1.0);
        match lp_solve(&lp, &cfg()).unwrap() {
            LpOutcome::Infeasible(c) => assert!(c.verify(&lp)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_equality_exact() {
        let r = |a, b| ratio(a, b);
        // x + y = 1, x + y = 2
        let lp: LinearProgram<Rational> = LinearProgram::maximize(vec![r(0, 1), r(0, 1)])
            .eq(vec![r(1, 1), r(1, 1)], r(1, 1))
            .eq(vec![r(1, 1), r(1, 1)], r(2, 1));
        match lp_solve(&lp, &cfg()).unwrap() {
            LpOutcome::Infeasible(c) => assert!(c.verify(&lp)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_via_upper_bounds() {
        // x <= 1 (bound), x >= 3 (row)
        let lp = LinearProgram::maximize(vec![0.0]).bound(0, Bound::between(0.0, 1.0)).le(vec![-1.0], -3.0);
        match lp_solve(&lp, &cfg()).unwrap() {
            LpOutcome::Infeasible(c) => assert!(c.verify(&lp)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_ray() {
        let lp = LinearProgram::maximize(vec![1.0, 0.0]).le(vec![-1.0, 1.0], 1.0);
        match lp_solve(&lp, &cfg()).unwrap() {
            LpOutcome::Unbounded(r) => assert!(r.verify(&lp)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_and_flipped_variables() {
        // maximize -x - y with x free, y <= 3, x >= -2 via row, y >= -1 via row
        let lp = LinearProgram::maximize(vec![-1.0, -1.0])
            .bound(0, Bound::free())
            .bound(1, Bound { lower: None, upper: Some(3.0) })
            .le(vec![-1.0, 0.0], 2.0)
            .le(vec![0.0, -1.0], 1.0);
        let o = lp_solve(&lp, &cfg()).unwrap().optimal().unwrap();
        assert!((o.value - 3.0).abs() < 1e-12);
        assert!((o.x[0] + 2.0).abs() < 1e-12 && (o.x[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let lp = LinearProgram::maximize(vec![1.0, 1.0]).le(vec![1.0], 1.0);
        assert!(matches!(lp_solve(&lp, &cfg()), Err(Error::Input(_))));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, cycles under the textbook largest-coefficient rule.
        let r = |a: i64, b: i64| ratio(a, b);
        let lp: LinearProgram<Rational> = LinearProgram::maximize(vec![r(3, 4), r(-150, 1), r(1, 50), r(-6, 1)])
            .le(vec![r(1, 4), r(-60, 1), r(-1, 25), r(9, 1)], r(0, 1))
            .le(vec![r(1, 2), r(-90, 1), r(-1, 50), r(3, 1)], r(0, 1))
            .le(vec![r(0, 1), r(0, 1), r(1, 1), r(0, 1)], r(1, 1));
        let o = lp_solve(&lp, &cfg()).unwrap().optimal().unwrap();
        assert_eq!(o.value, r(1, 20));
        assert_eq!(o.dual_value, o.value);
    }
}
