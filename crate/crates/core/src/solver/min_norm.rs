//! Minimum of `||sum mu_i u_i||` over the probability simplex.
//!
//! Smooth norms (`1 < p < inf`) use away-step conditional gradient with an
//! exact line search; the duality gap `||z|| - min_i <J(z), u_i>` bounds the
//! suboptimality and `J(z)` doubles as a margin witness. The `l_1` and
//! `l_inf` cases are linear programs and go through [`lp_solve`].

use serde::{Deserialize, Serialize};

use super::lp::{lp_solve, Bound, LinearProgram};
use super::weights::SimplexWeights;
use super::wolfe::{wolfe_min_norm_sq, wolfe_min_norm_sq_exact};
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::number::{Number, Rational};
use crate::spaces::{inner, NormSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct MinNormResult {
    pub mu: SimplexWeights,
    /// `||sum mu_i u_i||`.
    pub value: f64,
    /// Unit-dual-norm functional with `min_i <w, u_i> >= value - gap`;
    /// absent when the value is below tolerance.
    pub witness: Option<Vec<f64>>,
    /// Certified bound on `value - true minimum`.
    pub gap: f64,
    pub iterations: usize,
    /// Set when the result came from an exact rational computation.
    pub exact: Option<ExactMinNorm>,
}

/// Exact rational optimum (for `p` in `{1, 2, inf}`).
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMinNorm {
    pub mu: Vec<Rational>,
    /// Square of the optimal norm (square roots are avoided for `p = 2`).
    pub value_sq: Rational,
    /// Exact dual witness for the polyhedral norms.
    pub witness: Option<Vec<Rational>>,
}

/// JSON form `{"mu": [...], "value": v, "gap": g, "witness": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinNormCertificate {
    pub mu: SimplexWeights,
    pub value: f64,
    pub gap: f64,
    pub witness: Option<Vec<f64>>,
}

impl From<&MinNormResult> for MinNormCertificate {
    fn from(r: &MinNormResult) -> Self {
        MinNormCertificate { mu: r.mu.clone(), value: r.value, gap: r.gap, witness: r.witness.clone() }
    }
}

fn check_points<P: AsRef<[f64]>>(u: &[P]) -> Result<usize> {
    let first = u.first().ok_or_else(|| Error::input("min-norm point of an empty set"))?;
    let d = first.as_ref().len();
    if d == 0 {
        return Err(Error::input("vectors must have at least one coordinate"));
    }
    for (i, v) in u.iter().enumerate() {
        let v = v.as_ref();
        if v.len() != d {
            return Err(Error::input(format!("vector {i} has dimension {} (expected {d})", v.len())));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::input(format!("vector {i} has a non-finite coordinate")));
        }
    }
    Ok(d)
}

fn combination<P: AsRef<[f64]>>(u: &[P], mu: &[f64], d: usize) -> Vec<f64> {
    let mut z = vec![0.0; d];
    for (ui, &m) in u.iter().zip(mu) {
        if m != 0.0 {
            for (zj, x) in z.iter_mut().zip(ui.as_ref()) {
                *zj += m * x;
            }
        }
    }
    z
}

/// Minimizes `||sum mu_i u_i||` over the simplex.
pub fn min_norm_point<P: AsRef<[f64]>>(u: &[P], n: NormSpec, cfg: &SolverConfig) -> Result<MinNormResult> {
    min_norm_point_until(u, n, cfg, None)
}

/// Like [`min_norm_point`], but for smooth norms stops as soon as the
/// certified lower bound `value - gap` reaches `stop_at_lower`. Such early
/// results may carry a gap above `cfg.tol`.
pub fn min_norm_point_until<P: AsRef<[f64]>>(
    u: &[P],
    n: NormSpec,
    cfg: &SolverConfig,
    stop_at_lower: Option<f64>,
) -> Result<MinNormResult> {
    cfg.validate()?;
    let d = check_points(u)?;
    if cfg.is_exact() && (n.is_l1() || n.is_l2() || n.is_linf()) {
        return min_norm_point_exact(u, n, cfg);
    }
    if n.is_l2() {
        if let Some(r) = wolfe_float(u, cfg, d) {
            return Ok(r);
        }
    }
    if n.is_smooth() {
        match away_step_fw(u, n, cfg, d, stop_at_lower) {
            Err(e @ Error::SolverFailure { .. }) => match origin_in_hull(u, cfg, d) {
                Some(mu) => finish(u, n, mu, d, 0.0, None, cfg.max_iter),
                None => Err(e),
            },
            r => r,
        }
    } else {
        polyhedral_float(u, n, cfg, d)
    }
}

/// Exact path for `p` in `{1, 2, inf}`: inputs are converted to rationals by
/// their exact binary values.
pub fn min_norm_point_exact<P: AsRef<[f64]>>(u: &[P], n: NormSpec, cfg: &SolverConfig) -> Result<MinNormResult> {
    let d = check_points(u)?;
    let pts: Vec<Vec<Rational>> =
        u.iter().map(|v| v.as_ref().iter().map(|&x| Rational::from_f64(x)).collect()).collect();
    let exact = if n.is_l2() {
        let refs: Vec<&[f64]> = u.iter().map(|v| v.as_ref()).collect();
        let (mu, value_sq) = wolfe_min_norm_sq_exact(&refs, cfg.max_iter)?;
        ExactMinNorm { mu, value_sq, witness: None }
    } else if n.is_l1() || n.is_linf() {
        let (mu, value, w) = polyhedral_lp(&pts, n, cfg, d)?;
        ExactMinNorm { mu, value_sq: value.mul(&value), witness: Some(w) }
    } else {
        return Err(Error::input(format!("exact min-norm point is only available for p in {{1, 2, inf}}, got {n}")));
    };
    let mu = SimplexWeights::normalized(exact.mu.iter().map(Number::to_f64).collect())?;
    let value = exact.value_sq.to_f64().sqrt();
    let witness = match &exact.witness {
        Some(w) => Some(w.iter().map(Number::to_f64).collect()),
        None if value > cfg.tol => n.norming_functional(&combination(u, mu.as_slice(), d)),
        None => None,
    };
    Ok(MinNormResult { mu, value, witness, gap: 0.0, iterations: 0, exact: Some(exact) })
}

/// LP reformulation for `l_1` (per-coordinate epigraph) and `l_inf` (one
/// epigraph variable). Returns `(mu, value, dual witness)`.
fn polyhedral_lp<T: Number>(pts: &[Vec<T>], n: NormSpec, cfg: &SolverConfig, d: usize) -> Result<(Vec<T>, T, Vec<T>)> {
    let m = pts.len();
    let n_eps = if n.is_l1() { d } else { 1 };
    // variables: mu (m) | t (n_eps); maximize -sum t
    let mut c = vec![T::zero(); m];
    c.extend(std::iter::repeat_n(T::one().neg(), n_eps));
    let mut lp = LinearProgram::maximize(c);
    for sign in [T::one(), T::one().neg()] {
        for j in 0..d {
            let mut row: Vec<T> = pts.iter().map(|u| u[j].mul(&sign)).collect();
            row.extend(std::iter::repeat_n(T::zero(), n_eps));
            let t = if n.is_l1() { m + j } else { m };
            row[t] = T::one().neg();
            lp = lp.le(row, T::zero());
        }
    }
    let mut simplex_row = vec![T::one(); m];
    simplex_row.extend(std::iter::repeat_n(T::zero(), n_eps));
    lp = lp.eq(simplex_row, T::one());
    for j in 0..m + n_eps {
        lp = lp.bound(j, Bound::nonneg());
    }
    let opt = lp_solve(&lp, cfg)?.optimal().ok_or_else(|| Error::SolverFailure {
        message: "min-norm LP is feasible and bounded; solver reported otherwise".into(),
        iterations: 0,
        best_value: f64::NAN,
        gap: f64::NAN,
    })?;
    let mu = opt.x[..m].to_vec();
    let witness = (0..d).map(|j| opt.dual_ub[j].sub(&opt.dual_ub[d + j])).collect();
    Ok((mu, opt.value.neg(), witness))
}

fn polyhedral_float<P: AsRef<[f64]>>(u: &[P], n: NormSpec, cfg: &SolverConfig, d: usize) -> Result<MinNormResult> {
    let pts: Vec<Vec<f64>> = u.iter().map(|v| v.as_ref().to_vec()).collect();
    let (mu, lp_value, witness) = polyhedral_lp(&pts, n, cfg, d)?;
    let mu = SimplexWeights::normalized(mu)?;
    let value = n.eval(&combination(u, mu.as_slice(), d));
    let lower = pts.iter().map(|x| inner(&witness, x)).fold(f64::INFINITY, f64::min);
    let gap = (value - lower).max(0.0).max((value - lp_value).abs());
    let witness = (value > cfg.tol).then_some(witness);
    Ok(MinNormResult { mu, value, witness, gap, iterations: 0, exact: None })
}

/// Derivative sign helper: `sum sign(a_j)|a_j|^(p-1) w_j` and its derivative
/// `(p-1) sum |a_j|^(p-2) w_j^2` at `a = z + t w`.
fn line_derivs(z: &[f64], w: &[f64], t: f64, p: f64) -> (f64, f64) {
    let mut g = 0.0;
    let mut h = 0.0;
    for (zj, wj) in z.iter().zip(w) {
        let a = zj + t * wj;
        let abs = a.abs();
        if abs == 0.0 {
            continue;
        }
        let pow = abs.powf(p - 2.0);
        g += a * pow * wj;
        h += pow * wj * wj;
    }
    (g, (p - 1.0) * h)
}

/// Minimizes `||z + t w||_p` over `t` in `[0, t_max]`.
fn line_search(z: &[f64], w: &[f64], t_max: f64, n: NormSpec) -> f64 {
    let ww = inner(w, w);
    if ww == 0.0 {
        return 0.0;
    }
    if n.is_l2() {
        return (-inner(z, w) / ww).clamp(0.0, t_max);
    }
    let p = n.p();
    // rescale to avoid under/overflow of |a|^(p-1)
    let scale = z.iter().chain(w).fold(0.0_f64, |m, x| m.max(x.abs()));
    let z: Vec<f64> = z.iter().map(|x| x / scale).collect();
    let w: Vec<f64> = w.iter().map(|x| x / scale).collect();
    let (g0, _) = line_derivs(&z, &w, 0.0, p);
    if g0 >= 0.0 {
        return 0.0;
    }
    let (gm, _) = line_derivs(&z, &w, t_max, p);
    if gm <= 0.0 {
        return t_max;
    }
    // safeguarded Newton on the monotone derivative
    let (mut lo, mut hi) = (0.0, t_max);
    let mut t = 0.5 * t_max;
    for _ in 0..100 {
        let (g, h) = line_derivs(&z, &w, t, p);
        if g < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= 1e-15 * t_max.max(1e-300) || g == 0.0 {
            break;
        }
        let newton = if h > 0.0 { t - g / h } else { f64::NAN };
        t = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    t
}

/// Weights with `sum mu_i u_i = 0` from a feasibility LP, if the origin is
/// in the hull. Frank-Wolfe converges slowly when the minimizer is the
/// origin, so stalled runs are settled this way.
fn origin_in_hull<P: AsRef<[f64]>>(u: &[P], cfg: &SolverConfig, d: usize) -> Option<Vec<f64>> {
    let m = u.len();
    let mut lp = LinearProgram::maximize(vec![0.0; m]);
    for j in 0..d {
        lp.a_eq.push(u.iter().map(|v| v.as_ref()[j]).collect());
        lp.b_eq.push(0.0);
    }
    lp.a_eq.push(vec![1.0; m]);
    lp.b_eq.push(1.0);
    let mu: Vec<f64> = lp_solve(&lp, cfg).ok()?.optimal()?.x.into_iter().map(|x| x.max(0.0)).collect();
    let total: f64 = mu.iter().sum();
    let mu: Vec<f64> = mu.into_iter().map(|x| x / total).collect();
    (inner(&combination(u, &mu, d), &combination(u, &mu, d)).sqrt() <= cfg.tol).then_some(mu)
}

/// Wolfe's active-set method in `f64`; `None` if it hits the iteration
/// limit or rounding leaves a duality gap above `cfg.tol`, in which case
/// the caller falls back to Frank-Wolfe.
fn wolfe_float<P: AsRef<[f64]>>(u: &[P], cfg: &SolverConfig, d: usize) -> Option<MinNormResult> {
    let pts: Vec<Vec<f64>> = u.iter().map(|v| v.as_ref().to_vec()).collect();
    let (mu, _) = wolfe_min_norm_sq(&pts, cfg.max_iter).ok()?;
    let mu: Vec<f64> = mu.into_iter().map(|x| x.max(0.0)).collect();
    let value = NormSpec::L2.eval(&combination(u, &mu, d));
    let functional = (value >= cfg.tol).then(|| (vec![], 0.0));
    finish(u, NormSpec::L2, mu, d, value, functional, 0).ok().filter(|r| r.gap <= cfg.tol)
}

fn away_step_fw<P: AsRef<[f64]>>(
    u: &[P],
    n: NormSpec,
    cfg: &SolverConfig,
    d: usize,
    stop_at_lower: Option<f64>,
) -> Result<MinNormResult> {
    let m = u.len();
    let norms: Vec<f64> = u.iter().map(|v| n.eval(v.as_ref())).collect();
    let start = (0..m).fold(0, |b, i| if norms[i] < norms[b] { i } else { b });
    let mut mu = vec![0.0; m];
    mu[start] = 1.0;
    let mut z = u[start].as_ref().to_vec();
    let mut scores = vec![0.0; m];
    let mut dir = vec![0.0; d];
    let mut best_gap = f64::INFINITY;

    for it in 0..cfg.max_iter {
        if it % 64 == 63 {
            z = combination(u, &mu, d);
        }
        let value = n.eval(&z);
        if value < cfg.tol {
            return finish(u, n, mu, d, value, None, it);
        }
        let j = n.norming_functional(&z).expect("nonzero iterate");
        for (s, ui) in scores.iter_mut().zip(u) {
            *s = inner(&j, ui.as_ref());
        }
        let fw = (0..m).fold(0, |b, i| if scores[i] < scores[b] { i } else { b });
        let gap = (value - scores[fw]).max(0.0);
        best_gap = best_gap.min(gap);
        let reached = stop_at_lower.is_some_and(|t| value - gap >= t);
        if gap <= cfg.tol || reached {
            return finish(u, n, mu, d, value, Some((j, gap)), it);
        }
        let away = (0..m)
            .filter(|&i| mu[i] > 0.0)
            .fold(None, |b: Option<usize>, i| match b {
                Some(b) if scores[b] >= scores[i] => Some(b),
                _ => Some(i),
            })
            .expect("active set nonempty");
        let away_gain = scores[away] - value;
        let use_fw = gap >= away_gain;
        let t_max = if use_fw {
            for (dj, (x, zj)) in dir.iter_mut().zip(u[fw].as_ref().iter().zip(&z)) {
                *dj = x - zj;
            }
            1.0
        } else {
            for (dj, (x, zj)) in dir.iter_mut().zip(u[away].as_ref().iter().zip(&z)) {
                *dj = zj - x;
            }
            mu[away] / (1.0 - mu[away])
        };
        let t = line_search(&z, &dir, t_max, n);
        if t == 0.0 && use_fw {
            // no progress possible along the FW direction within rounding
            return finish(u, n, mu, d, value, Some((j, gap)), it);
        }
        if use_fw {
            for x in mu.iter_mut() {
                *x *= 1.0 - t;
            }
            mu[fw] += t;
            if t == 1.0 {
                mu.iter_mut().for_each(|x| *x = 0.0);
                mu[fw] = 1.0;
            }
        } else {
            for x in mu.iter_mut() {
                *x *= 1.0 + t;
            }
            mu[away] -= t;
            if t >= t_max {
                mu[away] = 0.0;
            }
        }
        for (zj, dj) in z.iter_mut().zip(&dir) {
            *zj += t * dj;
        }
    }
    let mu_w = SimplexWeights::normalized(mu)?;
    let value = n.eval(&combination(u, mu_w.as_slice(), d));
    Err(Error::SolverFailure {
        message: format!("away-step Frank-Wolfe did not reach tolerance {} on {n}", cfg.tol),
        iterations: cfg.max_iter,
        best_value: value,
        gap: best_gap,
    })
}

fn finish<P: AsRef<[f64]>>(
    u: &[P],
    n: NormSpec,
    mu: Vec<f64>,
    d: usize,
    _iterate_value: f64,
    functional: Option<(Vec<f64>, f64)>,
    iterations: usize,
) -> Result<MinNormResult> {
    let mu = SimplexWeights::normalized(mu)?;
    // value is recomputed from the returned weights so callers can reproduce it
    let z = combination(u, mu.as_slice(), d);
    let value = n.eval(&z);
    let (witness, gap) = match functional {
        Some(_) => {
            let w = n.norming_functional(&z).expect("nonzero");
            let lower = u.iter().map(|x| inner(&w, x.as_ref())).fold(f64::INFINITY, f64::min);
            (Some(w), (value - lower).max(0.0))
        }
        None => (None, value),
    };
    Ok(MinNormResult { mu, value, witness, gap, iterations, exact: None })
}
