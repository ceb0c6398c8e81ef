use serde::Serialize;

use crate::classes::{ConceptClass, DistanceClass, DualBall, FunctionPolytope, Member};
use crate::error::{Error, Result};
use crate::number::{Number, Rational};
use crate::solver::{lp_solve, Bound, LinearProgram, LpOutcome, SolverConfig};
use crate::spaces::inner;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CubeVerdict {
    Yes { witness: Member },
    No,
}

impl CubeVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, CubeVerdict::Yes { .. })
    }
}

/// Decides whether some member takes exactly the values `y` on `points`.
///
/// With `|y_i| <= gamma` this is one corner (or interior point) of the
/// `gamma`-cube; since `F` restricted to the points is convex, it contains
/// the whole cube iff it contains all `2^n` corners.
///
/// Polytope and distance classes are LP feasibility problems (exact in
/// rational mode). Dual balls use the least-norm interpolant for `p = 2` and
/// an LP for `p` in `{1, inf}`; other exponents are not supported.
pub fn check_cube_condition(
    class: &ConceptClass,
    points: &[usize],
    gamma: f64,
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<CubeVerdict> {
    if points.len() != y.len() || points.is_empty() {
        return Err(Error::input(format!("{} points for {} target values", points.len(), y.len())));
    }
    if let Some(i) = y.iter().position(|v| !(v.abs() <= gamma)) {
        return Err(Error::input(format!("target value {i} lies outside [-gamma, gamma]")));
    }
    if let Some(&p) = points.iter().find(|&&p| p >= class.ground_size()) {
        return Err(Error::input(format!("point {p} outside the ground set")));
    }
    match class {
        ConceptClass::FunctionPolytope(poly) => {
            if cfg.is_exact() {
                polytope_cube::<Rational>(poly, points, y, cfg)
            } else {
                polytope_cube::<f64>(poly, points, y, cfg)
            }
        }
        ConceptClass::DistanceCombination(c) => {
            if cfg.is_exact() {
                distance_cube::<Rational>(c, points, y, cfg)
            } else {
                distance_cube::<f64>(c, points, y, cfg)
            }
        }
        ConceptClass::DualBall(c) => dual_ball_cube(c, points, y, cfg),
        ConceptClass::Lipschitz(space) => {
            let ok = points
                .iter()
                .zip(y)
                .all(|(&a, ya)| points.iter().zip(y).all(|(&b, yb)| (ya - yb).abs() <= space.dist(a, b)));
            Ok(table_verdict(ok, points, y, |values| Member::LipschitzTable { values }))
        }
        ConceptClass::Phi(spec) => {
            let ok = points.iter().zip(y).all(|(&x, v)| v.abs() < 1.0 && v.abs() <= spec.tau(x as u64 + 1));
            Ok(table_verdict(ok, points, y, |values| Member::PhiTable { values }))
        }
        ConceptClass::BallPair { .. } => {
            Err(Error::input("cube condition is undefined for the non-convex ball-pair class"))
        }
    }
}

fn table_verdict(ok: bool, points: &[usize], y: &[f64], f: impl FnOnce(Vec<(usize, f64)>) -> Member) -> CubeVerdict {
    if ok {
        CubeVerdict::Yes { witness: f(points.iter().copied().zip(y.iter().copied()).collect()) }
    } else {
        CubeVerdict::No
    }
}

fn feasible<T: Number>(lp: &LinearProgram<T>, cfg: &SolverConfig) -> Result<Option<Vec<f64>>> {
    match lp_solve(lp, cfg)? {
        LpOutcome::Optimal(o) => Ok(Some(o.x.iter().map(Number::to_f64).collect())),
        LpOutcome::Infeasible(_) => Ok(None),
        LpOutcome::Unbounded(_) => Err(Error::degenerate("feasibility LP reported unbounded")),
    }
}

fn polytope_cube<T: Number>(
    poly: &FunctionPolytope,
    points: &[usize],
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<CubeVerdict> {
    let k = poly.vertices().len();
    let mut lp = LinearProgram::maximize(vec![T::zero(); k]);
    for (&x, &v) in points.iter().zip(y) {
        lp = lp.eq(poly.vertices().iter().map(|vert| T::from_f64(vert[x])).collect(), T::from_f64(v));
    }
    lp = lp.eq(vec![T::one(); k], T::one());
    Ok(match feasible(&lp, cfg)? {
        Some(weights) => CubeVerdict::Yes { witness: Member::PolytopeMix { weights } },
        None => CubeVerdict::No,
    })
}

fn distance_cube<T: Number>(c: &DistanceClass, points: &[usize], y: &[f64], cfg: &SolverConfig) -> Result<CubeVerdict> {
    let k = c.centers.len();
    let mut lp = LinearProgram::maximize(vec![T::zero(); 2 * k]);
    for (&x, &v) in points.iter().zip(y) {
        let d: Vec<T> = c.centers.iter().map(|&ctr| T::from_f64(c.space.dist(ctr, x))).collect();
        let row = d.iter().cloned().chain(d.iter().map(Number::neg)).collect();
        lp = lp.eq(row, T::from_f64(v));
    }
    lp = lp.le(vec![T::one(); 2 * k], T::one());
    let half = T::one().div(&T::from_int(2));
    let mut side = vec![T::zero(); 2 * k];
    match c.variant {
        crate::classes::DistanceVariant::Full => {}
        crate::classes::DistanceVariant::Pos => {
            side[..k].iter_mut().for_each(|v| *v = T::one().neg());
            lp = lp.le(side, half.neg());
        }
        crate::classes::DistanceVariant::Neg => {
            side[k..].iter_mut().for_each(|v| *v = T::one().neg());
            lp = lp.le(side, half.neg());
        }
    }
    Ok(match feasible(&lp, cfg)? {
        Some(x) => {
            let coefficients = c
                .centers
                .iter()
                .enumerate()
                .map(|(j, &ctr)| (ctr, x[j] - x[k + j]))
                .filter(|&(_, a)| a != 0.0)
                .collect();
            CubeVerdict::Yes { witness: Member::DistanceCombination { coefficients } }
        }
        None => CubeVerdict::No,
    })
}

const INTERP_TOL: f64 = 1e-9;

fn dual_ball_cube(c: &DualBall, points: &[usize], y: &[f64], cfg: &SolverConfig) -> Result<CubeVerdict> {
    let xs: Vec<&Vec<f64>> = points.iter().map(|&p| &c.points()[p]).collect();
    let d = c.dim();
    let n = c.norm();
    if n.is_l2() {
        let Some(alpha) = solve_gram(&xs, y) else { return Ok(CubeVerdict::No) };
        let mut w = vec![0.0; d];
        for (x, a) in xs.iter().zip(&alpha) {
            for (wj, xj) in w.iter_mut().zip(x.iter()) {
                *wj += a * xj;
            }
        }
        let fits = xs.iter().zip(y).all(|(x, v)| (inner(&w, x) - v).abs() <= INTERP_TOL);
        let norm = crate::spaces::NormSpec::L2.eval(&w);
        return Ok(if fits && norm <= 1.0 + INTERP_TOL {
            CubeVerdict::Yes { witness: Member::Linear { w } }
        } else {
            CubeVerdict::No
        });
    }
    if !(n.is_l1() || n.is_linf()) {
        return Err(Error::input(format!("cube condition for dual balls supports p in {{1, 2, inf}}, got {n}")));
    }
    // l_1 points pair with the l_inf dual ball (box); l_inf points with the l_1 dual ball
    let split = n.is_linf();
    let width = if split { 2 * d } else { d };
    let mut lp = LinearProgram::maximize(vec![0.0; width]);
    for (x, &v) in xs.iter().zip(y) {
        let row: Vec<f64> = if split { x.iter().copied().chain(x.iter().map(|t| -t)).collect() } else { x.to_vec() };
        lp = lp.eq(row, v);
    }
    if split {
        lp = lp.le(vec![1.0; width], 1.0);
    } else {
        for j in 0..d {
            lp = lp.bound(j, Bound::between(-1.0, 1.0));
        }
    }
    Ok(match feasible(&lp, cfg)? {
        Some(x) => {
            let w = if split { (0..d).map(|j| x[j] - x[d + j]).collect() } else { x };
            CubeVerdict::Yes { witness: Member::Linear { w } }
        }
        None => CubeVerdict::No,
    })
}

/// Solves `G alpha = y` for the Gram matrix of `xs`, returning `None` when
/// the system is inconsistent. Dependent rows get `alpha = 0`.
fn solve_gram(xs: &[&Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let n = xs.len();
    let mut a: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| inner(xs[i], xs[j])).chain(std::iter::once(y[i])).collect()).collect();
    let scale = a.iter().flat_map(|r| r[..n].iter()).fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut pivots = vec![];
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())) else { break };
        if a[p][col].abs() <= 1e-12 * scale {
            continue;
        }
        a.swap(row, p);
        let piv = a[row][col];
        a[row].iter_mut().for_each(|v| *v /= piv);
        for i in 0..n {
            if i != row && a[i][col] != 0.0 {
                let f = a[i][col];
                let src = a[row].clone();
                a[i].iter_mut().zip(&src).for_each(|(v, s)| *v -= f * s);
            }
        }
        pivots.push(col);
        row += 1;
    }
    if a[row..].iter().any(|r| r[n].abs() > INTERP_TOL) {
        return None;
    }
    let mut alpha = vec![0.0; n];
    for (r, &col) in pivots.iter().enumerate() {
        alpha[col] = a[r][n];
    }
    Some(alpha)
}
