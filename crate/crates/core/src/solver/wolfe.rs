//! Wolfe's min-norm-point algorithm for the Euclidean case.
//!
//! Finite and exact when run over rationals: every affine minimizer is the
//! solution of a bordered Gram system, solved by Gaussian elimination in the
//! same field.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::number::{Number, Rational};

fn dot<T: Number>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s.add(&x.mul(y)))
}

fn combine<T: Number>(points: &[Vec<T>], support: &[usize], w: &[T]) -> Vec<T> {
    let d = points[support[0]].len();
    let mut x = vec![T::zero(); d];
    for (&i, wi) in support.iter().zip(w) {
        for (xj, uj) in x.iter_mut().zip(&points[i]) {
            *xj = xj.add(&wi.mul(uj));
        }
    }
    x
}

/// Solves `a x = b` by Gauss-Jordan elimination; `None` if singular.
fn solve<T: Number>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        // partial pivoting by magnitude (exact mode: any nonzero)
        let mut piv = None;
        for r in col..n {
            if a[r][col].is_zero_tol() {
                continue;
            }
            piv = match piv {
                None => Some(r),
                Some(p) if !T::EXACT && a[r][col].abs().cmp_exact(&a[p][col].abs()) == Ordering::Greater => Some(r),
                keep => keep,
            };
        }
        let p = piv?;
        a.swap(col, p);
        b.swap(col, p);
        let pv = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = x.div(&pv);
        }
        b[col] = b[col].div(&pv);
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col].clone();
            if f.cmp_exact(&T::zero()) == Ordering::Equal {
                continue;
            }
            for c in col..n {
                let v = a[col][c].mul(&f);
                a[r][c] = a[r][c].sub(&v);
            }
            b[r] = b[r].sub(&b[col].mul(&f));
        }
    }
    Some(b)
}

/// Minimizer of `||sum a_i u_i||^2` over the affine hull (`sum a_i = 1`).
fn affine_minimizer<T: Number>(points: &[Vec<T>], support: &[usize]) -> Option<Vec<T>> {
    let k = support.len();
    let mut m = vec![vec![T::zero(); k + 1]; k + 1];
    for a in 0..k {
        for b in a..k {
            let g = dot(&points[support[a]], &points[support[b]]);
            m[a][b] = g.clone();
            m[b][a] = g;
        }
        m[a][k] = T::one();
        m[k][a] = T::one();
    }
    let mut rhs = vec![T::zero(); k + 1];
    rhs[k] = T::one();
    let mut sol = solve(m, rhs)?;
    sol.truncate(k);
    Some(sol)
}

/// Returns `(mu, ||sum mu_i u_i||^2)` minimizing the Euclidean norm over the
/// convex hull of `points`.
pub fn wolfe_min_norm_sq<T: Number>(points: &[Vec<T>], max_iter: usize) -> Result<(Vec<T>, T)> {
    let n = points.len();
    if n == 0 {
        return Err(Error::input("min-norm point of an empty set"));
    }
    let sq: Vec<T> = points.iter().map(|u| dot(u, u)).collect();
    let scale = sq.iter().fold(0.0_f64, |m, s| m.max(s.to_f64()));
    let eps = if T::EXACT { 0.0 } else { 1e-14 * scale.max(1e-300) };
    let start = (0..n).fold(0, |best, i| if sq[i].cmp_exact(&sq[best]) == Ordering::Less { i } else { best });
    let mut support = vec![start];
    let mut lam = vec![T::one()];
    let mut x = points[start].clone();

    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > max_iter {
            let xx = dot(&x, &x).to_f64();
            return Err(Error::SolverFailure {
                message: "Wolfe iteration limit".into(),
                iterations,
                best_value: xx.sqrt(),
                gap: f64::NAN,
            });
        }
        let xx = dot(&x, &x);
        if xx.is_zero_tol() && (T::EXACT || xx.to_f64() <= eps) {
            break;
        }
        let scores: Vec<T> = points.iter().map(|u| dot(&x, u)).collect();
        let j = (0..n).fold(0, |best, i| if scores[i].cmp_exact(&scores[best]) == Ordering::Less { i } else { best });
        let improvement = xx.sub(&scores[j]);
        if improvement.to_f64() <= eps && (!T::EXACT || improvement.cmp_exact(&T::zero()) != Ordering::Greater) {
            break;
        }
        if support.contains(&j) {
            // only reachable through rounding
            break;
        }
        support.push(j);
        lam.push(T::zero());

        loop {
            let alpha = match affine_minimizer(points, &support) {
                Some(a) => a,
                None => {
                    return Err(Error::SolverFailure {
                        message: "affinely dependent support in Wolfe's method".into(),
                        iterations,
                        best_value: dot(&x, &x).to_f64().sqrt(),
                        gap: f64::NAN,
                    })
                }
            };
            let positive =
                |v: &T| if T::EXACT { v.cmp_exact(&T::zero()) == Ordering::Greater } else { v.to_f64() > 1e-15 };
            if alpha.iter().all(positive) {
                lam = alpha;
                break;
            }
            let mut theta = T::one();
            for (l, a) in lam.iter().zip(&alpha) {
                if !positive(a) {
                    let t = l.div(&l.sub(a));
                    theta = theta.min_of(t);
                }
            }
            let one_minus = T::one().sub(&theta);
            lam = lam.iter().zip(&alpha).map(|(l, a)| one_minus.mul(l).add(&theta.mul(a))).collect();
            let keep: Vec<bool> = lam.iter().map(positive).collect();
            if keep.iter().all(|k| *k) {
                // rounding kept every weight; drop the smallest
                let worst =
                    (0..lam.len()).fold(0, |b, i| if lam[i].cmp_exact(&lam[b]) == Ordering::Less { i } else { b });
                support.remove(worst);
                lam.remove(worst);
            } else {
                let mut k = 0;
                support.retain(|_| {
                    k += 1;
                    keep[k - 1]
                });
                lam = lam.into_iter().zip(&keep).filter(|(_, k)| **k).map(|(l, _)| l).collect();
            }
            let total = lam.iter().fold(T::zero(), |s, l| s.add(l));
            lam = lam.iter().map(|l| l.div(&total)).collect();
        }
        x = combine(points, &support, &lam);
    }

    let mut mu = vec![T::zero(); n];
    for (&i, l) in support.iter().zip(lam) {
        mu[i] = l;
    }
    let value_sq = dot(&x, &x);
    Ok((mu, value_sq))
}

/// Scales float points to a common integer lattice: returns integer
/// coordinates and the common denominator (a power of two).
fn integer_lattice(points: &[&[f64]]) -> (Vec<Vec<BigInt>>, BigInt) {
    let rats: Vec<Vec<Rational>> = points.iter().map(|u| u.iter().map(|&x| Rational::from_f64(x)).collect()).collect();
    let mut den = BigInt::from(1);
    for r in rats.iter().flatten() {
        if r.denom() > &den {
            den = r.denom().clone();
        }
    }
    let ints = rats.iter().map(|u| u.iter().map(|r| r.numer() * (&den / r.denom())).collect()).collect();
    (ints, den)
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |s, (x, y)| s + x * y)
}

/// Fraction-free Gauss-Jordan on an augmented integer matrix `[A | b]`.
/// Returns `(det, det * x)` up to a common sign, or `None` if singular.
fn bareiss_solve(mut a: Vec<Vec<BigInt>>) -> Option<(BigInt, Vec<BigInt>)> {
    let n = a.len();
    let mut prev = BigInt::from(1);
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, p);
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..=n {
                if j == k {
                    continue;
                }
                let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let x = (0..n).map(|i| a[i][n].clone()).collect();
    Some((prev, x))
}

/// Exact certificate for a candidate active set: the affine minimizer over
/// `support` must have positive weights and satisfy `<x, u_j> >= ||x||^2`
/// for every point. Returns `(mu, ||x||^2)` in lattice units.
fn certify_support(ints: &[Vec<BigInt>], support: &[usize]) -> Option<(Vec<Rational>, BigInt, BigInt)> {
    let k = support.len();
    let mut m = vec![vec![BigInt::zero(); k + 2]; k + 1];
    for a in 0..k {
        for b in a..k {
            let g = idot(&ints[support[a]], &ints[support[b]]);
            m[a][b] = g.clone();
            m[b][a] = g;
        }
        m[a][k] = BigInt::from(1);
        m[k][a] = BigInt::from(1);
    }
    m[k][k + 1] = BigInt::from(1);
    let (mut det, mut num) = bareiss_solve(m)?;
    if det.is_negative() {
        det = -det;
        num.iter_mut().for_each(|v| *v = -&*v);
    }
    num.truncate(k);
    if num.iter().any(|v| !v.is_positive()) {
        return None;
    }
    let d = ints[0].len();
    let mut x = vec![BigInt::zero(); d];
    for (&i, w) in support.iter().zip(&num) {
        for (xj, uj) in x.iter_mut().zip(&ints[i]) {
            *xj += w * uj;
        }
    }
    // x is det times the minimizer
    let xx = idot(&x, &x);
    for u in ints {
        if idot(&x, u) * &det < xx {
            return None;
        }
    }
    let mut mu = vec![<Rational as Number>::zero(); ints.len()];
    for (&i, w) in support.iter().zip(num) {
        mu[i] = Rational::new(w, det.clone());
    }
    Some((mu, xx, det))
}

/// Exact Euclidean min-norm point over the hull of float points (taken at
/// their exact binary values). The active set is found in floating point and
/// then certified exactly; if certification fails the rational Wolfe method
/// runs from scratch.
pub fn wolfe_min_norm_sq_exact(points: &[&[f64]], max_iter: usize) -> Result<(Vec<Rational>, Rational)> {
    if points.is_empty() {
        return Err(Error::input("min-norm point of an empty set"));
    }
    let (ints, den) = integer_lattice(points);
    let floats: Vec<Vec<f64>> = points.iter().map(|u| u.to_vec()).collect();
    if let Ok((mu_f, _)) = wolfe_min_norm_sq(&floats, max_iter) {
        let support: Vec<usize> = (0..mu_f.len()).filter(|&i| mu_f[i] > 0.0).collect();
        if !support.is_empty() {
            if let Some((mu, xx, det)) = certify_support(&ints, &support) {
                let scale = &det * &den;
                return Ok((mu, Rational::new(xx, &scale * &scale)));
            }
        }
    }
    let pts: Vec<Vec<Rational>> = points.iter().map(|u| u.iter().map(|&x| Rational::from_f64(x)).collect()).collect();
    wolfe_min_norm_sq(&pts, max_iter)
}
