use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::Number;

/// First violated metric axiom found by [`validate_metric`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Symmetry {
        i: usize,
        j: usize,
    },
    Diagonal {
        i: usize,
    },
    Positivity {
        i: usize,
        j: usize,
    },
    /// `dist[i][k] > dist[i][j] + dist[j][k]`.
    Triangle {
        i: usize,
        j: usize,
        k: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MetricCheck {
    Ok,
    Violation(Violation),
}

impl MetricCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, MetricCheck::Ok)
    }
}

/// Checks the metric axioms on a square matrix.
///
/// Scan order is fixed: symmetry, then the zero diagonal, then positivity of
/// off-diagonal entries, then every triangle `(i, j, k)` of distinct indices
/// in lexicographic order. Comparisons are exact; use rational entries when
/// the matrix sits on an equality boundary.
pub fn validate_metric<T: Number>(dist: &[Vec<T>]) -> Result<MetricCheck> {
    let n = dist.len();
    if let Some(i) = dist.iter().position(|row| row.len() != n) {
        return Err(Error::input(format!("distance matrix is not square (row {i})")));
    }
    for (i, row) in dist.iter().enumerate() {
        if let Some(j) = row.iter().position(|x| !x.to_f64().is_finite() && !T::EXACT) {
            return Err(Error::input(format!("distance ({i}, {j}) is not finite")));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j].cmp_exact(&dist[j][i]) != Ordering::Equal {
                return Ok(MetricCheck::Violation(Violation::Symmetry { i, j }));
            }
        }
    }
    for (i, row) in dist.iter().enumerate() {
        if row[i].cmp_exact(&T::zero()) != Ordering::Equal {
            return Ok(MetricCheck::Violation(Violation::Diagonal { i }));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j].cmp_exact(&T::zero()) != Ordering::Greater {
                return Ok(MetricCheck::Violation(Violation::Positivity { i, j }));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let via = dist[i][j].add(&dist[j][k]);
                if dist[i][k].cmp_exact(&via) == Ordering::Greater {
                    return Ok(MetricCheck::Violation(Violation::Triangle { i, j, k }));
                }
            }
        }
    }
    Ok(MetricCheck::Ok)
}

/// Labeled points with a validated distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace<T: Number = f64> {
    ids: Vec<String>,
    dist: Vec<Vec<T>>,
}

impl<T: Number> FiniteMetricSpace<T> {
    /// Builds a space, rejecting matrices that break any metric axiom.
    pub fn new(ids: Vec<String>, dist: Vec<Vec<T>>) -> Result<Self> {
        if ids.len() != dist.len() {
            return Err(Error::input(format!("{} ids for a {}x{} distance matrix", ids.len(), dist.len(), dist.len())));
        }
        if ids.is_empty() {
            return Err(Error::input("metric space has no points"));
        }
        match validate_metric(&dist)? {
            MetricCheck::Ok => Ok(FiniteMetricSpace { ids, dist }),
            MetricCheck::Violation(v) => Err(Error::input(format!("not a metric: {v:?}"))),
        }
    }

    /// Builds a space with ids `0..n`.
    pub fn from_matrix(dist: Vec<Vec<T>>) -> Result<Self> {
        let ids = (0..dist.len()).map(|i| i.to_string()).collect();
        Self::new(ids, dist)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.dist
    }

    pub fn d(&self, i: usize, j: usize) -> &T {
        &self.dist[i][j]
    }

    pub fn to_f64(&self) -> FiniteMetricSpace<f64> {
        FiniteMetricSpace {
            ids: self.ids.clone(),
            dist: self.dist.iter().map(|r| r.iter().map(Number::to_f64).collect()).collect(),
        }
    }
}

impl FiniteMetricSpace<f64> {
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }
}

/// Largest pairwise distance (0 for a single point).
pub fn diameter<T: Number>(m: &FiniteMetricSpace<T>) -> T {
    let mut best = T::zero();
    for (i, row) in m.dist.iter().enumerate() {
        for x in &row[i + 1..] {
            best = best.max_of(x.clone());
        }
    }
    best
}

/// Divides every distance by the diameter.
///
/// Without `force`, spaces whose diameter is already at most 1 are returned
/// unchanged.
pub fn rescale_to_unit_diameter<T: Number>(m: &FiniteMetricSpace<T>, force: bool) -> Result<FiniteMetricSpace<T>> {
    if m.len() < 2 {
        return Err(Error::degenerate("cannot rescale a single-point space"));
    }
    let diam = diameter(m);
    if !force && diam.cmp_exact(&T::one()) != Ordering::Greater {
        return Ok(m.clone());
    }
    let dist = m.dist.iter().map(|r| r.iter().map(|x| x.div(&diam)).collect()).collect();
    Ok(FiniteMetricSpace { ids: m.ids.clone(), dist })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{ratio, Rational};

    fn uniform(n: usize, d: f64) -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { d }).collect()).collect()
    }

    #[test]
    fn uniform_space_diameter() {
        let m = FiniteMetricSpace::from_matrix(uniform(4, 2.0 / 3.0)).unwrap();
        assert_eq!(diameter(&m), 2.0 / 3.0);
    }

    #[test]
    fn two_points_rescaled() {
        let m = FiniteMetricSpace::from_matrix(vec![vec![0.0, 4.0], vec![4.0, 0.0]]).unwrap();
        let r = rescale_to_unit_diameter(&m, false).unwrap();
        assert_eq!(r.dist(0, 1), 1.0);
    }

    #[test]
    fn small_diameter_is_kept_unless_forced() {
        let m = FiniteMetricSpace::from_matrix(uniform(3, 0.5)).unwrap();
        assert_eq!(rescale_to_unit_diameter(&m, false).unwrap(), m);
        assert_eq!(diameter(&rescale_to_unit_diameter(&m, true).unwrap()), 1.0);
    }

    #[test]
    fn single_point_rescale_is_degenerate() {
        let m = FiniteMetricSpace::from_matrix(vec![vec![0.0]]).unwrap();
        assert_eq!(diameter(&m), 0.0);
        assert!(matches!(rescale_to_unit_diameter(&m, true), Err(Error::Degenerate(_))));
    }

    #[test]
    fn positivity_violation() {
        let d = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert_eq!(validate_metric(&d).unwrap(), MetricCheck::Violation(Violation::Positivity { i: 0, j: 1 }));
    }

    #[test]
    fn scan_order_symmetry_first() {
        let d = vec![vec![1.0, 2.0], vec![3.0, 0.0]];
        assert_eq!(validate_metric(&d).unwrap(), MetricCheck::Violation(Violation::Symmetry { i: 0, j: 1 }));
        let d = vec![vec![1.0, 2.0], vec![2.0, 0.0]];
        assert_eq!(validate_metric(&d).unwrap(), MetricCheck::Violation(Violation::Diagonal { i: 0 }));
    }

    #[test]
    fn triangle_violation_found() {
        let d = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
        assert_eq!(validate_metric(&d).unwrap(), MetricCheck::Violation(Violation::Triangle { i: 0, j: 1, k: 2 }));
    }

    #[test]
    fn non_square_is_input_error() {
        assert!(validate_metric(&[vec![0.0, 1.0]]).is_err());
        assert!(validate_metric(&[vec![0.0, f64::INFINITY], vec![f64::INFINITY, 0.0]]).is_err());
    }

    #[test]
    fn exact_boundary_triangle_accepted() {
        let third: Rational = ratio(1, 3);
        let two_thirds = ratio(2, 3);
        let d = vec![
            vec![ratio(0, 1), third.clone(), two_thirds.clone()],
            vec![third.clone(), ratio(0, 1), third.clone()],
            vec![two_thirds, third, ratio(0, 1)],
        ];
        assert!(validate_metric(&d).unwrap().is_ok());
    }
}
