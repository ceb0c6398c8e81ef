use super::distance::{solve_margin_lp, MaxMargin};
use super::{LabeledSample, Member, Support};
use crate::error::{Error, Result};
use crate::number::Number;
use crate::solver::{Bound, LinearProgram, SimplexWeights, SolverConfig};

/// Convex hull of finitely many function tables over `num_points` points.
///
/// Entries are read exactly in rational mode, so generators that need exact
/// answers should use dyadic values.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionPolytope {
    vertices: Vec<Vec<f64>>,
}

impl FunctionPolytope {
    pub fn from_f64(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let n = vertices.first().map(Vec::len).ok_or_else(|| Error::input("polytope needs a vertex"))?;
        if n == 0 {
            return Err(Error::input("polytope vertices must be nonempty tables"));
        }
        if let Some(i) = vertices.iter().position(|v| v.len() != n || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::input(format!("vertex {i} is not a finite table of length {n}")));
        }
        Ok(FunctionPolytope { vertices })
    }

    /// Adds the negation of every vertex.
    pub fn symmetrized(&self) -> Self {
        let mut vertices = self.vertices.clone();
        for v in &self.vertices {
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            if !vertices.contains(&neg) {
                vertices.push(neg);
            }
        }
        FunctionPolytope { vertices }
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn num_points(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.vertices.iter().all(|v| {
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            self.vertices.contains(&neg)
        })
    }

    pub fn evaluate(&self, weights: &[f64], point: usize) -> Result<f64> {
        if weights.len() != self.vertices.len() {
            return Err(Error::input(format!("{} mixing weights for {} vertices", weights.len(), self.vertices.len())));
        }
        Ok(weights.iter().zip(&self.vertices).map(|(w, v)| w * v[point]).sum())
    }

    /// Best vertex, first in order on ties.
    pub fn support(&self, sample: &LabeledSample, mu: &SimplexWeights) -> Support {
        let score = |v: &Vec<f64>| -> f64 {
            sample
                .points
                .iter()
                .zip(&sample.labels)
                .zip(mu.as_slice())
                .map(|((&x, &y), m)| m * f64::from(y) * v[x])
                .sum()
        };
        let (best, value) = self.vertices.iter().map(score).enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, s)| {
            if s > acc.1 {
                (i, s)
            } else {
                acc
            }
        });
        let mut weights = vec![0.0; self.vertices.len()];
        weights[best] = 1.0;
        Support { value, maximizer: Some(Member::PolytopeMix { weights }) }
    }
}

/// Max-margin LP over mixing weights; equals `min_mu support(mu, y)`.
pub fn polytope_max_margin<T: Number>(
    poly: &FunctionPolytope,
    sample: &LabeledSample,
    cfg: &SolverConfig,
) -> Result<MaxMargin<T>> {
    let k = poly.vertices.len();
    let mut objective = vec![T::zero(); k + 1];
    objective[k] = T::one();
    let mut lp = LinearProgram::maximize(objective).bound(k, Bound::free());
    for (&x, &y) in sample.points.iter().zip(&sample.labels) {
        let mut row: Vec<T> = poly.vertices.iter().map(|v| T::from_f64(-f64::from(y) * v[x])).collect();
        row.push(T::one());
        lp = lp.le(row, T::zero());
    }
    let mut mass = vec![T::one(); k + 1];
    mass[k] = T::zero();
    lp = lp.eq(mass, T::one());
    let (value, mu, x) = solve_margin_lp(&lp, sample.len(), cfg)?;
    Ok(MaxMargin { value, mu, member: Member::PolytopeMix { weights: x[..k].to_vec() } })
}
