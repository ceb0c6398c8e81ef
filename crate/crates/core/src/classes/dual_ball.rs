use super::{LabeledSample, Member, Support};
use crate::error::{Error, Result};
use crate::solver::SimplexWeights;
use crate::spaces::NormSpec;

const UNIT_BALL_TOL: f64 = 1e-9;

/// Unit ball of the dual space acting on vectors from the unit ball.
#[derive(Clone, Debug, PartialEq)]
pub struct DualBall {
    points: Vec<Vec<f64>>,
    norm: NormSpec,
}

impl DualBall {
    /// Rejects points outside the unit ball, naming the offending index.
    pub fn new(points: Vec<Vec<f64>>, norm: NormSpec) -> Result<Self> {
        let d = points.first().map(Vec::len).unwrap_or(0);
        for (i, x) in points.iter().enumerate() {
            if x.len() != d || d == 0 {
                return Err(Error::input(format!("point {i} has dimension {} (expected {d})", x.len())));
            }
            let nx = crate::spaces::norm(x, norm)?;
            if nx > 1.0 + UNIT_BALL_TOL {
                return Err(Error::input(format!("point {i} lies outside the unit ball ({norm} norm {nx})")));
            }
        }
        Ok(DualBall { points, norm })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn norm(&self) -> NormSpec {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// `sum_i c_i x_{p_i}`.
    pub fn combine(&self, points: &[usize], coeffs: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.dim()];
        for (&p, &c) in points.iter().zip(coeffs) {
            for (zj, x) in z.iter_mut().zip(&self.points[p]) {
                *zj += c * x;
            }
        }
        z
    }

    /// The signed vectors `y_i x_i` of a sample.
    pub fn signed_points(&self, sample: &LabeledSample) -> Vec<Vec<f64>> {
        sample
            .points
            .iter()
            .zip(&sample.labels)
            .map(|(&p, &y)| self.points[p].iter().map(|x| f64::from(y) * x).collect())
            .collect()
    }
}

/// `||sum mu_i y_i x_i||`, maximized by the duality map of that vector.
pub fn support_dual_ball(class: &DualBall, sample: &LabeledSample, mu: &SimplexWeights) -> Result<Support> {
    let coeffs: Vec<f64> = mu.as_slice().iter().zip(&sample.labels).map(|(m, &y)| m * f64::from(y)).collect();
    let z = class.combine(&sample.points, &coeffs);
    let value = class.norm.eval(&z);
    let maximizer = class.norm.norming_functional(&z).map(|w| Member::Linear { w });
    Ok(Support { value, maximizer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::ConceptClass;

    #[test]
    fn two_basis_vectors() {
        let c = DualBall::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], NormSpec::L2).unwrap();
        let s = LabeledSample::new(vec![0, 1], vec![1, 1]).unwrap();
        let sup = support_dual_ball(&c, &s, &SimplexWeights::uniform(2)).unwrap();
        assert!((sup.value - 0.5f64.sqrt()).abs() < 1e-15);
        let cls = ConceptClass::DualBall(c);
        let again = cls.pairing(&sup.maximizer.unwrap(), &s, &SimplexWeights::uniform(2)).unwrap();
        assert!((again - sup.value).abs() < 1e-12);
    }

    #[test]
    fn outside_unit_ball_rejected() {
        let err = DualBall::new(vec![vec![0.5, 0.0], vec![1.0, 1.0]], NormSpec::L2).unwrap_err();
        assert!(err.to_string().contains("point 1"));
        assert!(DualBall::new(vec![vec![1.0, 1.0]], NormSpec::LINF).is_ok());
    }

    #[test]
    fn zero_combination_has_no_maximizer() {
        let c = DualBall::new(vec![vec![1.0], vec![1.0]], NormSpec::L2).unwrap();
        let s = LabeledSample::new(vec![0, 1], vec![1, -1]).unwrap();
        let sup = support_dual_ball(&c, &s, &SimplexWeights::uniform(2)).unwrap();
        assert_eq!(sup.value, 0.0);
        assert!(sup.maximizer.is_none());
    }
}
