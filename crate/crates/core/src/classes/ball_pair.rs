use serde::{Deserialize, Serialize};

use super::LabeledSample;
use crate::error::{Error, Result};
use crate::spaces::FiniteMetricSpace;

/// Radii of the ball-pair partial concepts: positive within `r`, negative
/// beyond `R`, undefined in between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallPairParams {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl BallPairParams {
    pub fn new(r: f64, big_r: f64) -> Result<Self> {
        if !(r >= 0.0 && big_r > r && big_r.is_finite()) {
            return Err(Error::input(format!("ball-pair radii need 0 <= r < R, got r={r}, R={big_r}")));
        }
        Ok(BallPairParams { r, big_r })
    }

    /// `+1`, `-1`, or `0` for the undefined band.
    pub fn label(&self, d: f64) -> i8 {
        if d <= self.r {
            1
        } else if d > self.big_r {
            -1
        } else {
            0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BallPairVerdict {
    Yes { center: usize },
    No,
}

impl BallPairVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, BallPairVerdict::Yes { .. })
    }
}

/// First center (in index order) whose concept labels the whole sample.
pub fn ball_pair_realizable(
    space: &FiniteMetricSpace,
    sample: &LabeledSample,
    params: BallPairParams,
) -> BallPairVerdict {
    (0..space.len())
        .find(|&c| sample.points.iter().zip(&sample.labels).all(|(&x, &y)| params.label(space.dist(c, x)) == y))
        .map_or(BallPairVerdict::No, |center| BallPairVerdict::Yes { center })
}
