//! Seeded generators for the experiment drivers.
//!
//! Every task draws from its own SplitMix64 stream (`rand_xoshiro`'s
//! implementation), seeded by mixing the experiment seed with the task
//! index. Streams therefore do not depend on scheduling or `--jobs`.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::classes::FunctionPolytope;
use crate::error::Result;
use crate::spaces::{FiniteMetricSpace, NormSpec};

/// Stream for task `task` of an experiment seeded with `seed`.
pub fn task_rng(seed: u64, task: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed ^ task.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Random metric space on `n` points: integer edge weights in `1..=1000`,
/// repaired by shortest-path closure, then divided by the diameter.
///
/// Division rounds, so a final pass lowers any entry exceeding a two-hop
/// path (in float arithmetic) until the matrix passes the exact validator.
pub fn random_metric_space<R: Rng>(rng: &mut R, n: usize) -> Result<FiniteMetricSpace> {
    let mut w = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random_range(1..=1000u64);
            w[i][j] = v;
            w[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = w[i][k] + w[k][j];
                if via < w[i][j] {
                    w[i][j] = via;
                }
            }
        }
    }
    let diam = w.iter().flatten().copied().max().unwrap_or(1).max(1) as f64;
    let mut d: Vec<Vec<f64>> = w.iter().map(|r| r.iter().map(|&x| x as f64 / diam).collect()).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let via = d[i][j] + d[j][k];
                    if d[i][k] > via {
                        d[i][k] = via;
                        d[k][i] = via;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    FiniteMetricSpace::from_matrix(d)
}

/// `count` random vectors of unit `l_p` norm in dimension `d`.
pub fn random_unit_vectors<R: Rng>(rng: &mut R, count: usize, d: usize, p: NormSpec) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n = p.eval(&v);
            if n > 1e-3 {
                // renormalize until rounding leaves the vector inside the ball
                let mut u: Vec<f64> = v.iter().map(|x| x / n).collect();
                while p.eval(&u) > 1.0 {
                    u.iter_mut().for_each(|x| *x *= 1.0 - f64::EPSILON);
                }
                break u;
            }
        })
        .collect()
}

/// Random polytope with `vertices` vertices over `points` points, values
/// multiples of 1/8 in `[-1, 1]` so that rational and float views agree.
pub fn random_polytope<R: Rng>(rng: &mut R, points: usize, vertices: usize) -> Result<FunctionPolytope> {
    let v =
        (0..vertices).map(|_| (0..points).map(|_| f64::from(rng.random_range(-8..=8i32)) / 8.0).collect()).collect();
    FunctionPolytope::from_f64(v)
}
