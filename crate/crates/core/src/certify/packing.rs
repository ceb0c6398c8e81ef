use crate::error::{Error, Result};
use crate::spaces::FiniteMetricSpace;

/// Largest space handled by [`packing_number`].
pub const MAX_PACKING_POINTS: usize = 64;

/// Maximum number of points with pairwise distances at least `s`, with the
/// lexicographically smallest such subset.
///
/// Exact maximum independent set on the conflict graph `d(i, j) < s`:
/// include-first branch and bound over bitmasks, so the first maximum found
/// is the lexicographically smallest.
pub fn packing_number(space: &FiniteMetricSpace, s: f64) -> Result<(usize, Vec<usize>)> {
    if !(s > 0.0) {
        return Err(Error::input(format!("packing scale must be positive, got {s}")));
    }
    let n = space.len();
    if n > MAX_PACKING_POINTS {
        return Err(Error::input(format!("packing search limited to {MAX_PACKING_POINTS} points, got {n}")));
    }
    let conflicts: Vec<u64> =
        (0..n).map(|i| (0..n).filter(|&j| j != i && space.dist(i, j) < s).fold(0u64, |m, j| m | 1 << j)).collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    // greedy lower bound; ties must still be explored, hence the -1
    let mut greedy = 0u32;
    let mut cand = all;
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        greedy += 1;
        cand &= !(1 << v) & !conflicts[v];
    }
    let mut best = (greedy.saturating_sub(1), 0u64);
    branch(&conflicts, 0, all, &mut best);
    let subset: Vec<usize> = (0..n).filter(|&i| best.1 >> i & 1 == 1).collect();
    Ok((subset.len(), subset))
}

fn branch(conflicts: &[u64], chosen: u64, cand: u64, best: &mut (u32, u64)) {
    if cand == 0 {
        if chosen.count_ones() > best.0 {
            *best = (chosen.count_ones(), chosen);
        }
        return;
    }
    if chosen.count_ones() + cand.count_ones() <= best.0 {
        return;
    }
    let v = cand.trailing_zeros() as usize;
    let bit = 1u64 << v;
    branch(conflicts, chosen | bit, cand & !bit & !conflicts[v], best);
    branch(conflicts, chosen, cand & !bit, best);
}
