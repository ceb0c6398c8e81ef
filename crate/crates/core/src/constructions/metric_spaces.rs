use super::{ConstructionBundle, ConstructionObject, MetricClass, NamedWitness, PredictedStatus};
use crate::classes::{BallPairParams, DistanceVariant, Member};
use crate::error::{Error, Result};
use crate::number::Number;
use crate::spaces::{validate_metric, MetricCheck};

pub const MAX_INTRO_K: usize = 12;
pub const MAX_GAMMA_K: usize = 10;

/// Ids and distance matrix of a constructed space.
pub type RawMetric<T> = (Vec<String>, Vec<Vec<T>>);

fn a_ids(k: usize) -> impl Iterator<Item = String> {
    (1..=k).map(|i| format!("a{i}"))
}

/// Bit `i - 1` of a mask is the membership of `a_i`.
fn contains(mask: usize, i: usize) -> bool {
    mask >> i & 1 == 1
}

/// Points `a_1..a_k` followed by `b_s` for the subsets `s` of `A` in
/// binary-counter order (`b_0` for the empty set only when `include_empty`).
///
/// `d(a_i, b_s)` is `r` when `a_i` is in `s` and `R` otherwise; every other
/// distance is `(r + R) / 2`.
pub fn intro_counterexample_metric<T: Number>(k: usize, r: &T, big_r: &T, include_empty: bool) -> Result<RawMetric<T>> {
    if k == 0 || k > MAX_INTRO_K {
        return Err(Error::input(format!("intro space needs 1 <= k <= {MAX_INTRO_K}, got {k}")));
    }
    let masks: Vec<usize> = (usize::from(!include_empty)..1 << k).collect();
    let ids: Vec<String> = a_ids(k).chain(masks.iter().map(|m| format!("b{m}"))).collect();
    let mid = r.add(big_r).div(&T::from_int(2));
    let n = ids.len();
    let mut dist = vec![vec![mid.clone(); n]; n];
    for (x, row) in dist.iter_mut().enumerate() {
        row[x] = T::zero();
    }
    for i in 0..k {
        for (j, &m) in masks.iter().enumerate() {
            let d = if contains(m, i) { r.clone() } else { big_r.clone() };
            dist[i][k + j] = d.clone();
            dist[k + j][i] = d;
        }
    }
    Ok((ids, dist))
}

fn status(check: &MetricCheck) -> PredictedStatus {
    if check.is_ok() {
        PredictedStatus::MetricValid
    } else {
        PredictedStatus::MetricInvalid
    }
}

fn violation(check: MetricCheck) -> Option<crate::spaces::Violation> {
    match check {
        MetricCheck::Ok => None,
        MetricCheck::Violation(v) => Some(v),
    }
}

/// The ball-pair space in which every subset of `A` is shattered.
///
/// The paper-style distances put the far points at exactly `R`, which the
/// strict `> R` rule would leave undefined, so the bundled class uses the
/// outer radius `(r + R) / 2`. The all-negative labeling needs `b_0`.
pub fn intro_counterexample_space(k: usize, r: f64, big_r: f64, include_empty: bool) -> Result<ConstructionBundle> {
    let params = BallPairParams::new(r, (r + big_r) / 2.0)?;
    let (ids, dist) = intro_counterexample_metric(k, &r, &big_r, include_empty)?;
    let check = validate_metric(&dist)?;
    let notice = (!include_empty).then(|| "without b0 the all-negative labeling of A is not realized".to_string());
    Ok(ConstructionBundle {
        name: format!("intro_k{k}"),
        predicted_status: status(&check),
        violation: violation(check),
        object: ConstructionObject::MetricSpace {
            ids,
            dist,
            class: MetricClass::BallPair { params },
            shattered: (0..k).collect(),
        },
        predicted_gamma: r,
        provenance: "A points and subset points b_s at distance r (member) or R (non-member); a metric iff R <= 3r"
            .into(),
        witnesses: vec![],
        notice,
    })
}

/// Points `a_1..a_k`, then `b1_s` and `b2_s` for every subset `s` of `A`
/// (including the empty set).
///
/// `d(a_i, b1_s)` is `2/3 - gamma` for members and `2/3 + gamma` otherwise;
/// `b2_s` is the reverse. Every other distance is `2/3`.
pub fn gamma_counterexample_metric<T: Number>(k: usize, gamma: &T) -> Result<RawMetric<T>> {
    if k == 0 || k > MAX_GAMMA_K {
        return Err(Error::input(format!("gamma space needs 1 <= k <= {MAX_GAMMA_K}, got {k}")));
    }
    let subsets = 1usize << k;
    let ids: Vec<String> =
        a_ids(k).chain((0..subsets).map(|m| format!("b1{m}"))).chain((0..subsets).map(|m| format!("b2{m}"))).collect();
    let base = T::from_int(2).div(&T::from_int(3));
    let near = base.sub(gamma);
    let far = base.add(gamma);
    let n = ids.len();
    let mut dist = vec![vec![base.clone(); n]; n];
    for (x, row) in dist.iter_mut().enumerate() {
        row[x] = T::zero();
    }
    for i in 0..k {
        for m in 0..subsets {
            let (one, two) = if contains(m, i) { (&near, &far) } else { (&far, &near) };
            for (col, d) in [(k + m, one), (k + subsets + m, two)] {
                dist[i][col] = d.clone();
                dist[col][i] = d.clone();
            }
        }
    }
    Ok((ids, dist))
}

/// The distance-combination space that shatters `A` at margin `gamma`, with
/// the witnesses `delta_A' = d(b1_A', .)/2 - d(b2_A', .)/2` for every `A'`.
pub fn gamma_counterexample_space(k: usize, gamma: f64) -> Result<ConstructionBundle> {
    if !(gamma > 0.0) {
        return Err(Error::input(format!("gamma must be positive, got {gamma}")));
    }
    let (ids, dist) = gamma_counterexample_metric(k, &gamma)?;
    let check = validate_metric(&dist)?;
    let subsets = 1usize << k;
    let witnesses = (0..subsets)
        .map(|m| NamedWitness {
            name: format!("delta_{m}"),
            labels: (0..k).map(|i| if contains(m, i) { -1 } else { 1 }).collect(),
            member: Member::DistanceCombination { coefficients: vec![(k + m, 0.5), (k + subsets + m, -0.5)] },
        })
        .collect();
    Ok(ConstructionBundle {
        name: format!("gamma_space_k{k}"),
        predicted_status: status(&check),
        violation: violation(check),
        object: ConstructionObject::MetricSpace {
            ids,
            dist,
            class: MetricClass::DistanceCombination { variant: DistanceVariant::Full },
            shattered: (0..k).collect(),
        },
        predicted_gamma: gamma,
        provenance:
            "A points and paired subset points at distance 2/3 -+ gamma; a metric of diameter <= 1 iff gamma <= 1/3"
                .into(),
        witnesses,
        notice: None,
    })
}
