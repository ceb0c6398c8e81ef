use marginlab::certify::{
    check_cube_condition, is_shattered, max_shattered_subset, realize, verify_collapse, DimEntry, DimStatus,
    DimensionReport, Gamma, RealizeStatus, SearchOptions, ShatterStatus,
};
use marginlab::classes::{ConceptClass, DistanceClass, DistanceVariant, DualBall, LabeledSample, PhiPreset, PhiSpec};
use marginlab::constructions::{gamma_counterexample_metric, gamma_counterexample_space, intro_counterexample_metric};
use marginlab::harness::{random_metric_space, task_rng};
use marginlab::number::{ratio, Number, Rational};
use marginlab::solver::{
    lp_solve, min_norm_point, min_norm_point_exact, wolfe_min_norm_sq_exact, Bound, LinearProgram, SimplexWeights,
    SolverConfig,
};
use marginlab::spaces::{diameter, dual_norm, duality_map, inner, norm, rescale_to_unit_diameter, validate_metric};
use marginlab::spaces::{FiniteMetricSpace, NormSpec};
use proptest::prelude::*;

fn vector(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d)
}

fn vectors(n: std::ops::Range<usize>, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(vector(d), n)
}

/// Vectors scaled into the unit ball of `n`.
fn into_ball(mut pts: Vec<Vec<f64>>, n: NormSpec) -> Vec<Vec<f64>> {
    for v in &mut pts {
        let s = n.eval(v);
        if s > 1.0 {
            v.iter_mut().for_each(|x| *x /= s);
        }
    }
    pts
}

fn smooth_p() -> impl Strategy<Value = f64> {
    prop_oneof![1.1f64..2.0, Just(2.0), 2.0f64..8.0]
}

fn labels(n: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n)
}

fn space(seed: u64, n: usize) -> FiniteMetricSpace {
    random_metric_space(&mut task_rng(seed, 0), n).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn duality_map_is_norming(p in smooth_p(), v in vector(5)) {
        let n = NormSpec::new(p).unwrap();
        prop_assume!(n.eval(&v) > 1e-3);
        let j = duality_map(&v, n).unwrap();
        prop_assert!(close(dual_norm(&j, n).unwrap(), 1.0, 1e-9));
        prop_assert!(close(inner(&j, &v), norm(&v, n).unwrap(), 1e-9));
    }

    #[test]
    fn holder_inequality(p in prop_oneof![Just(1.0), smooth_p(), Just(f64::INFINITY)], v in vector(4), w in vector(4)) {
        let n = NormSpec::new(p).unwrap();
        let bound = dual_norm(&w, n).unwrap() * norm(&v, n).unwrap();
        prop_assert!(inner(&w, &v).abs() <= bound * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn dual_exponent_is_an_involution(p in prop_oneof![Just(1.0), smooth_p(), Just(f64::INFINITY)]) {
        let n = NormSpec::new(p).unwrap();
        let back = n.dual().dual().p();
        prop_assert!(back == p || close(back, p, 1e-12));
    }

    #[test]
    fn intro_space_is_metric_iff_far_radius_at_most_three_near(
        k in 2usize..5,
        r in 1i64..20,
        extra in 1i64..60,
        include_empty: bool,
    ) {
        let (rr, big) = (ratio(r, 20), ratio(r + extra, 20));
        let (_, dist) = intro_counterexample_metric::<Rational>(k, &rr, &big, include_empty).unwrap();
        let ok = validate_metric(&dist).unwrap().is_ok();
        prop_assert_eq!(ok, r + extra <= 3 * r);
    }

    #[test]
    fn gamma_space_is_metric_iff_gamma_at_most_a_third(k in 1usize..4, a in 1i64..40) {
        let g = ratio(a, 60);
        let (_, dist) = gamma_counterexample_metric::<Rational>(k, &g).unwrap();
        prop_assert_eq!(validate_metric(&dist).unwrap().is_ok(), a <= 20);
    }

    #[test]
    fn rescaling_gives_unit_diameter(seed: u64, n in 2usize..8, e in -6i32..6) {
        let m = space(seed, n);
        let scale = 2f64.powi(e);
        let scaled: Vec<Vec<f64>> = m.matrix().iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
        let m = FiniteMetricSpace::from_matrix(scaled).unwrap();
        let unit = rescale_to_unit_diameter(&m, true).unwrap();
        prop_assert!((diameter(&unit) - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn min_norm_certificate_is_sound(p in prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), Just(f64::INFINITY)], u in vectors(1..7, 3)) {
        let n = NormSpec::new(p).unwrap();
        let cfg = SolverConfig::default();
        let r = min_norm_point(&u, n, &cfg).unwrap();
        let mu = r.mu.as_slice();
        prop_assert!(mu.iter().all(|&m| m >= 0.0));
        prop_assert!((mu.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        let mut z = vec![0.0; 3];
        for (ui, m) in u.iter().zip(mu) {
            for (zj, x) in z.iter_mut().zip(ui) {
                *zj += m * x;
            }
        }
        prop_assert!((n.eval(&z) - r.value).abs() <= 1e-9);
        if let Some(w) = &r.witness {
            prop_assert!(dual_norm(w, n).unwrap() <= 1.0 + cfg.tol);
            let lo = u.iter().map(|ui| inner(w, ui)).fold(f64::INFINITY, f64::min);
            prop_assert!(lo >= r.value - r.gap - cfg.tol);
        }
    }

    #[test]
    fn min_norm_ignores_order(p in prop_oneof![Just(1.5), Just(2.0), Just(3.0)], u in vectors(2..7, 3)) {
        let n = NormSpec::new(p).unwrap();
        let cfg = SolverConfig::default();
        let a = min_norm_point(&u, n, &cfg).unwrap().value;
        let mut rev = u.clone();
        rev.reverse();
        rev.rotate_left(1);
        let b = min_norm_point(&rev, n, &cfg).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-6, "{} vs {}", a, b);
    }

    #[test]
    fn euclidean_min_norm_is_rotation_invariant(u in vectors(2..7, 3), theta in 0.0f64..std::f64::consts::TAU) {
        let cfg = SolverConfig::default();
        let (s, c) = theta.sin_cos();
        let rot: Vec<Vec<f64>> = u.iter().map(|v| vec![c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]]).collect();
        let a = min_norm_point(&u, NormSpec::L2, &cfg).unwrap().value;
        let b = min_norm_point(&rot, NormSpec::L2, &cfg).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-6, "{} vs {}", a, b);
    }

    #[test]
    fn adding_a_vector_never_increases_min_norm(p in prop_oneof![Just(1.0), Just(2.0), Just(3.0)], u in vectors(1..6, 3), extra in vector(3)) {
        let n = NormSpec::new(p).unwrap();
        let cfg = SolverConfig::default();
        let a = min_norm_point(&u, n, &cfg).unwrap().value;
        let mut more = u.clone();
        more.push(extra);
        let b = min_norm_point(&more, n, &cfg).unwrap().value;
        prop_assert!(b <= a + 1e-6, "{} > {}", b, a);
    }

    #[test]
    fn certified_wolfe_matches_rational_wolfe(u in prop::collection::vec(prop::collection::vec(-8i32..8, 3), 1..6)) {
        let pts: Vec<Vec<f64>> = u.iter().map(|v| v.iter().map(|&x| f64::from(x) / 8.0).collect()).collect();
        let r = min_norm_point_exact(&pts, NormSpec::L2, &SolverConfig::exact()).unwrap();
        let refs: Vec<&[f64]> = pts.iter().map(|v| v.as_slice()).collect();
        let (_, value_sq) = wolfe_min_norm_sq_exact(&refs, 10_000).unwrap();
        prop_assert_eq!(r.exact.unwrap().value_sq, value_sq);
    }

    #[test]
    fn lp_primal_and_dual_values_agree(
        c in prop::collection::vec(-5i64..5, 3),
        rows in prop::collection::vec((prop::collection::vec(-5i64..5, 3), 1i64..10), 1..4),
    ) {
        let float = rows.iter().fold(LinearProgram::maximize(c.iter().map(|&x| x as f64).collect()), |lp, (a, b)| {
            lp.le(a.iter().map(|&x| x as f64).collect(), *b as f64)
        });
        let exact = rows.iter().fold(LinearProgram::maximize(c.iter().map(|&x| ratio(x, 1)).collect()), |lp, (a, b)| {
            lp.le(a.iter().map(|&x| ratio(x, 1)).collect(), ratio(*b, 1))
        });
        let (float, exact) = (0..3).fold((float, exact), |(f, e), j| {
            (f.bound(j, Bound::between(0.0, 1.0)), e.bound(j, Bound::between(ratio(0, 1), ratio(1, 1))))
        });
        let f = lp_solve(&float, &SolverConfig::default()).unwrap().optimal().unwrap();
        prop_assert!((f.value - f.dual_value).abs() <= 1e-7);
        let e = lp_solve(&exact, &SolverConfig::exact()).unwrap().optimal().unwrap();
        prop_assert_eq!(&e.value, &e.dual_value);
        prop_assert!((e.value.to_f64() - f.value).abs() <= 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn full_distance_class_dominates_one_signed_variants(
        seed: u64,
        y in labels(5),
        w in prop::collection::vec(0.01f64..1.0, 5),
    ) {
        let m = space(seed, 7);
        let sample = LabeledSample::new(vec![0, 2, 3, 5, 6], y).unwrap();
        let mu = SimplexWeights::normalized(w).unwrap();
        let sup = |v| {
            let class = ConceptClass::DistanceCombination(DistanceClass::all_centers(m.clone(), v).unwrap());
            class.support(&sample, &mu).unwrap().value
        };
        let full = sup(DistanceVariant::Full);
        prop_assert!(full >= sup(DistanceVariant::Pos).max(sup(DistanceVariant::Neg)) - 1e-9);
    }

    #[test]
    fn support_maximizer_attains_support(
        seed: u64,
        y in labels(4),
        w in prop::collection::vec(0.01f64..1.0, 4),
    ) {
        let m = space(seed, 6);
        let sample = LabeledSample::new(vec![1, 2, 4, 5], y).unwrap();
        let mu = SimplexWeights::normalized(w).unwrap();
        let classes = [
            ConceptClass::DistanceCombination(DistanceClass::all_centers(m.clone(), DistanceVariant::Full).unwrap()),
            ConceptClass::Lipschitz(m.clone()),
        ];
        for class in classes {
            let s = class.support(&sample, &mu).unwrap();
            if let Some(member) = &s.maximizer {
                prop_assert!((class.pairing(member, &sample, &mu).unwrap() - s.value).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn phi_is_monotone(k in 1u32..4, g1 in 0.01f64..0.99, g2 in 0.01f64..0.99) {
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        for preset in [PhiPreset::InversePower { k }, PhiPreset::Exponential] {
            let spec = PhiSpec::new(preset, 1000).unwrap();
            prop_assert!(spec.phi(lo) >= spec.phi(hi));
            prop_assert!(spec.dim(lo) >= spec.dim(hi));
        }
    }

    #[test]
    fn flipping_labels_preserves_realizability(
        pts in vectors(2..6, 2),
        y in labels(5),
        gamma in 0.01f64..0.6,
        p in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)],
    ) {
        let n = NormSpec::new(p).unwrap();
        let k = pts.len();
        let class = ConceptClass::DualBall(DualBall::new(into_ball(pts, n), n).unwrap());
        let sample = LabeledSample::new((0..k).collect(), y[..k].to_vec()).unwrap();
        let gamma = Gamma::new(gamma).unwrap();
        let cfg = SolverConfig::exact();
        let a = realize(&class, &sample, &gamma, &cfg).unwrap();
        let b = realize(&class, &sample.flipped(), &gamma, &cfg).unwrap();
        prop_assert_eq!(a.status, b.status);
    }

    #[test]
    fn realize_certificates_hold(
        pts in vectors(2..6, 3),
        y in labels(5),
        gamma in 0.01f64..0.6,
        p in prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0)],
    ) {
        let n = NormSpec::new(p).unwrap();
        let k = pts.len();
        let class = ConceptClass::DualBall(DualBall::new(into_ball(pts, n), n).unwrap());
        let sample = LabeledSample::new((0..k).collect(), y[..k].to_vec()).unwrap();
        let cfg = SolverConfig::default();
        let v = realize(&class, &sample, &Gamma::new(gamma).unwrap(), &cfg).unwrap();
        match v.status {
            RealizeStatus::Realized => {
                let w = v.witness.expect("witness");
                prop_assert!(class.margin(&w, &sample).unwrap() >= gamma - cfg.tol);
            }
            RealizeStatus::NotRealized => {
                let c = v.collapse.expect("collapse");
                prop_assert!(class.support(&sample, &c.mu).unwrap().value < gamma + cfg.tol);
            }
            RealizeStatus::Marginal => prop_assert!((v.value - gamma).abs() <= v.band + v.gap),
        }
    }

    #[test]
    fn lipschitz_pairs_shatter_iff_far_apart(seed: u64, i in 0usize..6, j in 0usize..6, gamma in 0.01f64..0.6) {
        prop_assume!(i != j);
        let m = space(seed, 6);
        let d = m.dist(i, j);
        prop_assume!((d - 2.0 * gamma).abs() > 1e-6);
        let v = is_shattered(&ConceptClass::Lipschitz(m), &[i, j], &Gamma::new(gamma).unwrap(), &SolverConfig::default()).unwrap();
        prop_assert_eq!(v.status == ShatterStatus::Shattered, d >= 2.0 * gamma);
    }
}

fn dual_ball(pts: Vec<Vec<f64>>, p: f64) -> ConceptClass {
    let n = NormSpec::new(p).unwrap();
    ConceptClass::DualBall(DualBall::new(into_ball(pts, n), n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shattering_certificates_close(pts in vectors(2..5, 3), gamma in 0.02f64..0.5, p in prop_oneof![Just(1.0), Just(2.0), Just(3.0)]) {
        let k = pts.len();
        let class = dual_ball(pts, p);
        let cfg = SolverConfig::default();
        let v = is_shattered(&class, &(0..k).collect::<Vec<_>>(), &Gamma::new(gamma).unwrap(), &cfg).unwrap();
        prop_assert!(v.recheck(&class, cfg.tol).unwrap());
        if v.status == ShatterStatus::NotShattered {
            let ConceptClass::DualBall(b) = &class else { unreachable!() };
            let lambda = v.counterexample.as_ref().and_then(|c| c.lambda.as_ref()).expect("collapse weights");
            prop_assert!(verify_collapse(b.points(), b.norm(), lambda, gamma + v.band).unwrap());
        }
    }

    #[test]
    fn shattering_is_downward_closed_and_monotone_in_gamma(
        pts in vectors(2..5, 3),
        gamma in 0.02f64..0.5,
        p in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)],
    ) {
        let k = pts.len();
        let class = dual_ball(pts, p);
        let cfg = SolverConfig::exact();
        let all: Vec<usize> = (0..k).collect();
        let v = is_shattered(&class, &all, &Gamma::new(gamma).unwrap(), &cfg).unwrap();
        if v.status == ShatterStatus::Shattered {
            for drop in 0..k {
                let sub: Vec<usize> = all.iter().copied().filter(|&i| i != drop).collect();
                let s = is_shattered(&class, &sub, &Gamma::new(gamma).unwrap(), &cfg).unwrap();
                prop_assert_eq!(s.status, ShatterStatus::Shattered);
            }
            let s = is_shattered(&class, &all, &Gamma::new(gamma / 2.0).unwrap(), &cfg).unwrap();
            prop_assert_eq!(s.status, ShatterStatus::Shattered);
        }
    }

    #[test]
    fn more_points_than_dimensions_are_never_shattered(
        u in prop::collection::vec(prop::collection::vec(-8i32..8, 2), 3..5),
        p in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)],
    ) {
        let pts: Vec<Vec<f64>> = u.iter().map(|v| v.iter().map(|&x| f64::from(x) / 16.0).collect()).collect();
        let k = pts.len();
        let class = dual_ball(pts, p);
        let v = is_shattered(&class, &(0..k).collect::<Vec<_>>(), &Gamma::new(1e-3).unwrap(), &SolverConfig::exact()).unwrap();
        prop_assert_eq!(v.status, ShatterStatus::NotShattered);
    }

    #[test]
    fn dimension_profile_is_monotone(pts in vectors(3..6, 2), p in prop_oneof![Just(1.0), Just(2.0)]) {
        let k = pts.len();
        let class = dual_ball(pts, p);
        let ground: Vec<usize> = (0..k).collect();
        let entries = [0.05, 0.1, 0.2, 0.4]
            .iter()
            .map(|&g| {
                let s = max_shattered_subset(&class, &ground, &Gamma::new(g).unwrap(), &SolverConfig::exact(), SearchOptions::default()).unwrap();
                DimEntry { gamma: g, dim: s.size as u64, status: DimStatus::Exact }
            })
            .collect();
        prop_assert!(DimensionReport::new(entries).is_monotone());
    }

    #[test]
    fn gamma_space_contains_every_cube_corner(k in 1usize..4, a in 1i64..20, pattern: u8) {
        let gamma = a as f64 / 60.0;
        let bundle = gamma_counterexample_space(k, gamma).unwrap();
        let class = bundle.class().unwrap();
        let pts = bundle.shattered_set();
        let y: Vec<f64> = (0..pts.len()).map(|i| if pattern >> i & 1 == 1 { -gamma } else { gamma }).collect();
        let v = check_cube_condition(&class, &pts, gamma, &y, &SolverConfig::exact()).unwrap();
        prop_assert!(v.is_yes());
    }
}
