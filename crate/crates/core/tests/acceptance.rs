//! End-to-end acceptance criteria A1-A10.
//!
//! `acceptance_suite` runs every criterion against its runtime budget and
//! writes one `PASS`/`FAIL` line each straight to stdout, so the lines show
//! up even when the harness captures test output. Criteria listed in
//! `UNATTAINABLE` are computed as stated and reported as `FAIL`; the test
//! asserts that they still fail for the recorded reason instead of passing.

#![allow(clippy::needless_range_loop)]

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::Rng;

use marginlab::certify::{
    audit_submultiplicativity, fit_rate, is_shattered, is_shattered_sign_invariant, max_shattered_subset, realize,
    sign_invariant, verify_collapse, DimEntry, DimStatus, DimensionReport, Gamma, RealizeStatus, SearchOptions,
    ShatterStatus, ShatterVerdict,
};
use marginlab::classes::{ConceptClass, DistanceClass, DistanceVariant, DualBall, LabeledSample, PhiPreset, PhiSpec};
use marginlab::constructions::{
    gamma_counterexample_metric, gamma_counterexample_space, hadamard_shattered_set, intro_counterexample_space,
    standard_basis_set, PredictedStatus,
};
use marginlab::harness::{
    phi_dimension, random_metric_space, random_unit_vectors, run_experiment, task_rng, ExperimentConfig, ExperimentId,
    RowOutcome,
};
use marginlab::number::{ratio, Rational};
use marginlab::solver::{SignedWeights, SolverConfig};
use marginlab::spaces::{norm, validate_metric, FiniteMetricSpace, MetricCheck, NormSpec};

// Pinned tolerances.
const A1_OFFSET: f64 = 1e-6;
const A2_FLOAT_OFFSET: f64 = 1e-6;
const A2_ABOVE: f64 = 1e-4;
const A2_COLLAPSE_TOL: f64 = 1e-9;
const A3_GAMMA: f64 = 1e-3;
const A3_COLLAPSE_MAX: f64 = 1e-6;
const A3_SETS: usize = 100;
const A4_GAMMAS: [(&str, u64); 6] = [("0.3", 8), ("0.36", 7), ("0.4", 6), ("0.5", 4), ("0.6", 2), ("0.8", 1)];
const A6_GAMMA: (i64, i64) = (103, 300);
const A6_SPACES: usize = 200;
const A6_MAX_POINTS: usize = 12;
const A7_POLYTOPES: usize = 500;
const A7_GRID: usize = 100;
const A8_SPACES: usize = 100;
const A8_MAX_POINTS: usize = 10;
const A8_FRACTIONS: [f64; 3] = [0.1, 0.25, 0.4];
const A9_SPACES: usize = 200;
const A10_DIMS: [(u32, u64); 4] = [(2, 7), (3, 20), (4, 54), (5, 148)];
const A10_RESIDUAL_THRESHOLD: f64 = 0.5;
const SEED: u64 = 2024;

/// Criteria that cannot pass as stated; see `a10`.
const UNATTAINABLE: [&str; 1] = ["A10"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn a1() -> Outcome {
    let cfg = SolverConfig::default();
    let mut failures = vec![];
    let mut cases = 0;
    for m in 1..=4u32 {
        for p in [2.0, 3.0, 4.0] {
            let b = hadamard_shattered_set(m, NormSpec::new(p).unwrap()).unwrap();
            let n = 1usize << m;
            let gamma = Gamma::new(1.0 / (n as f64).sqrt() - A1_OFFSET).unwrap();
            let class = b.class().unwrap();
            let v = is_shattered(&class, &b.shattered_set(), &gamma, &cfg).unwrap();
            cases += 1;
            let ok = v.status == ShatterStatus::Shattered && v.points.len() == n && v.recheck(&class, cfg.tol).unwrap();
            if !ok {
                failures.push(format!("m={m} p={p}: {:?}", v.status));
            }
        }
    }
    outcome(failures.is_empty(), format!("{cases} Hadamard sets shattered at 1/sqrt(n) - 1e-6; failures {failures:?}"))
}

fn uniform_collapse_value(points: &[Vec<f64>], p: NormSpec) -> f64 {
    let n = points.len();
    let sum: Vec<f64> = (0..points[0].len()).map(|j| points.iter().map(|x| x[j]).sum::<f64>() / n as f64).collect();
    norm(&sum, p).unwrap()
}

fn a2() -> Outcome {
    let mut failures = vec![];
    for p in [1.0, 1.5, 2.0] {
        let norm_p = NormSpec::new(p).unwrap();
        for n in [4usize, 8, 16] {
            let b = standard_basis_set(n, norm_p).unwrap();
            let class = b.class().unwrap();
            let pts = b.shattered_set();
            assert!(sign_invariant(&class, &pts));
            let rate = (n as f64).powf(1.0 / p - 1.0);
            let (at, above, cfg) = match p {
                1.0 => (
                    Gamma::rational(ratio(1, 1)),
                    Gamma::rational(Rational::from_float(1.0 + A2_ABOVE).unwrap()),
                    SolverConfig::exact(),
                ),
                2.0 => (
                    Gamma::sqrt_of(ratio(1, n as i64)).unwrap(),
                    Gamma::new(rate + A2_ABOVE).unwrap(),
                    SolverConfig::exact(),
                ),
                _ => (
                    Gamma::new(rate - A2_FLOAT_OFFSET).unwrap(),
                    Gamma::new(rate + A2_ABOVE).unwrap(),
                    SolverConfig::default(),
                ),
            };
            let yes = is_shattered_sign_invariant(&class, &pts, &at, &cfg).unwrap();
            let no = is_shattered_sign_invariant(&class, &pts, &above, &cfg).unwrap();
            let points = b.points().unwrap();
            let value = uniform_collapse_value(points, norm_p);
            let lambda = SignedWeights::new(vec![1.0 / n as f64; n]).unwrap();
            let collapse_ok = (value - rate).abs() <= A2_COLLAPSE_TOL
                && verify_collapse(points, norm_p, &lambda, above.value()).unwrap();
            let ok = yes.status == ShatterStatus::Shattered
                && no.status == ShatterStatus::NotShattered
                && collapse_ok
                && yes.recheck(&class, cfg.tol).unwrap()
                && no.recheck(&class, cfg.tol).unwrap();
            if !ok {
                failures.push(format!("p={p} n={n}: {:?}/{:?} collapse {value}", yes.status, no.status));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("9 basis sets shattered at n^(1/p-1), not above, uniform collapse within 1e-9; failures {failures:?}"),
    )
}

/// Nonzero `c` with `sum c_i x_i = 0` for `d + 1` points in dimension `d`.
fn dependence(points: &[Vec<f64>]) -> Vec<f64> {
    let (d, m) = (points[0].len(), points.len());
    let mut a: Vec<Vec<f64>> = (0..d).map(|j| points.iter().map(|x| x[j]).collect()).collect();
    let mut pivots = vec![];
    let mut row = 0;
    for col in 0..m {
        let Some(p) = (row..d).max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs())) else { break };
        if a[p][col].abs() < 1e-12 {
            continue;
        }
        a.swap(row, p);
        for i in 0..d {
            if i != row {
                let f = a[i][col] / a[row][col];
                for k in 0..m {
                    a[i][k] -= f * a[row][k];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free = (0..m).find(|c| !pivots.contains(c)).expect("more points than dimensions");
    let mut c = vec![0.0; m];
    c[free] = 1.0;
    for (r, &pc) in pivots.iter().enumerate() {
        c[pc] = -a[r][free] / a[r][pc];
    }
    c
}

fn a3() -> Outcome {
    let cfg = SolverConfig::default();
    let gamma = Gamma::new(A3_GAMMA).unwrap();
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut task = 0;
    for d in [2usize, 3, 5] {
        for p in [1.5, 2.0, 3.0] {
            let norm_p = NormSpec::new(p).unwrap();
            for _ in 0..A3_SETS {
                let mut rng = task_rng(SEED, task);
                task += 1;
                let pts = random_unit_vectors(&mut rng, d + 1, d, norm_p);
                let c = dependence(&pts);
                let l1: f64 = c.iter().map(|x| x.abs()).sum();
                let labels: Vec<i8> = c.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect();
                let lambda = SignedWeights::new(c.iter().map(|x| x / l1).collect()).unwrap();
                let class = ConceptClass::DualBall(DualBall::new(pts.clone(), norm_p).unwrap());
                let all: Vec<usize> = (0..=d).collect();
                let v = is_shattered(&class, &all, &gamma, &cfg).unwrap();
                let r = realize(&class, &LabeledSample::new(all, labels).unwrap(), &gamma, &cfg).unwrap();
                let value = r.collapse.as_ref().map_or(f64::INFINITY, |c| c.value);
                worst = worst.max(value);
                let ok = v.status == ShatterStatus::NotShattered
                    && v.recheck(&class, cfg.tol).unwrap()
                    && r.status == RealizeStatus::NotRealized
                    && value <= A3_COLLAPSE_MAX
                    && verify_collapse(&pts, norm_p, &lambda, A3_COLLAPSE_MAX).unwrap();
                if !ok {
                    failures += 1;
                }
            }
        }
    }
    outcome(failures == 0, format!("{task} sets of d+1 vectors not shattered at 1e-3; worst dependence-labeling collapse {worst:.2e}; failures {failures}"))
}

/// Exact dims of the orthonormal 8-set, with verified certificates.
fn l2_dims() -> (Vec<DimEntry>, Vec<String>) {
    let b = standard_basis_set(8, NormSpec::L2).unwrap();
    let class = b.class().unwrap();
    let cfg = SolverConfig::exact();
    let mut entries = vec![];
    let mut failures = vec![];
    for (g, want) in A4_GAMMAS {
        let gamma = marginlab::harness::parse_gamma(g).unwrap();
        let s =
            max_shattered_subset(&class, &(0..8).collect::<Vec<_>>(), &gamma, &cfg, SearchOptions::default()).unwrap();
        let closed_form = 8u64.min((1.0 / (gamma.value() * gamma.value()) + 1e-9).floor() as u64);
        let certified = s.verdict.as_ref().is_some_and(|v| v.recheck(&class, cfg.tol).unwrap())
            && s.rejected.iter().all(|r| r.recheck(&class, cfg.tol).unwrap())
            && (s.size == 8 || !s.rejected.is_empty());
        if s.size as u64 != want || want != closed_form || !certified || s.lower_bound_only {
            failures.push(format!("gamma={g}: got {} want {want}", s.size));
        }
        entries.push(DimEntry { gamma: gamma.value(), dim: s.size as u64, status: DimStatus::Exact });
    }
    (entries, failures)
}

fn a4() -> Outcome {
    let (entries, failures) = l2_dims();
    let dims: Vec<u64> = entries.iter().map(|e| e.dim).collect();
    outcome(failures.is_empty(), format!("dims {dims:?}; failures {failures:?}"))
}

fn a5() -> Outcome {
    let (l2, _) = l2_dims();
    let spec = PhiSpec::new(PhiPreset::Exponential, 100).unwrap();
    let mut phi = vec![];
    for (g, _) in A4_GAMMAS {
        let gamma = marginlab::harness::parse_gamma(g).unwrap();
        let (entry, _, ok) = phi_dimension(&spec, &gamma, &SolverConfig::exact()).unwrap();
        assert!(ok);
        phi.push(entry);
    }
    let a = audit_submultiplicativity(&l2);
    let b = audit_submultiplicativity(&phi);
    let rows = a.rows.len() + b.rows.len();
    outcome(
        a.all_pass() && b.all_pass() && !a.rows.is_empty() && !b.rows.is_empty(),
        format!("{rows} audited triples (l2 {}, phi {})", a.rows.len(), b.rows.len()),
    )
}

fn a6() -> Outcome {
    let cfg = SolverConfig::default();
    let gamma = Gamma::rational(ratio(A6_GAMMA.0, A6_GAMMA.1));
    let mut shattered_pairs = 0;
    let mut pairs = 0;
    for t in 0..A6_SPACES {
        let mut rng = task_rng(SEED ^ 6, t as u64);
        let n = rng.random_range(2..=A6_MAX_POINTS);
        let space = random_metric_space(&mut rng, n).unwrap();
        let class = ConceptClass::DistanceCombination(DistanceClass::all_centers(space, DistanceVariant::Pos).unwrap());
        for i in 0..n {
            for j in i + 1..n {
                pairs += 1;
                if is_shattered(&class, &[i, j], &gamma, &cfg).unwrap().status != ShatterStatus::NotShattered {
                    shattered_pairs += 1;
                }
            }
        }
    }

    let b = gamma_counterexample_space(6, 0.3).unwrap();
    let (_, exact) = gamma_counterexample_metric::<Rational>(6, &ratio(3, 10)).unwrap();
    let valid =
        b.predicted_status == PredictedStatus::MetricValid && validate_metric(&exact).unwrap() == MetricCheck::Ok;
    let class = b.class().unwrap();
    let points = b.shattered_set();
    let mut labelings = std::collections::HashSet::new();
    let mut worst = f64::INFINITY;
    for w in &b.witnesses {
        let s = LabeledSample::new(points.clone(), w.labels.clone()).unwrap();
        worst = worst.min(class.margin(&w.member, &s).unwrap());
        labelings.insert(w.labels.clone());
    }
    let realized = labelings.len() == 64 && worst >= 0.3 - 1e-12;

    let (_, bad) = gamma_counterexample_metric::<Rational>(2, &ratio(34, 100)).unwrap();
    let invalid = matches!(validate_metric(&bad).unwrap(), MetricCheck::Violation(_));

    outcome(
        shattered_pairs == 0 && valid && realized && invalid,
        format!("(a) {shattered_pairs}/{pairs} pairs shattered; (b) valid={valid} labelings={} worst margin {worst:.6}; (c) invalid={invalid}", labelings.len()),
    )
}

fn a7() -> Outcome {
    let mut cfg = ExperimentConfig::new(ExperimentId::EquivalenceFuzz);
    cfg.seed = SEED;
    cfg.trials = A7_POLYTOPES;
    cfg.sizes = vec![5, A7_GRID];
    let t = run_experiment(&cfg).unwrap();
    let polytopes = t.rows.iter().filter(|r| t.get(r, "kind") == Some("polytope")).count();
    let grid = t.rows.iter().filter(|r| t.get(r, "kind") == Some("l2_grid")).count();
    let verified = t.certificates.iter().all(|c| c.verify().unwrap());
    let bad = t.rows.len() - t.count(RowOutcome::Pass);
    outcome(
        bad == 0 && polytopes == A7_POLYTOPES && grid == A7_GRID && verified,
        format!("{polytopes} polytopes and {grid} grid instances; {bad} disagreements or undecided"),
    )
}

/// Largest subset with pairwise distances >= s, by enumeration.
fn brute_packing(space: &FiniteMetricSpace, s: f64) -> usize {
    let n = space.len();
    (0u32..1 << n)
        .filter(|m| (0..n).all(|i| m >> i & 1 == 0 || (i + 1..n).all(|j| m >> j & 1 == 0 || space.dist(i, j) >= s)))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn a8() -> Outcome {
    let cfg = SolverConfig::default();
    let mut mismatches = vec![];
    let mut cases = 0;
    for t in 0..A8_SPACES {
        let mut rng = task_rng(SEED ^ 8, t as u64);
        let n = rng.random_range(2..=A8_MAX_POINTS);
        let space = random_metric_space(&mut rng, n).unwrap();
        let diam = marginlab::spaces::diameter(&space);
        let class = ConceptClass::Lipschitz(space.clone());
        for frac in A8_FRACTIONS {
            let g = frac * diam;
            let s = max_shattered_subset(
                &class,
                &(0..n).collect::<Vec<_>>(),
                &Gamma::new(g).unwrap(),
                &cfg,
                SearchOptions::default(),
            )
            .unwrap();
            let (lib, _) = marginlab::certify::packing_number(&space, 2.0 * g).unwrap();
            let oracle = brute_packing(&space, 2.0 * g);
            cases += 1;
            if s.size != oracle || lib != oracle || s.lower_bound_only {
                mismatches.push(format!("space {t} frac {frac}: dim {} packing {oracle}", s.size));
            }
        }
    }
    outcome(mismatches.is_empty(), format!("{cases} cases, dim equals 2-gamma packing; mismatches {mismatches:?}"))
}

fn a9() -> Outcome {
    let cfg = SolverConfig::default();
    let gamma = Gamma::new(0.5).unwrap();
    let mut shattered = 0;
    let mut pairs = 0;
    for t in 0..A9_SPACES {
        let mut rng = task_rng(SEED ^ 9, t as u64);
        let n = rng.random_range(2..=A6_MAX_POINTS);
        let space = random_metric_space(&mut rng, n).unwrap();
        let r = rng.random_range(0.01..0.34);
        let big_r = r * rng.random_range(3.0..6.0);
        let class =
            ConceptClass::BallPair { space, params: marginlab::classes::BallPairParams::new(r, big_r).unwrap() };
        for i in 0..n {
            for j in i + 1..n {
                pairs += 1;
                if is_shattered(&class, &[i, j], &gamma, &cfg).unwrap().status != ShatterStatus::NotShattered {
                    shattered += 1;
                }
            }
        }
    }
    let b = intro_counterexample_space(4, 0.25, 0.5, true).unwrap();
    let class = b.class().unwrap();
    let v: ShatterVerdict = is_shattered(&class, &b.shattered_set(), &gamma, &cfg).unwrap();
    let realized =
        v.status == ShatterStatus::Shattered && v.witnesses.len() == 16 && v.recheck(&class, cfg.tol).unwrap();
    outcome(
        shattered == 0 && realized,
        format!("{shattered}/{pairs} random pairs shattered; intro k=4 labelings realized {}", v.witnesses.len()),
    )
}

/// φ = floor(e^(1/γ)): the dims are exact, but their log-log fit deviates
/// by at most about 0.16 over the four-point grid, so the residual rule
/// cannot flag super-polynomial growth here.
fn a10() -> Outcome {
    let spec = PhiSpec::new(PhiPreset::Exponential, 1000).unwrap();
    let mut entries = vec![];
    let mut dims_ok = true;
    for (k, want) in A10_DIMS {
        let gamma = Gamma::rational(ratio(1, i64::from(k)));
        let (entry, _, ok) = phi_dimension(&spec, &gamma, &SolverConfig::exact()).unwrap();
        dims_ok &= ok && entry.dim == want && want == (f64::from(k)).exp().floor() as u64;
        entries.push(entry);
    }
    let fit = fit_rate(&DimensionReport::new(entries.clone())).unwrap();
    let dims: Vec<u64> = entries.iter().map(|e| e.dim).collect();
    outcome(
        dims_ok && fit.super_polynomial && fit.residual > A10_RESIDUAL_THRESHOLD,
        format!(
            "dims {dims:?} exact={dims_ok}; residual {:.4} (threshold {A10_RESIDUAL_THRESHOLD}), exponent {:.3}",
            fit.residual, fit.exponent
        ),
    )
}

#[test]
fn acceptance_suite() {
    type Criterion = (&'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("A1", 300, a1),
        ("A2", 180, a2),
        ("A3", 120, a3),
        ("A4", 300, a4),
        ("A5", 60, a5),
        ("A6", 240, a6),
        ("A7", 600, a7),
        ("A8", 300, a8),
        ("A9", 120, a9),
        ("A10", 60, a10),
    ];
    let mut results = vec![];
    for (id, budget, run) in criteria {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = out.pass && in_time;
        let line = format!(
            "acceptance {id:<4} {} ({:.1}s of {budget}s) {}\n",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            out.detail
        );
        std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
        results.push((id, pass, out.detail));
    }
    for (id, pass, detail) in &results {
        if UNATTAINABLE.contains(id) {
            assert!(!pass, "{id} now passes; drop it from UNATTAINABLE: {detail}");
        } else {
            assert!(pass, "{id} failed: {detail}");
        }
    }
}

#[test]
fn a10_dims_are_exact_even_though_the_fit_is_not_flagged() {
    let spec = PhiSpec::new(PhiPreset::Exponential, 1000).unwrap();
    let mut entries = vec![];
    for (k, want) in A10_DIMS {
        let (entry, _, ok) =
            phi_dimension(&spec, &Gamma::rational(ratio(1, i64::from(k))), &SolverConfig::exact()).unwrap();
        assert!(ok);
        assert_eq!(entry.dim, want);
        entries.push(entry);
    }
    // independent least squares on (ln k, ln floor(e^k))
    let pts: Vec<(f64, f64)> = A10_DIMS.iter().map(|&(k, d)| (f64::from(k).ln(), (d as f64).ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 4.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 4.0;
    let slope =
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let residual = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).abs()).fold(0.0, f64::max);
    let fit = fit_rate(&DimensionReport::new(entries)).unwrap();
    assert!((fit.exponent - slope).abs() < 1e-12);
    assert!((fit.residual - residual).abs() < 1e-12);
    assert!(residual < A10_RESIDUAL_THRESHOLD);
    assert!(!fit.super_polynomial);
}
