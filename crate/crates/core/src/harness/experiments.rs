//! The six experiment drivers. Each returns its columns, one draft row per
//! decision and a summary map.

use std::collections::BTreeMap;

use rand::Rng;

use super::config::{parse_gamma, ExperimentConfig};
use super::random::{random_metric_space, random_polytope, task_rng};
use super::table::{Evidence, RowOutcome};
use super::{run_tasks, Draft, Output};
use crate::certify::{
    audit_submultiplicativity, check_cube_condition, fit_rate, is_shattered, is_shattered_sign_invariant,
    max_shattered_subset, packing_number, realize, DimEntry, DimStatus, DimensionReport, Gamma, RealizeStatus,
    SearchOptions, ShatterStatus, ShatterVerdict,
};
use crate::classes::{ConceptClass, DistanceClass, DistanceVariant, DualBall, LabeledSample, PhiPreset, PhiSpec};
use crate::constructions::{
    gamma_counterexample_metric, gamma_counterexample_space, hadamard_shattered_set, standard_basis_set,
    PredictedStatus,
};
use crate::error::{Error, Result};
use crate::number::{ratio, Number, Rational};
use crate::solver::{lp_solve, Bound, LinearProgram, SolverConfig};
use crate::spaces::{diameter, validate_metric, MetricCheck, NormSpec};

/// Float paths test `gamma - FLOAT_SLACK` so that thresholds attained
/// exactly stay outside the undecided band.
pub const FLOAT_SLACK: f64 = 1e-6;

/// Largest Hadamard exponent used by the profile (`2^15` labelings).
pub const PROFILE_MAX_HADAMARD: u32 = 4;

fn f(x: f64) -> String {
    format!("{x}")
}

fn shatter_outcome(status: ShatterStatus, expect: ShatterStatus) -> RowOutcome {
    match status {
        ShatterStatus::Marginal => RowOutcome::Marginal,
        s if s == expect => RowOutcome::Pass,
        _ => RowOutcome::Fail,
    }
}

fn status_str(s: ShatterStatus) -> &'static str {
    match s {
        ShatterStatus::Shattered => "shattered",
        ShatterStatus::NotShattered => "not_shattered",
        ShatterStatus::Marginal => "marginal",
    }
}

fn dim_status_str(s: DimStatus) -> &'static str {
    match s {
        DimStatus::Exact => "exact",
        DimStatus::Lower => "lower",
        DimStatus::Upper => "upper",
    }
}

fn lower_gamma(g: &Gamma) -> Result<Gamma> {
    Gamma::new(g.value() - FLOAT_SLACK)
}

/// Margin dimension profile of `l_p` from the explicit constructions:
/// standard bases (sign-invariant, any size) and Hadamard rows for `p > 2`
/// (`m <= 4`, full enumeration). Rational arithmetic is used at the exact
/// threshold for `p` in `{1, 2}`; other exponents test `gamma - 1e-6`.
/// Dims are lower bounds; the summary holds the fitted exponent per `p`.
pub(super) fn lp_profile(cfg: &ExperimentConfig) -> Result<Output> {
    let grid = cfg.gamma_grid()?;
    let cap = cfg.size(0, 128);
    let tasks: Vec<(NormSpec, usize)> = cfg.p.iter().flat_map(|&p| (0..grid.len()).map(move |g| (p, g))).collect();
    let results = run_tasks(tasks.len(), cfg.keep_going, |t| {
        let (p, g) = tasks[t];
        lp_task(cfg, p, &cfg.gammas[g], &grid[g], cap)
    });
    let mut drafts = vec![];
    let mut entries: BTreeMap<String, Vec<DimEntry>> = BTreeMap::new();
    for (t, r) in results.into_iter().enumerate() {
        match r {
            Ok((rows, entry)) => {
                drafts.extend(rows);
                entries.entry(tasks[t].0.to_string()).or_default().push(entry);
            }
            Err(e) => drafts.push(Draft::error(e)),
        }
    }
    let mut summary = BTreeMap::new();
    for (p, e) in entries {
        let report = DimensionReport::new(e);
        summary.insert(
            format!("dims[p={p}]"),
            report.entries.iter().map(|e| e.dim.to_string()).collect::<Vec<_>>().join(" "),
        );
        match fit_rate(&report) {
            Ok(fit) => {
                summary.insert(format!("exponent[p={p}]"), f(fit.exponent));
                summary.insert(format!("residual[p={p}]"), f(fit.residual));
            }
            Err(e) => {
                summary.insert(format!("exponent[p={p}]"), format!("unavailable: {e}"));
            }
        }
    }
    Ok(Output {
        columns: vec!["p", "gamma", "gamma_tested", "construction", "n", "status", "dim", "dim_status"],
        drafts,
        summary,
    })
}

fn lp_task(
    cfg: &ExperimentConfig,
    p: NormSpec,
    label: &str,
    gamma: &Gamma,
    cap: usize,
) -> Result<(Vec<Draft>, DimEntry)> {
    let exact = cfg.solver()?.is_exact() && (p.is_l1() || p.is_l2());
    let (solver, tested) =
        if exact { (cfg.solver()?, gamma.clone()) } else { (cfg.float_solver()?, lower_gamma(gamma)?) };
    let mut rows = vec![];
    let mut dim = 0usize;
    let mut record = |construction: String, n: usize, verdict: ShatterVerdict, class: &ConceptClass, inv: bool| {
        if verdict.status == ShatterStatus::Shattered {
            dim = dim.max(n);
        }
        rows.push((
            construction,
            n,
            verdict.status,
            Draft::new(shatter_outcome(verdict.status, ShatterStatus::Shattered), vec![]).with_evidence(
                class,
                tested.value(),
                cfg.tol,
                vec![Evidence::Shatter { verdict, sign_invariant: inv }],
            ),
        ));
    };

    // largest basis whose predicted margin n^(1/p - 1) reaches gamma
    let n0 = if p.is_l1() {
        cap
    } else {
        let q = p.dual_exponent();
        ((gamma.value().powf(-q) * (1.0 + 1e-9)).floor() as usize).clamp(1, cap)
    };
    for n in [n0, n0.saturating_sub(1)] {
        if n == 0 {
            break;
        }
        let b = standard_basis_set(n, p)?;
        let class = b.class()?;
        let v = is_shattered_sign_invariant(&class, &b.shattered_set(), &tested, &solver)?;
        let done = v.status == ShatterStatus::Shattered;
        record(format!("basis{n}"), n, v, &class, true);
        if done {
            break;
        }
    }
    if p.p() > 2.0 {
        let limit = (1.0 / (gamma.value() * gamma.value())) * (1.0 + 1e-9);
        if let Some(m) = (1..=PROFILE_MAX_HADAMARD).rev().find(|&m| f64::from(1u32 << m) <= limit) {
            let b = hadamard_shattered_set(m, p)?;
            let class = b.class()?;
            let v = is_shattered(&class, &b.shattered_set(), &tested, &solver)?;
            record(format!("hadamard{}", 1 << m), 1 << m, v, &class, false);
        }
    }
    let entry = DimEntry { gamma: tested.value(), dim: dim as u64, status: DimStatus::Lower };
    let drafts = rows
        .into_iter()
        .map(|(construction, n, status, mut d)| {
            d.values = vec![
                p.to_string(),
                label.to_string(),
                f(tested.value()),
                construction,
                n.to_string(),
                status_str(status).into(),
                dim.to_string(),
                dim_status_str(DimStatus::Lower).into(),
            ];
            d
        })
        .collect();
    Ok((drafts, entry))
}

/// Dimension of the φ-class at `gamma`, certified through its box
/// structure: points `0..k` are shattered (one labeling decides) and point
/// `k` alone is not realizable; `tau` is nonincreasing, so no later point is.
pub fn phi_dimension(spec: &PhiSpec, gamma: &Gamma, cfg: &SolverConfig) -> Result<(DimEntry, Vec<Evidence>, bool)> {
    let class = ConceptClass::Phi(*spec);
    let k = spec.dim(gamma.value()) as usize;
    let mut evidence = vec![];
    let mut ok = true;
    if k > 0 {
        let v = is_shattered_sign_invariant(&class, &(0..k).collect::<Vec<_>>(), gamma, cfg)?;
        ok &= v.status == ShatterStatus::Shattered;
        evidence.push(Evidence::Shatter { verdict: v, sign_invariant: true });
    }
    if (k as u64) < spec.n_max() {
        let sample = LabeledSample::new(vec![k], vec![1])?;
        let v = realize(&class, &sample, gamma, cfg)?;
        ok &= v.status == RealizeStatus::NotRealized;
        evidence.push(Evidence::Realize { sample, verdict: v });
    }
    Ok((DimEntry { gamma: gamma.value(), dim: k as u64, status: DimStatus::Exact }, evidence, ok))
}

fn orthonormal(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// Exact margin dimensions of the orthonormal basis of `l_2^n` (`n` from
/// `sizes[0]`) and of the φ-class, followed by the submultiplicativity
/// audit over every grid triple `(g1, g2, g1 g2)`.
pub(super) fn submulti_audit(cfg: &ExperimentConfig) -> Result<Output> {
    let grid = cfg.gamma_grid()?;
    let n = cfg.size(0, 8);
    let spec = cfg.phi.unwrap_or(PhiSpec::new(PhiPreset::Exponential, 100)?);
    let solver = cfg.solver()?;
    let l2 = ConceptClass::DualBall(DualBall::new(orthonormal(n), NormSpec::L2)?);
    let ground: Vec<usize> = (0..n).collect();
    let phi_class = ConceptClass::Phi(spec);
    let count = grid.len();
    let results = run_tasks(2 * count, cfg.keep_going, |t| -> Result<(DimEntry, Draft)> {
        let gamma = &grid[t % count];
        if t < count {
            let s = max_shattered_subset(&l2, &ground, gamma, &solver, SearchOptions::default())?;
            let exact = !s.lower_bound_only && !s.marginal;
            let status = if exact { DimStatus::Exact } else { DimStatus::Lower };
            let entry = DimEntry { gamma: gamma.value(), dim: s.size as u64, status };
            let outcome = if s.marginal { RowOutcome::Marginal } else { RowOutcome::Pass };
            let d = Draft::new(outcome, vec![]).with_evidence(
                &l2,
                gamma.value(),
                cfg.tol,
                vec![Evidence::Search { search: s }],
            );
            Ok((entry, d))
        } else {
            let (entry, evidence, ok) = phi_dimension(&spec, gamma, &solver)?;
            let outcome = if ok { RowOutcome::Pass } else { RowOutcome::Fail };
            Ok((entry, Draft::new(outcome, vec![]).with_evidence(&phi_class, gamma.value(), cfg.tol, evidence)))
        }
    });
    let mut drafts = vec![];
    let mut families: [Vec<DimEntry>; 2] = [vec![], vec![]];
    let names = [format!("l2^{n}"), format!("phi({})", spec_name(&spec))];
    for (t, r) in results.into_iter().enumerate() {
        match r {
            Ok((e, mut d)) => {
                let fam = t / count;
                d.values = vec![
                    "dim".into(),
                    names[fam].clone(),
                    cfg.gammas[t % count].clone(),
                    String::new(),
                    e.dim.to_string(),
                    dim_status_str(e.status).into(),
                    String::new(),
                    String::new(),
                ];
                families[fam].push(e);
                drafts.push(d);
            }
            Err(e) => drafts.push(Draft::error(e)),
        }
    }
    let mut summary = BTreeMap::new();
    for (fam, entries) in families.iter().enumerate() {
        let report = audit_submultiplicativity(entries);
        summary.insert(format!("triples[{}]", names[fam]), report.rows.len().to_string());
        summary.insert(format!("all_pass[{}]", names[fam]), report.all_pass().to_string());
        for row in report.rows {
            drafts.push(Draft::new(
                if row.pass { RowOutcome::Pass } else { RowOutcome::Fail },
                vec![
                    "audit".into(),
                    names[fam].clone(),
                    f(row.gamma1),
                    f(row.gamma2),
                    String::new(),
                    String::new(),
                    row.lhs.to_string(),
                    row.rhs.to_string(),
                ],
            ));
        }
        for s in report.skipped {
            drafts.push(Draft { note: s, ..Draft::new(RowOutcome::Pass, vec![String::new(); 8]) });
        }
    }
    Ok(Output { columns: vec!["kind", "class", "gamma", "gamma2", "dim", "dim_status", "lhs", "rhs"], drafts, summary })
}

fn spec_name(spec: &PhiSpec) -> String {
    match spec.preset {
        PhiPreset::Exponential => format!("exp,N={}", spec.n_max()),
        PhiPreset::InversePower { k } => format!("inverse_power{k},N={}", spec.n_max()),
    }
}

/// Pair shattering under the positive half `D^>` on random spaces of
/// diameter 1 (3 to `sizes[0]` points, `trials` spaces) at `gammas[0]`,
/// followed by two fixed constructions: the gamma-space with `k = 6,
/// gamma = 3/10` (valid, all 64 labelings realized by the named witnesses)
/// and `k = 2, gamma = 17/50` (not a metric, checked in rational arithmetic).
pub(super) fn metric_dichotomy(cfg: &ExperimentConfig) -> Result<Output> {
    let gamma = cfg.gamma_grid()?.into_iter().next().ok_or_else(|| Error::input("metric-dichotomy needs one gamma"))?;
    let max_n = cfg.size(0, 12).max(3);
    let solver = cfg.solver()?;
    let results = run_tasks(cfg.trials + 2, cfg.keep_going, |t| {
        if t < cfg.trials {
            dichotomy_trial(cfg, t, max_n, &gamma, &solver)
        } else if t == cfg.trials {
            gamma_space_valid(cfg, 6, "3/10")
        } else {
            gamma_space_invalid(2, "17/50")
        }
    });
    let drafts: Vec<Draft> = results.into_iter().map(|r| r.unwrap_or_else(Draft::error)).collect();
    let mut summary = BTreeMap::new();
    summary.insert("sampling_model".into(), "integer weights 1..=1000, shortest-path closure, unit diameter".into());
    summary.insert(
        "spaces_with_shattered_pair".into(),
        drafts.iter().take(cfg.trials).filter(|d| d.outcome == RowOutcome::Fail).count().to_string(),
    );
    Ok(Output {
        columns: vec![
            "source",
            "n",
            "pairs",
            "shattered_pairs",
            "marginal_pairs",
            "best_pair",
            "best_margin",
            "metric",
        ],
        drafts,
        summary,
    })
}

fn dichotomy_trial(
    cfg: &ExperimentConfig,
    t: usize,
    max_n: usize,
    gamma: &Gamma,
    solver: &SolverConfig,
) -> Result<Draft> {
    let mut rng = task_rng(cfg.seed, t as u64);
    let n = rng.random_range(3..=max_n);
    let space = random_metric_space(&mut rng, n)?;
    let class = ConceptClass::DistanceCombination(DistanceClass::new(space, (0..n).collect(), DistanceVariant::Pos)?);
    let (mut shattered, mut marginal, mut pairs) = (0, 0, 0);
    let mut best: Option<((usize, usize), f64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            pairs += 1;
            let mut worst = f64::INFINITY;
            let mut statuses = vec![];
            for labels in [[1i8, 1], [1, -1], [-1, 1], [-1, -1]] {
                let v = realize(&class, &LabeledSample::new(vec![i, j], labels.to_vec())?, gamma, solver)?;
                worst = worst.min(v.value);
                statuses.push(v.status);
            }
            if statuses.iter().all(|s| *s == RealizeStatus::Realized) {
                shattered += 1;
            } else if !statuses.contains(&RealizeStatus::NotRealized) {
                marginal += 1;
            }
            if best.is_none_or(|(_, m)| worst > m) {
                best = Some(((i, j), worst));
            }
        }
    }
    let ((bi, bj), margin) = best.expect("at least one pair");
    let verdict = is_shattered(&class, &[bi, bj], gamma, solver)?;
    let outcome = if shattered > 0 {
        RowOutcome::Fail
    } else if marginal > 0 {
        RowOutcome::Marginal
    } else {
        RowOutcome::Pass
    };
    Ok(Draft::new(
        outcome,
        vec![
            format!("random#{t}"),
            n.to_string(),
            pairs.to_string(),
            shattered.to_string(),
            marginal.to_string(),
            format!("{bi}-{bj}"),
            f(margin),
            "valid".into(),
        ],
    )
    .with_evidence(&class, gamma.value(), cfg.tol, vec![Evidence::Shatter { verdict, sign_invariant: false }]))
}

fn gamma_space_valid(cfg: &ExperimentConfig, k: usize, g: &str) -> Result<Draft> {
    let gamma = parse_gamma(g)?;
    let b = gamma_counterexample_space(k, gamma.value())?;
    let source = format!("gamma_space k={k} gamma={g}");
    if b.predicted_status != PredictedStatus::MetricValid {
        return Ok(Draft::new(
            RowOutcome::Fail,
            vec![
                source,
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("invalid {:?}", b.violation),
            ],
        ));
    }
    let class = b.class()?;
    let points = b.shattered_set();
    let mut verdict = ShatterVerdict {
        status: ShatterStatus::Shattered,
        gamma: gamma.value(),
        points: points.clone(),
        band: 0.0,
        witnesses: vec![],
        counterexample: None,
        marginal_pattern: None,
    };
    let mut worst = f64::INFINITY;
    for w in &b.witnesses {
        let s = LabeledSample::new(points.clone(), w.labels.clone())?;
        worst = worst.min(class.margin(&w.member, &s)?);
        verdict
            .witnesses
            .push(crate::certify::PatternWitness { labels: w.labels.clone(), witness: Some(w.member.clone()) });
    }
    let ok = verdict.witnesses.len() == 1 << k && worst >= gamma.value() - cfg.tol;
    Ok(Draft::new(
        if ok { RowOutcome::Pass } else { RowOutcome::Fail },
        vec![
            source,
            class.ground_size().to_string(),
            String::new(),
            String::new(),
            String::new(),
            format!("labelings={}", verdict.witnesses.len()),
            f(worst),
            "valid".into(),
        ],
    )
    .with_evidence(&class, gamma.value(), cfg.tol, vec![Evidence::Shatter { verdict, sign_invariant: false }]))
}

fn gamma_space_invalid(k: usize, g: &str) -> Result<Draft> {
    let gamma = parse_gamma(g)?;
    let exact = gamma.exact().cloned().expect("parsed margins are rational");
    let (_, dist) = gamma_counterexample_metric::<Rational>(k, &exact)?;
    let check = validate_metric(&dist)?;
    let (outcome, metric) = match check {
        MetricCheck::Ok => (RowOutcome::Fail, "valid".to_string()),
        MetricCheck::Violation(v) => (RowOutcome::Pass, format!("invalid {v:?}")),
    };
    Ok(Draft::new(
        outcome,
        vec![
            format!("gamma_space k={k} gamma={g} (rational)"),
            dist.len().to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            f(gamma.value()),
            metric,
        ],
    ))
}

/// Lipschitz margin dimension (exhaustive subset search) against the
/// `2 gamma`-packing number on random spaces, for `gamma` given as fractions
/// of the diameter.
pub(super) fn lip_packing(cfg: &ExperimentConfig) -> Result<Output> {
    let fracs = cfg.gamma_grid()?;
    let max_n = cfg.size(0, 10).max(2);
    let solver = cfg.solver()?;
    let results = run_tasks(cfg.trials, cfg.keep_going, |t| -> Result<Vec<Draft>> {
        let mut rng = task_rng(cfg.seed, t as u64);
        let n = rng.random_range(2..=max_n);
        let space = random_metric_space(&mut rng, n)?;
        let diam = diameter(&space);
        let class = ConceptClass::Lipschitz(space.clone());
        let ground: Vec<usize> = (0..n).collect();
        let mut rows = vec![];
        for (fi, frac) in fracs.iter().enumerate() {
            let g = frac.value() * diam;
            let gamma = Gamma::new(g)?;
            let search = max_shattered_subset(&class, &ground, &gamma, &solver, SearchOptions::default())?;
            let (pk, subset) = packing_number(&space, 2.0 * g)?;
            let outcome = if search.marginal {
                RowOutcome::Marginal
            } else if search.size == pk && !search.lower_bound_only {
                RowOutcome::Pass
            } else {
                RowOutcome::Fail
            };
            let values = vec![
                format!("random#{t}"),
                n.to_string(),
                cfg.gammas[fi].clone(),
                f(g),
                search.size.to_string(),
                pk.to_string(),
            ];
            rows.push(Draft::new(outcome, values).with_evidence(
                &class,
                g,
                cfg.tol,
                vec![Evidence::Search { search }, Evidence::Packing { s: 2.0 * g, subset }],
            ));
        }
        Ok(rows)
    });
    let mut drafts = vec![];
    for r in results {
        match r {
            Ok(rows) => drafts.extend(rows),
            Err(e) => drafts.push(Draft::error(e)),
        }
    }
    let mut summary = BTreeMap::new();
    summary.insert("sampling_model".into(), "integer weights 1..=1000, shortest-path closure, unit diameter".into());
    summary.insert("mismatches".into(), drafts.iter().filter(|d| d.outcome == RowOutcome::Fail).count().to_string());
    Ok(Output { columns: vec!["source", "n", "gamma_fraction", "gamma", "dim", "packing"], drafts, summary })
}

/// `min over mu in the simplex of max_v sum_i mu_i s_i v(x_i)`, by an exact
/// LP over the vertices of the polytope.
pub fn polytope_pattern_min(
    vertices: &[Vec<f64>],
    points: &[usize],
    signs: &[i8],
    cfg: &SolverConfig,
) -> Result<Rational> {
    let n = points.len();
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = Rational::from_f64(-1.0);
    let mut lp = LinearProgram::maximize(objective).bound(n, Bound::free());
    for v in vertices {
        let mut row: Vec<Rational> =
            points.iter().zip(signs).map(|(&x, &s)| Rational::from_f64(f64::from(s) * v[x])).collect();
        row.push(Rational::from_f64(-1.0));
        lp = lp.le(row, Rational::zero());
    }
    let mut mass = vec![Rational::one(); n + 1];
    mass[n] = Rational::zero();
    lp = lp.eq(mass, Rational::one());
    let opt = lp_solve(&lp, cfg)?.optimal().ok_or_else(|| Error::degenerate("pattern LP has no optimum"))?;
    Ok(opt.value.neg())
}

fn pattern(t: usize, n: usize) -> Vec<i8> {
    (0..n).map(|i| if t >> (n - 1 - i) & 1 == 1 { -1 } else { 1 }).collect()
}

/// Three shattering decisions on random polytopes (`trials` instances over at
/// most `sizes[0]` points) that must agree exactly in rational arithmetic:
/// labeling enumeration, all cube corners, and the exact LP minimum over
/// signed weights (with a random weight sample as a consistency check).
/// Then `sizes[1]` (default 100) `l_2^2` instances where `realize` must
/// agree with a grid search over unit functionals at angular step 1e-3.
pub(super) fn equivalence_fuzz(cfg: &ExperimentConfig) -> Result<Output> {
    let max_n = cfg.size(0, 5).max(1);
    let grid_trials = cfg.size(1, 100);
    let solver = cfg.solver()?;
    let float = cfg.float_solver()?;
    let results = run_tasks(cfg.trials + grid_trials, cfg.keep_going, |t| {
        if t < cfg.trials {
            polytope_trial(cfg, t, max_n, &solver)
        } else {
            grid_trial(cfg, t, &float)
        }
    });
    let drafts: Vec<Draft> = results.into_iter().map(|r| r.unwrap_or_else(Draft::error)).collect();
    let mut summary = BTreeMap::new();
    summary.insert("disagreements".into(), drafts.iter().filter(|d| d.outcome == RowOutcome::Fail).count().to_string());
    Ok(Output {
        columns: vec![
            "source",
            "kind",
            "n",
            "vertices",
            "symmetric",
            "gamma",
            "decision_1",
            "decision_2",
            "decision_3",
            "value",
        ],
        drafts,
        summary,
    })
}

fn polytope_trial(cfg: &ExperimentConfig, t: usize, max_n: usize, solver: &SolverConfig) -> Result<Draft> {
    let mut rng = task_rng(cfg.seed, t as u64);
    let n = rng.random_range(1..=max_n);
    let k = rng.random_range(1..=6usize);
    let mut poly = random_polytope(&mut rng, n, k)?;
    let symmetric = rng.random_bool(0.5);
    if symmetric {
        poly = poly.symmetrized();
    }
    let g = ratio(rng.random_range(1..=4i64), 8);
    let gamma = Gamma::rational(g.clone());
    let class = ConceptClass::FunctionPolytope(poly.clone());
    let points: Vec<usize> = (0..n).collect();

    let verdict = is_shattered(&class, &points, &gamma, solver)?;
    let d1 = verdict.status == ShatterStatus::Shattered;
    let mut d2 = true;
    let mut lp_min: Option<Rational> = None;
    let mut consistent = true;
    for t in 0..1usize << n {
        let s = pattern(t, n);
        let y: Vec<f64> = s.iter().map(|&x| f64::from(x) * gamma.value()).collect();
        d2 &= check_cube_condition(&class, &points, gamma.value(), &y, solver)?.is_yes();
        let m = polytope_pattern_min(poly.vertices(), &points, &s, solver)?;
        // sampled weights on this orthant never beat the LP minimum
        for _ in 0..4 {
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0) + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            let h = poly
                .vertices()
                .iter()
                .map(|v| {
                    raw.iter().zip(&s).zip(&points).map(|((r, &si), &x)| r / total * f64::from(si) * v[x]).sum::<f64>()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            consistent &= h >= m.to_f64() - 1e-12;
        }
        lp_min = Some(match lp_min {
            Some(cur) => cur.min_of(m),
            None => m,
        });
    }
    let lp_min = lp_min.expect("at least one labeling");
    let d3 = lp_min.cmp_exact(&g) != std::cmp::Ordering::Less;
    let outcome = if d1 == d2 && d2 == d3 && consistent { RowOutcome::Pass } else { RowOutcome::Fail };
    let yn = |b: bool| if b { "shattered" } else { "not_shattered" }.to_string();
    Ok(Draft::new(
        outcome,
        vec![
            format!("random#{t}"),
            "polytope".into(),
            n.to_string(),
            poly.vertices().len().to_string(),
            symmetric.to_string(),
            g.to_string(),
            yn(d1),
            yn(d2),
            yn(d3),
            lp_min.to_string(),
        ],
    )
    .with_evidence(&class, gamma.value(), cfg.tol, vec![Evidence::Shatter { verdict, sign_invariant: false }]))
}

/// `max over unit w at angles k * 1e-3 of min_i y_i <w, x_i>`.
pub fn l2_grid_margin(points: &[Vec<f64>], labels: &[i8]) -> f64 {
    let steps = (std::f64::consts::TAU / 1e-3).ceil() as usize;
    (0..steps)
        .map(|k| {
            let (s, c) = (k as f64 * 1e-3).sin_cos();
            points.iter().zip(labels).map(|(x, &y)| f64::from(y) * (c * x[0] + s * x[1])).fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn grid_trial(cfg: &ExperimentConfig, t: usize, solver: &SolverConfig) -> Result<Draft> {
    let mut rng = task_rng(cfg.seed, t as u64);
    let n = rng.random_range(1..=4usize);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| loop {
            let v = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            if v[0] * v[0] + v[1] * v[1] <= 1.0 {
                break v;
            }
        })
        .collect();
    let labels: Vec<i8> = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    let grid = l2_grid_margin(&points, &labels);
    // the grid is within 1e-3 of the optimum, so a 0.011 gap keeps m* at least 1e-2 away
    let g = loop {
        let g: f64 = rng.random_range(0.05..1.0);
        if (grid - g).abs() > 0.011 {
            break g;
        }
    };
    let class = ConceptClass::DualBall(DualBall::new(points, NormSpec::L2)?);
    let v = realize(&class, &LabeledSample::new((0..n).collect(), labels.clone())?, &Gamma::new(g)?, solver)?;
    let grid_yes = grid >= g;
    let outcome = match v.status {
        RealizeStatus::Marginal => RowOutcome::Marginal,
        s if (s == RealizeStatus::Realized) == grid_yes => RowOutcome::Pass,
        _ => RowOutcome::Fail,
    };
    let status = match v.status {
        RealizeStatus::Realized => "realized",
        RealizeStatus::NotRealized => "not_realized",
        RealizeStatus::Marginal => "marginal",
    };
    let sample = LabeledSample::new((0..n).collect(), labels)?;
    Ok(Draft::new(
        outcome,
        vec![
            format!("random#{t}"),
            "l2_grid".into(),
            n.to_string(),
            String::new(),
            String::new(),
            f(g),
            status.into(),
            if grid_yes { "realized" } else { "not_realized" }.into(),
            String::new(),
            f(grid),
        ],
    )
    .with_evidence(&class, g, cfg.tol, vec![Evidence::Realize { sample, verdict: v }]))
}

/// φ-class dimensions on the grid with their certificates, and the rate
/// fit; the summary also reports the slope of `log dim` against `1/gamma`.
pub(super) fn phi_growth(cfg: &ExperimentConfig) -> Result<Output> {
    let grid = cfg.gamma_grid()?;
    let spec = cfg.phi.unwrap_or(PhiSpec::new(PhiPreset::Exponential, 1000)?);
    let solver = cfg.solver()?;
    let class = ConceptClass::Phi(spec);
    let results = run_tasks(grid.len(), cfg.keep_going, |t| {
        let gamma = &grid[t];
        let (entry, evidence, ok) = phi_dimension(&spec, gamma, &solver)?;
        let predicted = spec.phi(gamma.value()).min(spec.n_max());
        let outcome = if ok && entry.dim == predicted { RowOutcome::Pass } else { RowOutcome::Fail };
        let d = Draft::new(
            outcome,
            vec![
                cfg.gammas[t].clone(),
                spec.phi(gamma.value()).to_string(),
                entry.dim.to_string(),
                dim_status_str(entry.status).into(),
            ],
        )
        .with_evidence(&class, gamma.value(), cfg.tol, evidence);
        Ok((entry, d))
    });
    let mut drafts = vec![];
    let mut entries = vec![];
    for r in results {
        match r {
            Ok((e, d)) => {
                entries.push(e);
                drafts.push(d);
            }
            Err(e) => drafts.push(Draft::error(e)),
        }
    }
    let mut summary = BTreeMap::new();
    summary.insert("class".into(), spec_name(&spec));
    match fit_rate(&DimensionReport::new(entries.clone())) {
        Ok(fit) => {
            summary.insert("exponent".into(), f(fit.exponent));
            summary.insert("residual".into(), f(fit.residual));
            summary.insert("super_polynomial".into(), fit.super_polynomial.to_string());
        }
        Err(e) => {
            summary.insert("exponent".into(), format!("unavailable: {e}"));
        }
    }
    let pts: Vec<(f64, f64)> =
        entries.iter().filter(|e| e.dim > 0).map(|e| (1.0 / e.gamma, (e.dim as f64).ln())).collect();
    if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 {
            let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
            let resid = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).abs()).fold(0.0, f64::max);
            summary.insert("log_dim_vs_inv_gamma_slope".into(), f(slope));
            summary.insert("log_dim_vs_inv_gamma_residual".into(), f(resid));
        }
    }
    Ok(Output { columns: vec!["gamma", "phi", "dim", "dim_status"], drafts, summary })
}
