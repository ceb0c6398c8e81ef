use std::error::Error as StdError;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use marginlab::certify::{
    fit_rate, is_shattered, is_shattered_sign_invariant, max_shattered_subset, packing_number, realize, sign_invariant,
    DimEntry, DimStatus, DimensionReport, Gamma, RealizeStatus, SearchOptions, ShatterStatus, MAX_SEARCH_GROUND,
};
use marginlab::classes::{
    ClassDescriptor, ConceptClass, DistanceClass, DistanceVariant, DualBall, LabeledSample, PhiPreset, PhiSpec,
};
use marginlab::constructions::{
    gamma_counterexample_space, hadamard_shattered_set, intro_counterexample_space, phi_class_truncation,
    standard_basis_set, ConstructionBundle, ConstructionObject,
};
use marginlab::harness::{parse_gamma, run_experiment, ExperimentConfig, ExperimentId};
use marginlab::number::Rational;
use marginlab::solver::{Arithmetic, SolverConfig};
use marginlab::spaces::{validate_metric, FiniteMetricSpace, MetricCheck, MetricSpaceDoc, NormSpec, PointSetDoc};

type CliResult<T> = std::result::Result<T, Box<dyn StdError>>;

#[derive(Parser)]
#[command(name = "marginlab", version, about = "Margin shattering, gamma-dimension and certificates")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Use exact rational arithmetic.
    #[arg(long, global = true)]
    exact: bool,
    /// Worker threads.
    #[arg(long, global = true, env = "MARGINLAB_JOBS")]
    jobs: Option<usize>,
    /// Output file (or directory for run-experiment).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassInput {
    /// Construction bundle, class descriptor, point set or metric space (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Class over a bare point set or metric space.
    #[arg(long, value_enum)]
    class: Option<ClassArg>,
    /// Norm exponent for point sets (a number >= 1 or "inf").
    #[arg(long, value_parser = parse_p)]
    p: Option<NormSpec>,
    /// Ground indices, comma separated (defaults to the predicted shattered
    /// set of a bundle, else every point).
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<usize>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    DualBall,
    DistanceCombination,
    DistanceCombinationPos,
    DistanceCombinationNeg,
    Lipschitz,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a point set is gamma-shattered.
    CertifyShatter {
        #[command(flatten)]
        input: ClassInput,
        #[arg(long)]
        gamma: String,
    },
    /// Decide whether one labeling is gamma-realizable.
    Realize {
        #[command(flatten)]
        input: ClassInput,
        #[arg(long)]
        gamma: String,
        /// Labels in {-1, +1}, comma separated, one per point.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        labels: Vec<i8>,
    },
    /// Emit a construction bundle.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Check the metric axioms of a distance matrix.
    ValidateMetric {
        /// Metric space or construction bundle (JSON).
        #[arg(long)]
        input: PathBuf,
    },
    /// Largest subset with pairwise distances at least `s`.
    Packing {
        #[arg(long)]
        input: PathBuf,
        /// Separation; defaults to twice `--gamma`.
        #[arg(long, required_unless_present = "gamma")]
        s: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Exact gamma-dimension of a class over a grid of margins.
    DimProfile {
        #[command(flatten)]
        input: ClassInput,
        /// Margins, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        gamma: Vec<String>,
        #[arg(long, default_value_t = SearchOptions::default().max_tests)]
        max_tests: usize,
    },
    /// Run an experiment driver and write its result table.
    RunExperiment {
        /// Experiment name; optional when --config is given.
        name: Option<String>,
        /// JSON configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Margins, comma separated.
        #[arg(long, value_delimiter = ',')]
        gamma: Option<Vec<String>>,
        /// Norm exponents, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_p)]
        p: Option<Vec<NormSpec>>,
        #[arg(long)]
        trials: Option<usize>,
        /// Record failing tasks and continue instead of stopping.
        #[arg(long)]
        keep_going: bool,
    },
}

#[derive(Subcommand)]
enum ConstructKind {
    /// Rows of a Sylvester-Hadamard matrix of order 2^m, scaled into the unit ball.
    Hadamard {
        #[arg(long)]
        m: u32,
        #[arg(long, value_parser = parse_p)]
        p: NormSpec,
    },
    /// The first n standard basis vectors.
    Basis {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_p)]
        p: NormSpec,
    },
    /// Finite space with a shattered k-set for the ball-pair class.
    Intro {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: f64,
        #[arg(long = "R")]
        big_r: f64,
        /// Add the point for the empty labeling.
        #[arg(long)]
        include_empty: bool,
    },
    /// Finite space on 2^k + k points with distances 2/3 +- gamma.
    GammaSpace {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        gamma: f64,
    },
    /// The phi-class truncated to 1..=n.
    Phi {
        #[arg(long, value_enum, default_value = "exponential")]
        preset: PresetArg,
        /// Exponent for the inverse-power preset.
        #[arg(long, default_value_t = 2)]
        power: u32,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Exponential,
    InversePower,
}

fn parse_p(s: &str) -> std::result::Result<NormSpec, String> {
    let p: f64 = s.parse().map_err(|_| format!("'{s}' is not a number or 'inf'"))?;
    NormSpec::new(p).map_err(|e| e.to_string())
}

fn solver(common: &Common) -> CliResult<SolverConfig> {
    let d = SolverConfig::default();
    let arith = if common.exact { Arithmetic::Rational } else { Arithmetic::Float };
    Ok(SolverConfig::new(common.tol.unwrap_or(d.tol), d.max_iter, arith)?)
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn emit(common: &Common, v: &Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    if let Some(out) = &common.output {
        fs::write(out, &text).map_err(|e| format!("{}: {e}", out.display()))?;
    }
    print!("{text}");
    Ok(())
}

/// Class plus its default ground points.
fn load_class(input: &ClassInput) -> CliResult<(ConceptClass, Vec<usize>)> {
    let v = read_json(&input.input)?;
    let obj = v.as_object().ok_or("input must be a JSON object")?.clone();
    let (class, default_points) = if obj.contains_key("object") {
        let b: ConstructionBundle = serde_json::from_value(v)?;
        (b.class()?, b.shattered_set())
    } else if obj.contains_key("kind") {
        let d: ClassDescriptor = serde_json::from_value(v)?;
        let class = d.build()?;
        let n = class.ground_size();
        (class, (0..n).collect())
    } else if obj.contains_key("points") {
        if !matches!(input.class, None | Some(ClassArg::DualBall)) {
            return Err("a point set only supports --class dual-ball".into());
        }
        let doc: PointSetDoc = serde_json::from_value(v)?;
        let pts: Vec<Vec<f64>> = doc.into_points()?.into_iter().map(|p| p.into_coords()).collect();
        let n = pts.len();
        (ConceptClass::DualBall(DualBall::new(pts, input.p.unwrap_or(NormSpec::L2))?), (0..n).collect())
    } else if obj.contains_key("dist") {
        let doc: MetricSpaceDoc = serde_json::from_value(v)?;
        let space: FiniteMetricSpace = doc.try_into()?;
        let n = space.len();
        let variant = |v| -> CliResult<ConceptClass> {
            Ok(ConceptClass::DistanceCombination(DistanceClass::all_centers(space.clone(), v)?))
        };
        let class = match input.class {
            Some(ClassArg::Lipschitz) => ConceptClass::Lipschitz(space.clone()),
            Some(ClassArg::DistanceCombination) => variant(DistanceVariant::Full)?,
            Some(ClassArg::DistanceCombinationPos) => variant(DistanceVariant::Pos)?,
            Some(ClassArg::DistanceCombinationNeg) => variant(DistanceVariant::Neg)?,
            Some(ClassArg::DualBall) => return Err("a metric space needs a metric class".into()),
            None => return Err("a metric space needs --class (or a class descriptor input)".into()),
        };
        (class, (0..n).collect())
    } else {
        return Err("unrecognized input: expected a bundle, class descriptor, point set or metric space".into());
    };
    if input.class.is_some() && !obj_is_bare(&obj) {
        return Err("--class applies only to bare point sets and metric spaces".into());
    }
    Ok((class, input.points.clone().unwrap_or(default_points)))
}

fn obj_is_bare(obj: &serde_json::Map<String, Value>) -> bool {
    !obj.contains_key("object") && !obj.contains_key("kind")
}

fn gamma_arg(s: &str) -> CliResult<Gamma> {
    Ok(parse_gamma(s)?)
}

/// Exact configuration to retry with after a marginal float verdict, if any.
fn escalation(cfg: &SolverConfig) -> Option<SolverConfig> {
    (!cfg.is_exact()).then_some(SolverConfig { arithmetic: Arithmetic::Rational, ..*cfg })
}

fn certify_shatter(common: &Common, input: &ClassInput, gamma: &str) -> CliResult<i32> {
    let (class, points) = load_class(input)?;
    let gamma = gamma_arg(gamma)?;
    let inv = sign_invariant(&class, &points);
    let decide = |cfg: &SolverConfig| {
        if inv {
            is_shattered_sign_invariant(&class, &points, &gamma, cfg)
        } else {
            is_shattered(&class, &points, &gamma, cfg)
        }
    };
    let cfg = solver(common)?;
    let mut verdict = decide(&cfg)?;
    let mut escalated = false;
    if verdict.status == ShatterStatus::Marginal {
        if let Some(ex) = escalation(&cfg) {
            verdict = decide(&ex)?;
            escalated = true;
        }
    }
    let mut v = serde_json::to_value(&verdict)?;
    v["sign_invariant"] = json!(inv);
    v["escalated"] = json!(escalated);
    emit(common, &v)?;
    Ok(if verdict.status == ShatterStatus::Marginal { 2 } else { 0 })
}

fn realize_cmd(common: &Common, input: &ClassInput, gamma: &str, labels: &[i8]) -> CliResult<i32> {
    let (class, points) = load_class(input)?;
    let sample = LabeledSample::new(points, labels.to_vec())?;
    let gamma = gamma_arg(gamma)?;
    let cfg = solver(common)?;
    let mut verdict = realize(&class, &sample, &gamma, &cfg)?;
    let mut escalated = false;
    if verdict.status == RealizeStatus::Marginal {
        if let Some(ex) = escalation(&cfg) {
            verdict = realize(&class, &sample, &gamma, &ex)?;
            escalated = true;
        }
    }
    let mut v = serde_json::to_value(&verdict)?;
    v["escalated"] = json!(escalated);
    emit(common, &v)?;
    Ok(if verdict.status == RealizeStatus::Marginal { 2 } else { 0 })
}

fn construct(common: &Common, kind: &ConstructKind) -> CliResult<i32> {
    let bundle = match *kind {
        ConstructKind::Hadamard { m, p } => hadamard_shattered_set(m, p)?,
        ConstructKind::Basis { n, p } => standard_basis_set(n, p)?,
        ConstructKind::Intro { k, r, big_r, include_empty } => intro_counterexample_space(k, r, big_r, include_empty)?,
        ConstructKind::GammaSpace { k, gamma } => gamma_counterexample_space(k, gamma)?,
        ConstructKind::Phi { preset, power, n } => {
            let preset = match preset {
                PresetArg::Exponential => PhiPreset::Exponential,
                PresetArg::InversePower => PhiPreset::InversePower { k: power },
            };
            phi_class_truncation(PhiSpec::new(preset, n)?)?
        }
    };
    emit(common, &serde_json::to_value(&bundle)?)?;
    Ok(0)
}

fn metric_matrix(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let v = read_json(path)?;
    if v.get("object").is_some() {
        let b: ConstructionBundle = serde_json::from_value(v)?;
        match b.object {
            ConstructionObject::MetricSpace { dist, .. } => Ok(dist),
            _ => Err("bundle does not hold a metric space".into()),
        }
    } else {
        let doc: MetricSpaceDoc = serde_json::from_value(v)?;
        Ok(doc.dist)
    }
}

fn validate_cmd(common: &Common, input: &Path) -> CliResult<i32> {
    let dist = metric_matrix(input)?;
    let check = if common.exact {
        let exact: Vec<Vec<Rational>> = dist
            .iter()
            .map(|r| r.iter().map(|&x| <Rational as marginlab::number::Number>::from_f64(x)).collect())
            .collect();
        validate_metric(&exact)?
    } else {
        validate_metric(&dist)?
    };
    let v = match check {
        MetricCheck::Ok => json!({"status": "metric_valid"}),
        MetricCheck::Violation(w) => json!({"status": "metric_invalid", "violation": w}),
    };
    emit(common, &v)?;
    Ok(0)
}

fn packing_cmd(common: &Common, input: &Path, s: Option<f64>, gamma: Option<f64>) -> CliResult<i32> {
    let dist = metric_matrix(input)?;
    let space = FiniteMetricSpace::from_matrix(dist)?;
    let s = s.or(gamma.map(|g| 2.0 * g)).ok_or("--s or --gamma is required")?;
    let (size, subset) = packing_number(&space, s)?;
    emit(common, &json!({"s": s, "size": size, "subset": subset}))?;
    Ok(0)
}

fn dim_profile(common: &Common, input: &ClassInput, gammas: &[String], max_tests: usize) -> CliResult<i32> {
    let (class, mut ground) = load_class(input)?;
    if input.points.is_none() {
        ground = (0..class.ground_size().min(MAX_SEARCH_GROUND)).collect();
    }
    let cfg = solver(common)?;
    let mut entries = vec![];
    let mut searches = vec![];
    let mut marginal = false;
    for g in gammas {
        let gamma = gamma_arg(g)?;
        let mut s = max_shattered_subset(&class, &ground, &gamma, &cfg, SearchOptions { max_tests })?;
        if s.marginal {
            if let Some(ex) = escalation(&cfg) {
                s = max_shattered_subset(&class, &ground, &gamma, &ex, SearchOptions { max_tests })?;
            }
        }
        marginal |= s.marginal;
        let status = if s.lower_bound_only { DimStatus::Lower } else { DimStatus::Exact };
        entries.push(DimEntry { gamma: gamma.value(), dim: s.size as u64, status });
        searches.push(json!({"gamma": g, "size": s.size, "subset": s.subset, "lower_bound_only": s.lower_bound_only, "tests": s.tests}));
    }
    let mut report = DimensionReport::new(entries);
    if report.entries.len() >= 3 {
        report.fit = fit_rate(&report).ok();
    }
    emit(common, &json!({"ground": ground.len(), "report": report, "searches": searches}))?;
    Ok(if marginal { 2 } else { 0 })
}

#[allow(clippy::too_many_arguments)]
fn run_experiment_cmd(
    common: &Common,
    name: Option<&str>,
    config: Option<&Path>,
    seed: Option<u64>,
    gamma: Option<&[String]>,
    p: Option<&[NormSpec]>,
    trials: Option<usize>,
    keep_going: bool,
) -> CliResult<i32> {
    let mut cfg = match (config, name) {
        (Some(path), name) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let c = ExperimentConfig::from_json(&text)?;
            if let Some(n) = name {
                if n.parse::<ExperimentId>()? != c.experiment {
                    return Err(format!("config is for '{}', not '{n}'", c.experiment).into());
                }
            }
            c
        }
        (None, Some(n)) => ExperimentConfig::new(n.parse()?),
        (None, None) => return Err("run-experiment needs an experiment name or --config".into()),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(g) = gamma {
        cfg.gammas = g.to_vec();
    }
    if let Some(p) = p {
        cfg.p = p.to_vec();
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(t) = common.tol {
        cfg.tol = t;
    }
    if common.exact {
        cfg.arithmetic = Arithmetic::Rational;
    }
    cfg.keep_going |= keep_going;
    if let Some(o) = &common.output {
        cfg.output = Some(o.clone());
    }
    let table = run_experiment(&cfg)?;
    if let Some(dir) = &cfg.output {
        table.write(dir)?;
    }
    print!("{}", table.to_csv()?);
    eprintln!("{}", serde_json::to_string(&table.summary)?);
    Ok(table.worst().exit_code())
}

fn run(cli: Cli) -> CliResult<i32> {
    if let Some(j) = cli.common.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    let c = &cli.common;
    match &cli.command {
        Command::CertifyShatter { input, gamma } => certify_shatter(c, input, gamma),
        Command::Realize { input, gamma, labels } => realize_cmd(c, input, gamma, labels),
        Command::Construct { kind } => construct(c, kind),
        Command::ValidateMetric { input } => validate_cmd(c, input),
        Command::Packing { input, s, gamma } => packing_cmd(c, input, *s, *gamma),
        Command::DimProfile { input, gamma, max_tests } => dim_profile(c, input, gamma, *max_tests),
        Command::RunExperiment { name, config, seed, gamma, p, trials, keep_going } => run_experiment_cmd(
            c,
            name.as_deref(),
            config.as_deref(),
            *seed,
            gamma.as_deref(),
            p.as_deref(),
            *trials,
            *keep_going,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
