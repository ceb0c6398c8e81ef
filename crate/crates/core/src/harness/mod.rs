//! Experiment drivers, configuration and result emission.
//!
//! An experiment fans its tasks out over the current rayon pool; each task
//! is pure and seeds its own SplitMix64 stream from the config seed and its
//! index, and rows are assembled in task order. Output is therefore
//! identical for any number of worker threads.

mod config;
mod experiments;
mod random;
mod table;

use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;

pub use config::{parse_gamma, ExperimentConfig, ExperimentId};
pub use experiments::{l2_grid_margin, phi_dimension, polytope_pattern_min, FLOAT_SLACK, PROFILE_MAX_HADAMARD};
pub use random::{random_metric_space, random_polytope, random_unit_vectors, task_rng};
pub use table::{read_certificate, Certificate, Evidence, ResultTable, Row, RowOutcome, TableMeta};

use crate::classes::ConceptClass;
use crate::error::{Error, Result};

/// A row before ids are assigned.
pub(crate) struct Draft {
    outcome: RowOutcome,
    values: Vec<String>,
    certificate: Option<(crate::classes::ClassDescriptor, f64, f64, Vec<Evidence>)>,
    note: String,
}

impl Draft {
    fn new(outcome: RowOutcome, values: Vec<String>) -> Self {
        Draft { outcome, values, certificate: None, note: String::new() }
    }

    fn error(e: Error) -> Self {
        Draft { note: e.to_string(), ..Draft::new(RowOutcome::Error, vec![]) }
    }

    fn with_evidence(mut self, class: &ConceptClass, gamma: f64, tol: f64, evidence: Vec<Evidence>) -> Self {
        self.certificate = Some((class.descriptor(), gamma, tol, evidence));
        self
    }
}

pub(crate) struct Output {
    columns: Vec<&'static str>,
    drafts: Vec<Draft>,
    summary: BTreeMap<String, String>,
}

/// Runs `count` tasks on the current pool and returns their results in
/// task order. Without `keep_going`, tasks after the first failing one are
/// skipped and dropped, whichever order they completed in.
pub(crate) fn run_tasks<T: Send>(
    count: usize,
    keep_going: bool,
    task: impl Fn(usize) -> Result<T> + Sync,
) -> Vec<Result<T>> {
    let first_err = AtomicUsize::new(usize::MAX);
    let out: Vec<Option<Result<T>>> = (0..count)
        .into_par_iter()
        .map(|t| {
            if !keep_going && t > first_err.load(Ordering::Relaxed) {
                return None;
            }
            let r = task(t);
            if r.is_err() {
                first_err.fetch_min(t, Ordering::Relaxed);
            }
            Some(r)
        })
        .collect();
    let stop = if keep_going { usize::MAX } else { first_err.into_inner() };
    out.into_iter().take(stop.saturating_add(1)).map(|r| r.expect("tasks up to the first error ran")).collect()
}

fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    cfg.canonical_json().hash(&mut h);
    format!("{:016x}", h.finish())
}

/// Runs the configured experiment. Task failures become `error` rows; the
/// table is returned either way and [`ResultTable::worst`] gives the exit
/// status.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let start = Instant::now();
    cfg.validate()?;
    let out = match cfg.experiment {
        ExperimentId::LpProfile => experiments::lp_profile(cfg)?,
        ExperimentId::SubmultiAudit => experiments::submulti_audit(cfg)?,
        ExperimentId::MetricDichotomy => experiments::metric_dichotomy(cfg)?,
        ExperimentId::LipPacking => experiments::lip_packing(cfg)?,
        ExperimentId::EquivalenceFuzz => experiments::equivalence_fuzz(cfg)?,
        ExperimentId::PhiGrowth => experiments::phi_growth(cfg)?,
    };
    let width = out.columns.len();
    let mut rows = Vec::with_capacity(out.drafts.len());
    let mut certificates = vec![];
    for (i, mut d) in out.drafts.into_iter().enumerate() {
        let id = format!("{}-{:04}", cfg.experiment, i);
        d.values.resize(width, String::new());
        let certificate = d.certificate.map(|(class, gamma, tol, evidence)| {
            certificates.push(Certificate { id: id.clone(), class, gamma, tol, evidence });
            id.clone()
        });
        rows.push(Row { id, outcome: d.outcome, values: d.values, certificate, note: d.note });
    }
    Ok(ResultTable {
        columns: out.columns.into_iter().map(String::from).collect(),
        rows,
        summary: out.summary,
        meta: TableMeta {
            experiment: cfg.experiment.to_string(),
            config_hash: config_hash(cfg),
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_tasks_stops_after_first_error() {
        let r = run_tasks(50, false, |t| if t == 7 || t == 30 { Err(Error::input("boom")) } else { Ok(t) });
        assert_eq!(r.len(), 8);
        assert!(r[7].is_err());
        let r = run_tasks(50, true, |t| if t == 7 || t == 30 { Err(Error::input("boom")) } else { Ok(t) });
        assert_eq!(r.len(), 50);
        assert_eq!(r.iter().filter(|x| x.is_err()).count(), 2);
    }

    fn small(id: ExperimentId) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(id);
        c.seed = 11;
        match id {
            ExperimentId::LpProfile => {
                c.p = vec![crate::spaces::NormSpec::new(1.5).unwrap(), crate::spaces::NormSpec::L2];
            }
            ExperimentId::MetricDichotomy => c.trials = 4,
            ExperimentId::LipPacking => c.trials = 4,
            ExperimentId::EquivalenceFuzz => {
                c.trials = 6;
                c.sizes = vec![4, 4];
            }
            _ => {}
        }
        c
    }

    #[test]
    fn every_experiment_runs_and_certificates_verify() {
        for id in ExperimentId::ALL {
            let t = run_experiment(&small(id)).unwrap();
            assert!(!t.rows.is_empty(), "{id}");
            assert!(t.rows.iter().all(|r| r.outcome == RowOutcome::Pass), "{id}: {:?}", t.rows);
            for c in &t.certificates {
                assert!(c.verify().unwrap(), "{id}: {}", c.id);
                let back: Certificate = serde_json::from_str(&serde_json::to_string(c).unwrap()).unwrap();
                assert!(back.verify().unwrap(), "{id}: {} after reload", c.id);
            }
        }
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let cfg = small(ExperimentId::LipPacking);
        let one =
            rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run_experiment(&cfg)).unwrap();
        let four =
            rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| run_experiment(&cfg)).unwrap();
        assert_eq!(one.to_csv().unwrap(), four.to_csv().unwrap());
        assert_eq!(one.summary, four.summary);
        assert_eq!(one.meta.config_hash, four.meta.config_hash);
    }
}
