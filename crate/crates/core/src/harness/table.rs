use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::certify::{sign_invariant, DimensionSearch, RealizeStatus, RealizeVerdict, ShatterVerdict};
use crate::classes::{ClassDescriptor, LabeledSample};
use crate::error::{Error, Result};
use crate::spaces::FiniteMetricSpace;

/// Per-row result. Ordered from best to worst.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowOutcome {
    /// Decided, and the expectation of the experiment holds.
    Pass,
    /// Decided, and the expectation fails.
    Fail,
    /// Some comparison fell in the undecided band.
    Marginal,
    Error,
}

impl RowOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            RowOutcome::Pass => "pass",
            RowOutcome::Fail => "fail",
            RowOutcome::Marginal => "marginal",
            RowOutcome::Error => "error",
        }
    }

    /// 0 for decided rows, 2 for marginal, 1 for errors.
    pub fn exit_code(self) -> i32 {
        match self {
            RowOutcome::Pass | RowOutcome::Fail => 0,
            RowOutcome::Marginal => 2,
            RowOutcome::Error => 1,
        }
    }
}

/// One piece of evidence inside a certificate file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    /// A shattering verdict; `sign_invariant` marks verdicts that decided a
    /// single labeling through [`crate::certify::is_shattered_sign_invariant`].
    Shatter {
        verdict: ShatterVerdict,
        #[serde(default)]
        sign_invariant: bool,
    },
    Realize {
        sample: LabeledSample,
        verdict: RealizeVerdict,
    },
    Search {
        search: DimensionSearch,
    },
    /// A set with pairwise distances at least `s`.
    Packing {
        s: f64,
        subset: Vec<usize>,
    },
}

/// Re-checkable evidence for one table row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub id: String,
    pub class: ClassDescriptor,
    pub gamma: f64,
    pub tol: f64,
    pub evidence: Vec<Evidence>,
}

impl Certificate {
    /// Rebuilds the class and re-evaluates every witness and collapse.
    pub fn verify(&self) -> Result<bool> {
        let class = self.class.build()?;
        for e in &self.evidence {
            let ok = match e {
                Evidence::Shatter { verdict, sign_invariant: inv } => {
                    (!inv || sign_invariant(&class, &verdict.points)) && verdict.recheck(&class, self.tol)?
                }
                Evidence::Realize { sample, verdict } => match verdict.status {
                    RealizeStatus::Realized => match &verdict.witness {
                        Some(w) => class.margin(w, sample)? >= self.gamma - self.tol,
                        None => false,
                    },
                    RealizeStatus::NotRealized => match &verdict.collapse {
                        Some(c) => class.support(sample, &c.mu)?.value <= self.gamma + self.tol,
                        None => true,
                    },
                    RealizeStatus::Marginal => true,
                },
                Evidence::Search { search } => {
                    let mut ok = search.subset.len() == search.size;
                    if let Some(v) = &search.verdict {
                        ok &= v.recheck(&class, self.tol)?;
                    }
                    for r in &search.rejected {
                        ok &= r.recheck(&class, self.tol)?;
                    }
                    ok
                }
                Evidence::Packing { s, subset } => {
                    let space: FiniteMetricSpace = match &class {
                        crate::classes::ConceptClass::Lipschitz(m) => m.clone(),
                        crate::classes::ConceptClass::BallPair { space, .. } => space.clone(),
                        crate::classes::ConceptClass::DistanceCombination(c) => c.space.clone(),
                        _ => return Err(Error::input("packing evidence needs a metric class")),
                    };
                    subset.iter().all(|&i| i < space.len())
                        && subset
                            .iter()
                            .enumerate()
                            .all(|(a, &i)| subset[a + 1..].iter().all(|&j| space.dist(i, j) >= *s))
                }
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub id: String,
    pub outcome: RowOutcome,
    pub values: Vec<String>,
    /// Id of the certificate file backing this row.
    pub certificate: Option<String>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub experiment: String,
    pub config_hash: String,
    pub version: String,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    /// Aggregate results such as fitted exponents.
    pub summary: BTreeMap<String, String>,
    pub meta: TableMeta,
    #[serde(skip)]
    pub certificates: Vec<Certificate>,
}

impl ResultTable {
    pub fn worst(&self) -> RowOutcome {
        self.rows.iter().map(|r| r.outcome).max().unwrap_or(RowOutcome::Pass)
    }

    pub fn count(&self, outcome: RowOutcome) -> usize {
        self.rows.iter().filter(|r| r.outcome == outcome).count()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Value of column `name` in `row`.
    pub fn get<'a>(&self, row: &'a Row, name: &str) -> Option<&'a str> {
        self.column(name).and_then(|i| row.values.get(i)).map(String::as_str)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        let mut header = vec!["id", "outcome"];
        header.extend(self.columns.iter().map(String::as_str));
        header.extend(["certificate", "note"]);
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![r.id.as_str(), r.outcome.as_str()];
            rec.extend(r.values.iter().map(String::as_str));
            rec.push(r.certificate.as_deref().unwrap_or(""));
            rec.push(&r.note);
            w.write_record(&rec).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::input(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes `table.csv`, `summary.json`, `meta.json` and
    /// `certificates/<id>.json` under `dir`. Everything except `meta.json`
    /// is a deterministic function of the configuration.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("certificates"))?;
        fs::write(dir.join("table.csv"), self.to_csv()?)?;
        fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&self.summary)? + "\n")?;
        fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&self.meta)? + "\n")?;
        for c in &self.certificates {
            fs::write(
                dir.join("certificates").join(format!("{}.json", c.id)),
                serde_json::to_string_pretty(c)? + "\n",
            )?;
        }
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::input(format!("csv: {e}"))
}

/// Loads a certificate file written by [`ResultTable::write`].
pub fn read_certificate(path: &Path) -> Result<Certificate> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
