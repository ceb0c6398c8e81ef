use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metric::FiniteMetricSpace;
use super::norm::VectorPoint;
use crate::error::{Error, Result};

/// `{"ids": [...], "dist": [[...]]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricSpaceDoc {
    #[serde(deserialize_with = "ids_as_strings")]
    pub ids: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

/// `{"points": [[...]]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointSetDoc {
    pub points: Vec<Vec<f64>>,
}

fn ids_as_strings<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<String>, D::Error> {
    let raw = Vec::<serde_json::Value>::deserialize(d)?;
    Ok(raw
        .into_iter()
        .map(|v| match v {
            serde_json::Value::String(s) => s,
            other => other.to_string(),
        })
        .collect())
}

impl From<&FiniteMetricSpace<f64>> for MetricSpaceDoc {
    fn from(m: &FiniteMetricSpace<f64>) -> Self {
        MetricSpaceDoc { ids: m.ids().to_vec(), dist: m.matrix().to_vec() }
    }
}

impl TryFrom<MetricSpaceDoc> for FiniteMetricSpace<f64> {
    type Error = Error;

    fn try_from(doc: MetricSpaceDoc) -> Result<Self> {
        FiniteMetricSpace::new(doc.ids, doc.dist)
    }
}

impl PointSetDoc {
    pub fn into_points(self) -> Result<Vec<VectorPoint>> {
        let pts = self.points.into_iter().map(VectorPoint::new).collect::<Result<Vec<_>>>()?;
        if let Some(first) = pts.first() {
            if let Some(i) = pts.iter().position(|v| v.dim() != first.dim()) {
                return Err(Error::input(format!(
                    "point {i} has dimension {} (expected {})",
                    pts[i].dim(),
                    first.dim()
                )));
            }
        }
        Ok(pts)
    }
}

pub fn read_metric_space(path: &Path) -> Result<FiniteMetricSpace<f64>> {
    let text = std::fs::read_to_string(path)?;
    let doc: MetricSpaceDoc = serde_json::from_str(&text)?;
    doc.try_into()
}

pub fn write_metric_space(path: &Path, m: &FiniteMetricSpace<f64>) -> Result<()> {
    let text = serde_json::to_string_pretty(&MetricSpaceDoc::from(m))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_point_set(path: &Path) -> Result<Vec<VectorPoint>> {
    let text = std::fs::read_to_string(path)?;
    let doc: PointSetDoc = serde_json::from_str(&text)?;
    doc.into_points()
}

pub fn write_point_set(path: &Path, points: &[VectorPoint]) -> Result<()> {
    let doc = PointSetDoc { points: points.iter().map(|p| p.coords().to_vec()).collect() };
    std::fs::write(path, serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}
