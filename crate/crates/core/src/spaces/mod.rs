//! Normed-space and finite metric-space primitives.

mod io;
mod metric;
mod norm;

pub use io::{read_metric_space, read_point_set, write_metric_space, write_point_set, MetricSpaceDoc, PointSetDoc};
pub use metric::{diameter, rescale_to_unit_diameter, validate_metric, FiniteMetricSpace, MetricCheck, Violation};
pub use norm::{dual_norm, duality_map, inner, norm, NormSpec, VectorPoint};
