use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Log-log fits whose worst log-deviation exceeds this are flagged as
/// faster than any polynomial.
pub const SUPERPOLY_RESIDUAL: f64 = 0.5;

const GAMMA_MATCH: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimStatus {
    Exact,
    /// The true dimension is at least `dim`.
    Lower,
    /// The true dimension is at most `dim`.
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimEntry {
    pub gamma: f64,
    pub dim: u64,
    pub status: DimStatus,
}

impl DimEntry {
    fn lower(&self) -> u64 {
        match self.status {
            DimStatus::Exact | DimStatus::Lower => self.dim,
            DimStatus::Upper => 0,
        }
    }

    fn upper(&self) -> Option<u64> {
        match self.status {
            DimStatus::Exact | DimStatus::Upper => Some(self.dim),
            DimStatus::Lower => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Slope of `log dim` against `log(1/gamma)`.
    pub exponent: f64,
    /// Largest absolute log-deviation from the fitted line.
    pub residual: f64,
    pub super_polynomial: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub entries: Vec<DimEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<RateFit>,
}

impl DimensionReport {
    pub fn new(mut entries: Vec<DimEntry>) -> Self {
        entries.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        DimensionReport { entries, fit: None }
    }

    /// Dimensions never increase with `gamma` (checked on exact entries).
    pub fn is_monotone(&self) -> bool {
        let exact: Vec<&DimEntry> = self.entries.iter().filter(|e| e.status == DimStatus::Exact).collect();
        exact.windows(2).all(|w| w[0].dim >= w[1].dim)
    }

    pub fn with_fit(mut self) -> Result<Self> {
        self.fit = Some(fit_rate(&self)?);
        Ok(self)
    }
}

/// Least-squares exponent of `dim ~ (1/gamma)^p` over the report's entries.
pub fn fit_rate(report: &DimensionReport) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = report
        .entries
        .iter()
        .filter(|e| e.dim > 0 && e.status != DimStatus::Upper)
        .map(|e| ((1.0 / e.gamma).ln(), (e.dim as f64).ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::degenerate(format!("rate fit needs 4 grid points with positive dims, got {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 1e-24 {
        return Err(Error::degenerate("rate fit needs at least two distinct gamma values"));
    }
    let exponent = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let residual = pts.iter().map(|p| (p.1 - (my + exponent * (p.0 - mx))).abs()).fold(0.0, f64::max);
    Ok(RateFit { exponent, residual, super_polynomial: residual > SUPERPOLY_RESIDUAL })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRow {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Lower bound on `dim(gamma1 * gamma2) + 1`.
    pub lhs: u64,
    /// Upper bound on `(dim(gamma1) + 1) (dim(gamma2) + 1)`.
    pub rhs: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    /// Triples present in the grid but lacking a usable bound.
    pub skipped: Vec<String>,
}

impl AuditReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Checks `dim(g1 g2) + 1 <= (dim(g1) + 1)(dim(g2) + 1)` for every pair
/// `g1 <= g2` whose product is also on the grid, using lower bounds on the
/// left and upper bounds on the right.
pub fn audit_submultiplicativity(entries: &[DimEntry]) -> AuditReport {
    let find = |g: f64| entries.iter().find(|e| (e.gamma - g).abs() <= GAMMA_MATCH * g.max(1e-300));
    let mut report = AuditReport { rows: vec![], skipped: vec![] };
    for (i, a) in entries.iter().enumerate() {
        for b in &entries[i..] {
            let (a, b) = if a.gamma <= b.gamma { (a, b) } else { (b, a) };
            let Some(prod) = find(a.gamma * b.gamma) else { continue };
            match (a.upper(), b.upper()) {
                (Some(ua), Some(ub)) => {
                    let lhs = prod.lower() + 1;
                    let rhs = (ua + 1) * (ub + 1);
                    report.rows.push(AuditRow { gamma1: a.gamma, gamma2: b.gamma, lhs, rhs, pass: lhs <= rhs });
                }
                _ => report.skipped.push(format!("({}, {}): no upper bound on a factor", a.gamma, b.gamma)),
            }
        }
    }
    report
}

/// `ceil((dim + ln(1/delta)) / eps)`: the order of magnitude of the sample
/// size with all constants set to one.
pub fn sample_complexity_estimate(dim: u64, eps: f64, delta: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::input(format!("eps and delta must lie in (0, 1), got {eps}, {delta}")));
    }
    let m = (dim as f64 + (1.0 / delta).ln()) / eps;
    // shave representation noise so that exact integers do not round up
    Ok((m - 1e-9 * m.max(1.0)).ceil() as u64)
}
