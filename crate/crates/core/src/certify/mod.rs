//! Decision procedures with re-checkable certificates.
//!
//! Float paths compare against `gamma` with the undecided band
//! `3 * cfg.tol`; exact paths (rational LPs, Wolfe's algorithm for `p = 2`)
//! and the closed-form classes compare exactly. Shattering uses the `>=`
//! convention: a margin exactly `gamma` counts.

mod audit;
mod cube;
mod gamma;
mod packing;
mod realize;
mod shatter;

pub use audit::{
    audit_submultiplicativity, fit_rate, sample_complexity_estimate, AuditReport, AuditRow, DimEntry, DimStatus,
    DimensionReport, RateFit, SUPERPOLY_RESIDUAL,
};
pub use cube::{check_cube_condition, CubeVerdict};
pub use gamma::Gamma;
pub use packing::packing_number;
pub use realize::{realize, Collapse, RealizeStatus, RealizeVerdict};
pub use shatter::{
    is_shattered, is_shattered_sign_invariant, max_shattered_subset, sign_invariant, verify_collapse,
    verify_collapse_exact, Counterexample, DimensionSearch, PatternWitness, SearchOptions, ShatterStatus,
    ShatterVerdict, MAX_SEARCH_GROUND, MAX_SHATTER_POINTS,
};
