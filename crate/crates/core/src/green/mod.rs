//! Vertical differential operators and their Green operators.
//!
//! Two operators act along the fibers. The Klein–Gordon operator
//! `P = (ρ⁻¹∂_t)² + m²` takes a mass that depends on the base point only.
//! The massless Dirac operator acts on pairs as `D(ψ, ψ̄) = (iρ⁻¹∂_tψ, −iρ⁻¹∂_tψ̄)`.
//! In the proper-time chart both have explicit retarded and advanced kernels,
//! which are integrated with a fixed-node rule so that Green operator outputs
//! can be differentiated numerically.

mod exact;
mod ivp;
mod kernel;
mod operator;
mod roundtrip;

use thiserror::Error;

use crate::geometry::{GeometryError, Point, SupportKind};
use crate::quad::QuadError;



pub use operator::{OperatorKind, OperatorSettings, VerticalOperator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreenError {
    #[error("mass must be positive, got m({x:?}) = {value}")]
    NonPositiveMass { x: Point, value: f64 },
    #[error("operator expects {expected} component(s), field has {found}")]
    ComponentMismatch { expected: usize, found: usize },
    #[error("field lives on a different family than the operator")]
    FamilyMismatch,
    #[error("{operator} needs {expected} support, field is {found:?}")]
    WrongSupport { operator: &'static str, expected: &'static str, found: SupportKind },
    #[error("not a solution: residual {residual:e} at t = {t}, x = {x:?} exceeds {tolerance:e}")]
    NotASolution { residual: f64, t: f64, x: Point, tolerance: f64 },
    #[error("initial data do not match the operator: {0}")]
    DataMismatch(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

use crate::geometry::FieldConfiguration;
pub use exact::{verify_exact_sequence, ProbeSettings};

/// The report type shared by every numerical check.
pub type GreenReport = crate::report::CheckReport;
pub use ivp::{initial_data, solve_ivp, DataFn, InitialData};
pub use roundtrip::{
    data_after_solve, ivp_roundtrip_suite, solve_after_data, support_check, DATA_SOLVE_TOLERANCE, SOLVE_DATA_TOLERANCE,
};

/// `Pφ`.
pub fn apply_operator(op: &VerticalOperator, field: &FieldConfiguration) -> Result<FieldConfiguration, GreenError> {
    op.apply(field)
}

/// `G⁺φ`.
pub fn green_retarded(op: &VerticalOperator, field: &FieldConfiguration) -> Result<FieldConfiguration, GreenError> {
    op.retarded(field)
}

/// `G⁻φ`.
pub fn green_advanced(op: &VerticalOperator, field: &FieldConfiguration) -> Result<FieldConfiguration, GreenError> {
    op.advanced(field)
}

/// `Gφ = G⁺φ − G⁻φ`.
pub fn causal_propagator(op: &VerticalOperator, field: &FieldConfiguration) -> Result<FieldConfiguration, GreenError> {
    op.causal(field)
}
