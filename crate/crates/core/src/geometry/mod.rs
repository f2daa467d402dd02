//! Smooth families of 1-dimensional spacetimes in a global trivialization.
//!
//! A family over a parameter box `U` is the product `I × U` with a positive
//! vertical density `ρ(t, x)`, so that the vertical 1-form is `E = ρ dt`. The
//! fiber interval `I` may depend on the base point and may be unbounded.
//! Fields are pure evaluable functions of `(t, x)` that carry a declared
//! vertical support class bounded by sections.

mod base;
mod embedding;
mod family;
mod field;
mod glue;
mod proper_time;
mod pullback;
mod region;

use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::quad::QuadError;

pub use base::BaseDomain;
pub use embedding::{check_open_embedding, EmbeddingReport, FamilyMorphism, EMBEDDING_TOLERANCE};
pub use family::{FamilyBuilder, Section, SpacetimeFamily, TimeWindow};
pub use field::{FieldConfiguration, ScalarKind, SupportClass, SupportKind};
pub use glue::glue_fields;
pub use proper_time::{inverse_proper_time, proper_time, proper_time_between, INVERSE_TOLERANCE};
pub use pullback::{restrict_field, BaseMapping};
pub use region::{vertical_region, Direction, VerticalRegion};

/// A point of the base box.
pub type Point = SmallVec<[f64; 4]>;
/// A smooth function on the base.
pub type BaseFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// A smooth function on the total space, as `(t, x) ↦ value`.
pub type SpacetimeFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;
/// A smooth map between base boxes.
pub type BaseMap = Arc<dyn Fn(&[f64]) -> Point + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid base domain: {0}")]
    InvalidBase(String),
    #[error("invalid sampling window: {0}")]
    InvalidWindow(String),
    #[error("density is not positive: rho({t}, {x:?}) = {value}")]
    NonPositiveDensity { t: f64, x: Point, value: f64 },
    #[error("fiber interval ({lo}, {hi}) over {x:?} is empty")]
    EmptyFiber { x: Point, lo: f64, hi: f64 },
    #[error("t = {t} lies outside the fiber interval ({lo}, {hi}) over {x:?}")]
    OutsideFiber { t: f64, x: Point, lo: f64, hi: f64 },
    #[error("section value {value} at {x:?} is outside the fiber interval ({lo}, {hi})")]
    SectionOutsideFiber { x: Point, value: f64, lo: f64, hi: f64 },
    #[error("support sections are not ordered at {x:?}: lower {lower} >= upper {upper}")]
    UnorderedSupport { x: Point, lower: f64, upper: f64 },
    #[error("proper time {value} is outside the attainable range ({lo}, {hi}) over {x:?}")]
    ProperTimeOutOfRange { value: f64, x: Point, lo: f64, hi: f64 },
    #[error("base map sends {from:?} to {to:?}, outside the target box")]
    MapLeavesBase { from: Point, to: Point },
    #[error("base point {x:?} is not covered")]
    CoverGap { x: Point },
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("local data disagree by {error:e} at t = {t}, x = {x:?} (tolerance {tolerance:e})")]
    Incompatible { error: f64, t: f64, x: Point, tolerance: f64 },
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("evaluation produced a non-finite value at t = {t}, x = {x:?}")]
    NonFinite { t: f64, x: Point },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

pub(crate) fn point(x: &[f64]) -> Point {
    SmallVec::from_slice(x)
}
