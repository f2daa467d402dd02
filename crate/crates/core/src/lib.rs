//! Smooth families of 1-dimensional spacetimes, their Klein–Gordon and Dirac
//! Green operators, and the CCR and CAR algebras built from them.
//!
//! - [`geometry`]: families `I × U` with a density, sections, proper time,
//!   supports, pullback along base maps and gluing.
//! - [`green`]: the vertical operators, retarded, advanced and causal Green
//!   operators, initial value problems and the exact-sequence checks.
//! - [`quantize`]: Poisson and pairing spaces, normal-ordered CCR/CAR
//!   algebras, morphisms and matrix oracles.
//! - [`models`]: the quantized theories as functors of the spacetime family.
//!
//! The guide in `book/` walks through each of these with runnable examples.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bump;
pub mod diff;
pub mod geometry;
pub mod quad;
pub mod value;
pub mod green;
pub mod models;
pub mod quantize;
pub mod report;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/index.md")]
    mod index {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/green.md")]
    mod green {}
    #[doc = include_str!("../../../book/src/quantize.md")]
    mod quantize {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
