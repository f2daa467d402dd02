//! CCR and CAR algebras over finite generating sets.
//!
//! Elements are stored in normal form: a finite sum of ordered generator
//! words with complex coefficients. Words are sorted nondecreasingly for CCR
//! and strictly increasingly for CAR. Products are reduced by the rewrite
//! rules
//!
//! * CCR, `j > i`: `w_j w_i → w_i w_j + i·τ(w_j, w_i)·1`,
//! * CAR, `j > i`: `v_j v_i → −v_i v_j + ⟨v_j, v_i⟩·1`, and `v_i v_i → ½⟨v_i, v_i⟩·1`,
//!
//! which encode `[w, w′] = i·τ(w, w′)` and `v v′ + v′ v = ⟨v, v′⟩`.
//!
//! Generators are 0-based in the API and 1-based when rendered or parsed.

mod algebra;
mod morphism;
pub mod checks;
pub mod oracle;
mod parse;
mod space;

use thiserror::Error;

pub use algebra::{AlgebraElement, Parent, RewriteOrder, Word};
pub use morphism::AlgebraMorphism;
pub use parse::parse_element;
pub use space::{IPSpace, PoissonSpace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantizeError {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("elements belong to different algebras")]
    ParentMismatch,
    #[error("matrix is not square of size {rank}")]
    Shape { rank: usize },
    #[error("tau is not antisymmetric at ({i}, {j}): |tau_ij + tau_ji| = {error:e} > {tolerance:e}")]
    NotAntisymmetric { i: usize, j: usize, error: f64, tolerance: f64 },
    #[error("pairing is not symmetric at ({i}, {j}): deviation {error:e} > {tolerance:e}")]
    NotSymmetric { i: usize, j: usize, error: f64, tolerance: f64 },
    #[error("pairing is not compatible with the involution at ({i}, {j}): deviation {error:e} > {tolerance:e}")]
    NotCompatible { i: usize, j: usize, error: f64, tolerance: f64 },
    #[error("not an involution: {0}")]
    NotAnInvolution(String),
    #[error("generator map does not preserve the structure: deviation {deviation:e} > {tolerance:e} ({detail})")]
    StructureViolation { deviation: f64, tolerance: f64, detail: String },
    #[error("syntax error at position {position}: {message}")]
    Parse { position: usize, message: String },
}
