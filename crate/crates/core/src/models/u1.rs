use num_complex::Complex64;

use super::{Chirality, FermionicModel, ModelError};
use crate::quantize::AlgebraMorphism;

pub const UNIMODULAR_TOLERANCE: f64 = 1e-12;
/// Tolerance for pairing invariance and involution equivariance.
pub const U1_TOLERANCE: f64 = 1e-9;

/// The automorphism `(ψ, ψ̄) ↦ (g ψ, g⁻¹ ψ̄)` at the base point `x`.
///
/// Every test field must be chiral, so that each generator is mapped to a
/// multiple of itself. For unimodular `g` the inverse is the conjugate.
pub fn u1_action(g: impl Fn(&[f64]) -> Complex64, model: &FermionicModel, x: &[f64]) -> Result<AlgebraMorphism, ModelError> {
    let phase = g(x);
    let modulus = phase.norm();
    if !((modulus - 1.0).abs() <= UNIMODULAR_TOLERANCE) {
        return Err(ModelError::NotUnimodular { modulus });
    }
    let k = model.tests().len();
    let mut matrix = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    for (i, row) in matrix.iter_mut().enumerate() {
        row[i] = match model.chirality(i, x)? {
            Chirality::Left => phase,
            Chirality::Right => phase.conj(),
            Chirality::Zero => Complex64::new(1.0, 0.0),
            Chirality::Mixed => {
                return Err(ModelError::Precondition(format!("test field {} mixes both components", i + 1)));
            }
        };
    }
    let parent = model.algebra(x)?;
    Ok(AlgebraMorphism::new(parent.clone(), parent, matrix, U1_TOLERANCE)?)
}
