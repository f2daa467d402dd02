//! The scalar and Dirac theories: structure constants computed from the
//! spacetime data, and their behaviour under pushforward, pullback, the U(1)
//! action and smooth variation of parameters.
//!
//! Observables are represented by a finite [`TestFamily`] of vertically
//! compactly supported fields. At each base point `x` the Bosonic model
//! produces a [`PoissonSpace`](crate::quantize::PoissonSpace) with
//!
//! ```text
//! τ_ij = ∫ φ_i(t, x) (Gφ_j)(t, x) ρ(t, x) dt
//! ```
//!
//! and the Fermionic model an [`IPSpace`](crate::quantize::IPSpace) with
//! pairing `B_ij = ∫ (ψ_i, ψ̄_i)·[[0, i], [−i, 0]]·S(ψ_j, ψ̄_j) ρ dt`.

mod bosonic;
mod fermionic;
mod functor;
mod smooth;
mod u1;

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{FieldConfiguration, GeometryError, ScalarKind, SpacetimeFamily};
use crate::green::GreenError;
use crate::quad::GaussLegendre;
use crate::quantize::QuantizeError;

pub use bosonic::{poisson_from_spacetime, BosonicModel, ANTISYMMETRY_TOLERANCE};
pub use fermionic::{ip_from_spacetime, star_field, Chirality, FermionicModel, PAIRING_TOLERANCE};
pub use functor::{pullback_coherence_check, pushforward_observables, Model, COHERENCE_TOLERANCE};
pub use smooth::{smoothness_probe, ConvergenceReport, ORDER_RANGE};
pub use u1::{u1_action, UNIMODULAR_TOLERANCE, U1_TOLERANCE};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
    #[error("invalid test family: {0}")]
    TestFamily(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("structure constants differ by {deviation:e} > {tolerance:e} ({detail})")]
    Coherence { deviation: f64, tolerance: f64, detail: String },
    #[error("|g(x)| = {modulus} is not 1")]
    NotUnimodular { modulus: f64 },
}

/// A finite list of vertically compactly supported fields on one family.
#[derive(Debug, Clone)]
pub struct TestFamily {
    fields: Vec<FieldConfiguration>,
}

impl TestFamily {
    pub fn new(fields: Vec<FieldConfiguration>) -> Result<Self, ModelError> {
        let Some(first) = fields.first() else {
            return Err(ModelError::TestFamily("no test fields".into()));
        };
        for (i, f) in fields.iter().enumerate() {
            if !Arc::ptr_eq(f.family(), first.family()) {
                return Err(ModelError::TestFamily(format!("field {} lives on a different family", i + 1)));
            }
            if f.components() != first.components() || f.kind() != first.kind() {
                return Err(ModelError::TestFamily(format!("field {} has a different shape", i + 1)));
            }
            let s = f.support();
            if !(s.is_past_compact() && s.is_future_compact()) {
                return Err(ModelError::TestFamily(format!("field {} is not vertically compact ({:?})", i + 1, s.kind())));
            }
        }
        Ok(Self { fields })
    }

    pub fn fields(&self) -> &[FieldConfiguration] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn family(&self) -> &Arc<SpacetimeFamily> {
        self.fields[0].family()
    }

    pub fn components(&self) -> usize {
        self.fields[0].components()
    }

    pub fn kind(&self) -> ScalarKind {
        self.fields[0].kind()
    }

    /// Replaces field `i`, keeping the remaining ones.
    pub fn with_field(&self, i: usize, field: FieldConfiguration) -> Result<Self, ModelError> {
        let mut fields = self.fields.clone();
        fields[i] = field;
        Self::new(fields)
    }
}

/// Outer Gauss–Legendre panels per support, and per unit of length beyond.
const OUTER_PANELS: usize = 64;

/// `∫_{supp φ} f(t) ρ(t, x) dt` over the support of `field` above `x`.
pub(crate) fn fiber_integral(
    field: &FieldConfiguration,
    x: &[f64],
    mut f: impl FnMut(f64) -> Result<Complex64, ModelError>,
) -> Result<Complex64, ModelError> {
    let support = field.support();
    let (lo, hi) = (support.lower(x).expect("compact"), support.upper(x).expect("compact"));
    if !(hi > lo) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let family = field.family().clone();
    let panels = OUTER_PANELS * ((hi - lo).ceil() as usize).max(1);
    GaussLegendre::new(panels).integrate(|t| Ok(f(t)? * family.density(t, x)), lo, hi)
}
