use std::sync::Arc;

use super::{fiber_integral, ModelError, TestFamily};
use crate::geometry::{BaseFn, FieldConfiguration, ScalarKind, SpacetimeFamily};
use crate::green::{OperatorKind, VerticalOperator};
use crate::quantize::{Parent, PoissonSpace};

/// Largest `|τ_ij + τ_ji|` accepted before antisymmetrizing.
pub const ANTISYMMETRY_TOLERANCE: f64 = 1e-8;

/// The scalar field with base-dependent mass on a finite test family.
#[derive(Debug, Clone)]
pub struct BosonicModel {
    op: VerticalOperator,
    tests: TestFamily,
    causal: Vec<FieldConfiguration>,
}

impl BosonicModel {
    pub fn new(op: VerticalOperator, tests: TestFamily) -> Result<Self, ModelError> {
        if !op.is_second_order() {
            return Err(ModelError::Precondition("the Bosonic model needs a Klein–Gordon operator".into()));
        }
        if tests.components() != 1 || tests.kind() != ScalarKind::Real {
            return Err(ModelError::TestFamily("Bosonic test fields must be real scalars".into()));
        }
        let causal = tests.fields().iter().map(|f| op.causal(f)).collect::<Result<_, _>>()?;
        Ok(Self { op, tests, causal })
    }

    pub fn with_mass(family: Arc<SpacetimeFamily>, mass: BaseFn, tests: TestFamily) -> Result<Self, ModelError> {
        Self::new(VerticalOperator::klein_gordon_fn(family, mass)?, tests)
    }

    pub fn operator(&self) -> &VerticalOperator {
        &self.op
    }

    pub fn tests(&self) -> &TestFamily {
        &self.tests
    }

    pub fn family(&self) -> &Arc<SpacetimeFamily> {
        self.op.family()
    }

    pub fn mass_fn(&self) -> BaseFn {
        match self.op.kind() {
            OperatorKind::KleinGordon { mass } => mass.clone(),
            OperatorKind::Dirac => unreachable!("checked in new"),
        }
    }

    /// The same mass and settings on other test fields.
    pub fn with_tests(&self, tests: TestFamily) -> Result<Self, ModelError> {
        let op = VerticalOperator::klein_gordon_fn(tests.family().clone(), self.mass_fn())?.with_settings(self.op.settings());
        Self::new(op, tests)
    }

    /// `τ_ij` straight from quadrature, before antisymmetrization.
    pub fn raw_tau(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, ModelError> {
        let fields = self.tests.fields();
        let mut out = vec![vec![0.0; fields.len()]; fields.len()];
        for (i, phi) in fields.iter().enumerate() {
            for (j, g) in self.causal.iter().enumerate() {
                let v = fiber_integral(phi, x, |t| Ok(phi.eval(t, x)?[0] * g.eval(t, x)?[0]))?;
                out[i][j] = v.re;
            }
        }
        Ok(out)
    }

    pub fn poisson_space(&self, x: &[f64]) -> Result<PoissonSpace, ModelError> {
        Ok(PoissonSpace::from_matrix(&self.raw_tau(x)?, ANTISYMMETRY_TOLERANCE)?)
    }

    pub fn algebra(&self, x: &[f64]) -> Result<Arc<Parent>, ModelError> {
        Ok(Arc::new(Parent::Ccr(self.poisson_space(x)?)))
    }
}

/// `τ` at the base point `x` for the Klein–Gordon field of mass `m`.
pub fn poisson_from_spacetime(
    family: Arc<SpacetimeFamily>,
    mass: BaseFn,
    tests: &TestFamily,
    x: &[f64],
) -> Result<PoissonSpace, ModelError> {
    BosonicModel::with_mass(family, mass, tests.clone())?.poisson_space(x)
}
