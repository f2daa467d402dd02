//! Spacetime, operator and test fields described by a [`RunConfig`].

use std::sync::Arc;

use aqft1d::bump::Bump;
use aqft1d::geometry::{BaseDomain, BaseFn, FieldConfiguration, Point, SpacetimeFamily, TimeWindow};
use aqft1d::green::VerticalOperator;
use aqft1d::models::{BosonicModel, FermionicModel, Model, ModelError, TestFamily};
use num_complex::Complex64;

use crate::config::{invalid, Component, ConfigError, RunConfig, TestSpec};

#[derive(Debug, Clone)]
pub struct Setup {
    pub family: Arc<SpacetimeFamily>,
    pub operator: VerticalOperator,
    pub tests: Vec<FieldConfiguration>,
    pub model: Model,
    /// Centre of the base box, where pointwise structure constants are taken.
    pub centre: Point,
}

/// Builds the family `I × U` from the base, fiber and density sections.
pub fn family(config: &RunConfig) -> Result<Arc<SpacetimeFamily>, ConfigError> {
    let b = &config.base;
    let base = BaseDomain::new(b.lo.clone(), b.hi.clone(), b.grid.clone()).map_err(|e| invalid("base", e.to_string()))?;
    let (lo, hi) = (config.fiber.lo, config.fiber.hi);
    let density = config.density.clone();
    SpacetimeFamily::builder(base)
        .fiber(move |_| lo, move |_| hi)
        .density(move |_, x| density.eval(x))
        .window(TimeWindow { lo, hi, samples: config.fiber.samples })
        .build()
        .map_err(|e| invalid("density", e.to_string()))
}

pub fn mass(config: &RunConfig) -> BaseFn {
    let m = config.mass.clone();
    Arc::new(move |x| m.eval(x))
}

pub fn test_field(family: &Arc<SpacetimeFamily>, spec: &TestSpec) -> Result<FieldConfiguration, ConfigError> {
    let bump = Bump::unit(spec.centre, spec.radius);
    let field = match spec.component {
        None => bump.field(family.clone()),
        Some(c) => {
            let phase = spec.phase.map_or(Complex64::new(1.0, 0.0), |[re, im]| Complex64::new(re, im));
            let zero = Complex64::new(0.0, 0.0);
            match c {
                Component::Psi => bump.spinor(family.clone(), phase, zero),
                Component::PsiBar => bump.spinor(family.clone(), zero, phase),
            }
        }
    };
    field.map_err(|e| invalid("tests", e.to_string()))
}

fn model_error(e: ModelError) -> ConfigError {
    invalid("tests", e.to_string())
}

impl Setup {
    pub fn new(config: &RunConfig) -> Result<Self, ConfigError> {
        let family = family(config)?;
        let tests = config.tests.iter().map(|t| test_field(&family, t)).collect::<Result<Vec<_>, _>>()?;
        let test_family = TestFamily::new(tests.clone()).map_err(model_error)?;
        let (operator, model) = if config.scenario.is_dirac() {
            let model = FermionicModel::new(family.clone(), test_family).map_err(model_error)?;
            (VerticalOperator::dirac(family.clone()), Model::from(model))
        } else {
            let op = VerticalOperator::klein_gordon_fn(family.clone(), mass(config)).map_err(|e| invalid("mass", e.to_string()))?;
            let model = BosonicModel::new(op.clone(), test_family).map_err(model_error)?;
            (op, Model::from(model))
        };
        let centre = family.base().centre();
        Ok(Self { family, operator, tests, model, centre })
    }
}
