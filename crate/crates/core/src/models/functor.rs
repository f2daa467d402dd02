use std::sync::Arc;

use num_complex::Complex64;

use super::{BosonicModel, FermionicModel, ModelError, TestFamily};
use crate::geometry::{check_open_embedding, BaseMapping, FamilyMorphism, SpacetimeFamily, EMBEDDING_TOLERANCE};
use crate::green::{GreenReport, VerticalOperator};
use crate::quantize::{AlgebraMorphism, Parent};

/// Agreement required between structure constants computed by two
/// independent quadratures.
pub const COHERENCE_TOLERANCE: f64 = 1e-7;

/// Either theory, for operations that treat both alike.
#[derive(Debug, Clone)]
pub enum Model {
    Bosonic(BosonicModel),
    Fermionic(FermionicModel),
}

impl From<BosonicModel> for Model {
    fn from(m: BosonicModel) -> Self {
        Model::Bosonic(m)
    }
}

impl From<FermionicModel> for Model {
    fn from(m: FermionicModel) -> Self {
        Model::Fermionic(m)
    }
}

impl Model {
    pub fn family(&self) -> &Arc<SpacetimeFamily> {
        match self {
            Model::Bosonic(m) => m.family(),
            Model::Fermionic(m) => m.family(),
        }
    }

    /// The generating fields, star-closed in the Fermionic case.
    pub fn tests(&self) -> &TestFamily {
        match self {
            Model::Bosonic(m) => m.tests(),
            Model::Fermionic(m) => m.tests(),
        }
    }

    pub fn rank(&self) -> usize {
        self.tests().len()
    }

    pub fn algebra(&self, x: &[f64]) -> Result<Arc<Parent>, ModelError> {
        match self {
            Model::Bosonic(m) => m.algebra(x),
            Model::Fermionic(m) => m.algebra(x),
        }
    }

    /// `τ` (as complex numbers) or `B` at `x`.
    pub fn structure(&self, x: &[f64]) -> Result<Vec<Vec<Complex64>>, ModelError> {
        Ok(structure_of(&*self.algebra(x)?))
    }

    /// The same theory on the pushed-forward test fields.
    pub fn pushed(&self, f: &FamilyMorphism) -> Result<Model, ModelError> {
        if !Arc::ptr_eq(f.source(), self.family()) {
            return Err(ModelError::Precondition("the embedding does not start at the model's family".into()));
        }
        let fields = self.tests().fields().iter().map(|g| f.push_field(g)).collect::<Result<Vec<_>, _>>()?;
        self.rebuild(f.target().clone(), TestFamily::new(fields)?, None)
    }

    /// The same theory pulled back along a base map.
    pub fn pulled(&self, h: &BaseMapping) -> Result<Model, ModelError> {
        let family = h.pull_family(self.family())?;
        let fields = self.tests().fields().iter().map(|g| h.pull_field_onto(g, &family)).collect::<Result<Vec<_>, _>>()?;
        self.rebuild(family, TestFamily::new(fields)?, Some(h))
    }

    fn rebuild(&self, family: Arc<SpacetimeFamily>, tests: TestFamily, h: Option<&BaseMapping>) -> Result<Model, ModelError> {
        match self {
            Model::Bosonic(m) => {
                let mass = m.mass_fn();
                let mass = match h {
                    Some(h) => {
                        let h = h.clone();
                        Arc::new(move |x: &[f64]| mass(&h.apply(x))) as crate::geometry::BaseFn
                    }
                    None => mass,
                };
                let op = VerticalOperator::klein_gordon_fn(family, mass)?.with_settings(m.operator().settings());
                Ok(Model::Bosonic(BosonicModel::new(op, tests)?))
            }
            Model::Fermionic(m) => {
                let out = FermionicModel::new(family, tests)?;
                if out.added() != 0 || out.involution() != m.involution() {
                    return Err(ModelError::Coherence {
                        deviation: f64::INFINITY,
                        tolerance: 0.0,
                        detail: "the involution on generators changed".into(),
                    });
                }
                Ok(Model::Fermionic(out))
            }
        }
    }
}

fn structure_of(parent: &Parent) -> Vec<Vec<Complex64>> {
    match parent {
        Parent::Ccr(w) => w.matrix().into_iter().map(|r| r.into_iter().map(|v| Complex64::new(v, 0.0)).collect()).collect(),
        Parent::Car(v) => v.matrix().to_vec(),
    }
}

fn max_entry_distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().flatten().zip(b.iter().flatten()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

/// The morphism on generators induced by extending the test fields by zero
/// along `f`, after checking that `f` is an open embedding and that the
/// structure constants at `x` agree on both sides within
/// [`COHERENCE_TOLERANCE`].
pub fn pushforward_observables(f: &FamilyMorphism, model: &Model, x: &[f64]) -> Result<AlgebraMorphism, ModelError> {
    let report = check_open_embedding(f, EMBEDDING_TOLERANCE);
    if !report.passed {
        return Err(ModelError::Precondition(format!(
            "not an open embedding: monotone {}, inside target {}, 1-form error {:e} (tolerance {:e})",
            report.monotone, report.inside_target, report.max_form_error, report.tolerance
        )));
    }
    let target = model.pushed(f)?;
    let (a, b) = (model.algebra(x)?, target.algebra(x)?);
    let deviation = max_entry_distance(&structure_of(&a), &structure_of(&b));
    if !(deviation <= COHERENCE_TOLERANCE) {
        return Err(ModelError::Coherence { deviation, tolerance: COHERENCE_TOLERANCE, detail: "pushforward".into() });
    }
    let k = model.rank();
    let identity = (0..k)
        .map(|i| (0..k).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    Ok(AlgebraMorphism::new(a, b, identity, COHERENCE_TOLERANCE)?)
}

/// Compares the structure constants of the pulled-back model at each sample
/// `x′` of the new base with those of `model` at `h(x′)`.
pub fn pullback_coherence_check(h: &BaseMapping, model: &Model, tol: f64) -> GreenReport {
    let name = "models.pullback_coherence";
    let run = || -> Result<(f64, usize), ModelError> {
        let pulled = model.pulled(h)?;
        let mut worst = 0.0f64;
        let mut samples = 0;
        for x in h.domain().samples() {
            let (a, b) = (pulled.structure(&x)?, model.structure(&h.apply(&x))?);
            worst = worst.max(max_entry_distance(&a, &b));
            samples += a.len() * a.len();
        }
        Ok((worst, samples))
    };
    GreenReport::measure(name, tol, run())
}
