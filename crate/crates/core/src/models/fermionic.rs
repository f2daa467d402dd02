use std::sync::Arc;

use num_complex::Complex64;

use super::{fiber_integral, ModelError, TestFamily};
use crate::geometry::{FieldConfiguration, ScalarKind, SpacetimeFamily};
use crate::green::VerticalOperator;
use crate::quantize::{IPSpace, Parent};
use crate::value::FieldValue;

/// Largest symmetry or compatibility defect accepted before enforcing both.
pub const PAIRING_TOLERANCE: f64 = 1e-10;

/// Points per base sample at which two fields are compared.
const MATCH_SAMPLES: usize = 32;
const MATCH_TOLERANCE: f64 = 1e-12;

/// `(ψ, ψ̄) ↦ (conj ψ̄, conj ψ)`.
pub fn star_field(field: &FieldConfiguration) -> Result<FieldConfiguration, ModelError> {
    if field.components() != 2 {
        return Err(ModelError::TestFamily("the Dirac involution acts on pairs".into()));
    }
    let f = field.clone();
    Ok(FieldConfiguration::new(field.family().clone(), 2, ScalarKind::Complex, field.support().clone(), move |t, x| {
        let v = f.eval(t, x)?;
        Ok(FieldValue::pair(v[1].conj(), v[0].conj()))
    })?)
}

/// Which components of a test field are nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    /// Only `ψ`.
    Left,
    /// Only `ψ̄`.
    Right,
    Mixed,
    Zero,
}

fn probe_times(field: &FieldConfiguration, x: &[f64]) -> Vec<f64> {
    let s = field.support();
    let (lo, hi) = (s.lower(x).expect("compact"), s.upper(x).expect("compact"));
    (0..MATCH_SAMPLES).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / MATCH_SAMPLES as f64).collect()
}

fn fields_match(a: &FieldConfiguration, b: &FieldConfiguration) -> Result<bool, ModelError> {
    for x in a.family().base().samples() {
        let (sa, sb) = (a.support(), b.support());
        let close = |p: Option<f64>, q: Option<f64>| matches!((p, q), (Some(p), Some(q)) if (p - q).abs() <= MATCH_TOLERANCE);
        if !close(sa.lower(&x), sb.lower(&x)) || !close(sa.upper(&x), sb.upper(&x)) {
            return Ok(false);
        }
        for t in probe_times(a, &x) {
            let (u, v) = (a.eval(t, &x)?, b.eval(t, &x)?);
            if u.distance(&v) > MATCH_TOLERANCE * u.norm_inf().max(1.0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The massless Dirac field on a star-closed finite test family.
#[derive(Debug, Clone)]
pub struct FermionicModel {
    op: VerticalOperator,
    tests: TestFamily,
    involution: Vec<usize>,
    added: usize,
    causal: Vec<FieldConfiguration>,
}

impl FermionicModel {
    /// Closes `tests` under [`star_field`], appending missing partners, and
    /// records the induced permutation of generators.
    pub fn new(family: Arc<SpacetimeFamily>, tests: TestFamily) -> Result<Self, ModelError> {
        if tests.components() != 2 {
            return Err(ModelError::TestFamily("Dirac test fields have two components".into()));
        }
        if !Arc::ptr_eq(tests.family(), &family) {
            return Err(ModelError::TestFamily("test fields live on a different family".into()));
        }
        let original = tests.len();
        let mut fields = tests.fields().to_vec();
        let mut involution: Vec<Option<usize>> = vec![None; original];
        let mut i = 0;
        while i < fields.len() {
            if involution[i].is_none() {
                let star = star_field(&fields[i])?;
                let mut partner = None;
                for (j, f) in fields.iter().enumerate() {
                    if involution[j].is_none() && fields_match(&star, f)? {
                        partner = Some(j);
                        break;
                    }
                }
                let j = match partner {
                    Some(j) => j,
                    None => {
                        fields.push(star);
                        involution.push(None);
                        fields.len() - 1
                    }
                };
                involution[i] = Some(j);
                involution[j] = Some(i);
            }
            i += 1;
        }
        let op = VerticalOperator::dirac(family);
        let tests = TestFamily::new(fields)?;
        let causal = tests.fields().iter().map(|f| op.causal(f)).collect::<Result<_, _>>()?;
        let involution = involution.into_iter().map(|p| p.expect("every field is paired")).collect();
        Ok(Self { op, added: tests.len() - original, tests, involution, causal })
    }

    pub fn operator(&self) -> &VerticalOperator {
        &self.op
    }

    pub fn family(&self) -> &Arc<SpacetimeFamily> {
        self.op.family()
    }

    /// The star-closed test family.
    pub fn tests(&self) -> &TestFamily {
        &self.tests
    }

    /// How many partners were appended to close the family.
    pub fn added(&self) -> usize {
        self.added
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    pub fn chirality(&self, i: usize, x: &[f64]) -> Result<Chirality, ModelError> {
        let field = &self.tests.fields()[i];
        let (mut left, mut right) = (false, false);
        for t in probe_times(field, x) {
            let v = field.eval(t, x)?;
            left |= v[0].norm() > 0.0;
            right |= v[1].norm() > 0.0;
        }
        Ok(match (left, right) {
            (true, false) => Chirality::Left,
            (false, true) => Chirality::Right,
            (true, true) => Chirality::Mixed,
            (false, false) => Chirality::Zero,
        })
    }

    /// `B_ij` straight from quadrature, before enforcing the identities.
    pub fn raw_pairing(&self, x: &[f64]) -> Result<Vec<Vec<Complex64>>, ModelError> {
        let i_unit = Complex64::new(0.0, 1.0);
        let fields = self.tests.fields();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); fields.len()]; fields.len()];
        for (i, psi) in fields.iter().enumerate() {
            for (j, s) in self.causal.iter().enumerate() {
                out[i][j] = fiber_integral(psi, x, |t| {
                    let (u, v) = (psi.eval(t, x)?, s.eval(t, x)?);
                    Ok(i_unit * (u[0] * v[1] - u[1] * v[0]))
                })?;
            }
        }
        Ok(out)
    }

    pub fn ip_space(&self, x: &[f64]) -> Result<IPSpace, ModelError> {
        Ok(IPSpace::new(self.involution.clone(), self.raw_pairing(x)?, PAIRING_TOLERANCE)?)
    }

    pub fn algebra(&self, x: &[f64]) -> Result<Arc<Parent>, ModelError> {
        Ok(Arc::new(Parent::Car(self.ip_space(x)?)))
    }
}

/// The pairing space at `x` of the massless Dirac field on the star closure
/// of `tests`.
pub fn ip_from_spacetime(family: Arc<SpacetimeFamily>, tests: &TestFamily, x: &[f64]) -> Result<IPSpace, ModelError> {
    FermionicModel::new(family, tests.clone())?.ip_space(x)
}
