use std::sync::Arc;

use num_complex::Complex64;

use super::kernel::{self, Branch};
use super::GreenError;
use crate::diff::{self, DEFAULT_STEP};
use crate::geometry::{point, BaseFn, FieldConfiguration, GeometryError, ScalarKind, SpacetimeFamily, SupportClass};
use crate::value::FieldValue;

#[derive(Clone)]
pub enum OperatorKind {
    /// `(ρ⁻¹∂_t)² + m(x)²` on real or complex scalars.
    KleinGordon { mass: BaseFn },
    /// `(iρ⁻¹∂_t, −iρ⁻¹∂_t)` on pairs `(ψ, ψ̄)`.
    Dirac,
}

impl std::fmt::Debug for OperatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OperatorKind::KleinGordon { .. } => f.write_str("KleinGordon"),
            OperatorKind::Dirac => f.write_str("Dirac"),
        }
    }
}

/// Numerical settings shared by the operator and its Green operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSettings {
    /// Finite-difference step in proper time.
    pub step: f64,
    /// Gauss–Legendre panels per `panel_span` of integration range.
    pub panels: usize,
    pub panel_span: f64,
    /// Largest residual `|PΦ|` accepted when a solution is required.
    pub solution_tolerance: f64,
}

impl Default for OperatorSettings {
    fn default() -> Self {
        Self { step: DEFAULT_STEP, panels: 64, panel_span: 2.0, solution_tolerance: 1e-5 }
    }
}

#[derive(Clone, Debug)]
pub struct VerticalOperator {
    kind: OperatorKind,
    family: Arc<SpacetimeFamily>,
    settings: OperatorSettings,
}

impl VerticalOperator {
    pub fn klein_gordon(
        family: Arc<SpacetimeFamily>,
        mass: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, GreenError> {
        Self::klein_gordon_fn(family, Arc::new(mass))
    }

    pub fn klein_gordon_fn(family: Arc<SpacetimeFamily>, mass: BaseFn) -> Result<Self, GreenError> {
        for x in family.base().samples() {
            let value = mass(&x);
            if !(value > 0.0 && value.is_finite()) {
                return Err(GreenError::NonPositiveMass { x, value });
            }
        }
        Ok(Self { kind: OperatorKind::KleinGordon { mass }, family, settings: OperatorSettings::default() })
    }

    pub fn klein_gordon_constant(family: Arc<SpacetimeFamily>, mass: f64) -> Result<Self, GreenError> {
        Self::klein_gordon(family, move |_| mass)
    }

    pub fn dirac(family: Arc<SpacetimeFamily>) -> Self {
        Self { kind: OperatorKind::Dirac, family, settings: OperatorSettings::default() }
    }

    pub fn with_settings(mut self, settings: OperatorSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn family(&self) -> &Arc<SpacetimeFamily> {
        &self.family
    }

    pub fn settings(&self) -> OperatorSettings {
        self.settings
    }

    /// `m(x)` for Klein–Gordon, `None` for Dirac.
    pub fn mass(&self, x: &[f64]) -> Option<f64> {
        match &self.kind {
            OperatorKind::KleinGordon { mass } => Some(mass(x)),
            OperatorKind::Dirac => None,
        }
    }

    pub fn components(&self) -> usize {
        match self.kind {
            OperatorKind::KleinGordon { .. } => 1,
            OperatorKind::Dirac => 2,
        }
    }

    pub fn is_second_order(&self) -> bool {
        matches!(self.kind, OperatorKind::KleinGordon { .. })
    }

    pub(crate) fn check_field(&self, field: &FieldConfiguration) -> Result<(), GreenError> {
        if !Arc::ptr_eq(field.family(), &self.family) {
            return Err(GreenError::FamilyMismatch);
        }
        if field.components() != self.components() {
            return Err(GreenError::ComponentMismatch { expected: self.components(), found: field.components() });
        }
        Ok(())
    }

    fn output_kind(&self, field: &FieldConfiguration) -> ScalarKind {
        match self.kind {
            OperatorKind::KleinGordon { .. } => field.kind(),
            OperatorKind::Dirac => ScalarKind::Complex,
        }
    }

    /// `Pφ` at one point, by Richardson-extrapolated central differences in
    /// proper time.
    pub fn apply_at(&self, field: &FieldConfiguration, t: f64, x: &[f64]) -> Result<FieldValue, GeometryError> {
        apply_at(&self.kind, &self.family, self.settings.step, field, t, x)
    }

    /// `Pφ`, with the support of `φ`.
    pub fn apply(&self, field: &FieldConfiguration) -> Result<FieldConfiguration, GreenError> {
        self.check_field(field)?;
        let (kind, family, step, f) = (self.kind.clone(), self.family.clone(), self.settings.step, field.clone());
        Ok(FieldConfiguration::new(
            self.family.clone(),
            field.components(),
            self.output_kind(field),
            field.support().clone(),
            move |t, x| apply_at(&kind, &family, step, &f, t, x),
        )?)
    }

    /// `G⁺φ` for past compact `φ`; the result is past compact with the same
    /// lower section.
    pub fn retarded(&self, field: &FieldConfiguration) -> Result<FieldConfiguration, GreenError> {
        self.green(field, Branch::Retarded)
    }

    /// `G⁻φ` for future compact `φ`; the result is future compact with the
    /// same upper section.
    pub fn advanced(&self, field: &FieldConfiguration) -> Result<FieldConfiguration, GreenError> {
        self.green(field, Branch::Advanced)
    }

    /// `G = G⁺ − G⁻` on compactly supported `φ`.
    pub fn causal(&self, field: &FieldConfiguration) -> Result<FieldConfiguration, GreenError> {
        self.green(field, Branch::Causal)
    }

    fn green(&self, field: &FieldConfiguration, branch: Branch) -> Result<FieldConfiguration, GreenError> {
        self.check_field(field)?;
        let support = field.support();
        let (name, expected, ok, out) = match branch {
            Branch::Retarded => (
                "retarded Green operator",
                "past compact",
                support.is_past_compact(),
                support.lower_section().cloned().map(SupportClass::PastCompact),
            ),
            Branch::Advanced => (
                "advanced Green operator",
                "future compact",
                support.is_future_compact(),
                support.upper_section().cloned().map(SupportClass::FutureCompact),
            ),
            Branch::Causal => (
                "causal propagator",
                "compact",
                support.is_past_compact() && support.is_future_compact(),
                Some(SupportClass::Unrestricted),
            ),
        };
        if !ok {
            return Err(GreenError::WrongSupport { operator: name, expected, found: support.kind() });
        }
        let (op, f) = (self.clone(), field.clone());
        let panels = self.settings.panels;
        let (family, n, kind, out) = (self.family.clone(), field.components(), self.output_kind(field), out.expect("checked above"));
        if branch == Branch::Causal {
            let k = kernel::CausalKernel::new(op, f, panels);
            return Ok(FieldConfiguration::new(family, n, kind, out, move |t, x| k.eval(t, x))?);
        }
        let k = kernel::GreenKernel::new(op, f, branch, panels);
        Ok(FieldConfiguration::new(family, n, kind, out, move |t, x| k.eval(t, x))?)
    }

    /// `G⁺φ(t, x)` with an explicit panel count per span, for resolution studies.
    pub fn retarded_at(&self, field: &FieldConfiguration, t: f64, x: &[f64], panels: usize) -> Result<FieldValue, GreenError> {
        self.check_field(field)?;
        if !field.support().is_past_compact() {
            return Err(GreenError::WrongSupport {
                operator: "retarded Green operator",
                expected: "past compact",
                found: field.support().kind(),
            });
        }
        let lo = field.support().lower(x).expect("past compact");
        let hi = field.support().upper(x).unwrap_or(self.family.window().hi);
        Ok(kernel::integrate(self, field, Branch::Retarded, t, x, kernel::base_panels(self, panels, lo, hi))?)
    }
}

fn apply_at(
    kind: &OperatorKind,
    family: &SpacetimeFamily,
    step: f64,
    field: &FieldConfiguration,
    t: f64,
    x: &[f64],
) -> Result<FieldValue, GeometryError> {
    let rho = family.density(t, x);
    let k = step / rho;
    let along = |s: f64| field.eval(s, x);
    match kind {
        OperatorKind::KleinGordon { mass } => {
            let m = mass(x);
            let (d1, d2) = diff::first_and_second(along, t, k)?;
            let drho: Result<f64, GeometryError> = diff::first(|s| Ok(family.density(s, x)), t, k);
            let drho = drho?;
            let value = field.eval(t, x)?;
            let out = d2 * (1.0 / (rho * rho)) - d1 * (drho / (rho * rho * rho)) + value * (m * m);
            if !out.is_finite() {
                return Err(GeometryError::NonFinite { t, x: point(x) });
            }
            Ok(out)
        }
        OperatorKind::Dirac => {
            let d1 = diff::first(along, t, k)?;
            let i = Complex64::new(0.0, 1.0);
            Ok(FieldValue::pair(i * d1[0] / rho, -i * d1[1] / rho))
        }
    }
}
