use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{point, BaseFn, GeometryError, Point, Section, SpacetimeFamily};
use crate::value::FieldValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarKind {
    Real,
    Complex,
}

/// Vertical support bookkeeping for a field.
///
/// The bounds are sections, so they may move with the base point.
#[derive(Clone, Debug)]
pub enum SupportClass {
    Unrestricted,
    /// Vertically past compact: `supp φ ⊆ J⁺(σ)`.
    PastCompact(Section),
    /// Vertically future compact: `supp φ ⊆ J⁻(σ)`.
    FutureCompact(Section),
    /// Vertically compact: between `lower` and `upper`.
    Compact { lower: Section, upper: Section },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportKind {
    Unrestricted,
    PastCompact,
    FutureCompact,
    Compact,
}

impl SupportClass {
    pub fn compact(lower: f64, upper: f64) -> Self {
        SupportClass::Compact { lower: Section::constant(lower), upper: Section::constant(upper) }
    }

    pub fn kind(&self) -> SupportKind {
        match self {
            SupportClass::Unrestricted => SupportKind::Unrestricted,
            SupportClass::PastCompact(_) => SupportKind::PastCompact,
            SupportClass::FutureCompact(_) => SupportKind::FutureCompact,
            SupportClass::Compact { .. } => SupportKind::Compact,
        }
    }

    pub fn lower_section(&self) -> Option<&Section> {
        match self {
            SupportClass::PastCompact(s) | SupportClass::Compact { lower: s, .. } => Some(s),
            _ => None,
        }
    }

    pub fn upper_section(&self) -> Option<&Section> {
        match self {
            SupportClass::FutureCompact(s) | SupportClass::Compact { upper: s, .. } => Some(s),
            _ => None,
        }
    }

    pub fn lower(&self, x: &[f64]) -> Option<f64> {
        self.lower_section().map(|s| s.eval(x))
    }

    pub fn upper(&self, x: &[f64]) -> Option<f64> {
        self.upper_section().map(|s| s.eval(x))
    }

    pub fn is_past_compact(&self) -> bool {
        self.lower_section().is_some()
    }

    pub fn is_future_compact(&self) -> bool {
        self.upper_section().is_some()
    }

    /// Whether `(t, x)` lies in the closed region the bounds allow.
    pub fn contains(&self, t: f64, x: &[f64]) -> bool {
        self.lower(x).is_none_or(|lo| t >= lo) && self.upper(x).is_none_or(|hi| t <= hi)
    }

    fn from_bounds(lower: Option<Section>, upper: Option<Section>) -> Self {
        match (lower, upper) {
            (Some(lower), Some(upper)) => SupportClass::Compact { lower, upper },
            (Some(lower), None) => SupportClass::PastCompact(lower),
            (None, Some(upper)) => SupportClass::FutureCompact(upper),
            (None, None) => SupportClass::Unrestricted,
        }
    }

    /// The smallest class containing both supports.
    pub fn union(&self, other: &SupportClass) -> Self {
        let lower = match (self.lower_section(), other.lower_section()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
        let upper = match (self.upper_section(), other.upper_section()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        Self::from_bounds(lower, upper)
    }

    pub(crate) fn map_sections(&self, f: impl Fn(&Section) -> Section) -> Self {
        Self::from_bounds(self.lower_section().map(&f), self.upper_section().map(&f))
    }

    pub fn validate(&self, family: &SpacetimeFamily) -> Result<(), GeometryError> {
        if let Some(s) = self.lower_section() {
            s.validate(family)?;
        }
        if let Some(s) = self.upper_section() {
            s.validate(family)?;
        }
        if let SupportClass::Compact { lower, upper } = self {
            for x in family.base().samples() {
                let (lo, hi) = (lower.eval(&x), upper.eval(&x));
                if lo >= hi {
                    return Err(GeometryError::UnorderedSupport { x, lower: lo, upper: hi });
                }
            }
        }
        Ok(())
    }
}

pub type EvalFn = Arc<dyn Fn(f64, &[f64]) -> Result<FieldValue, GeometryError> + Send + Sync>;

/// A smooth map `(t, x) ↦ 𝕂ⁿ` on a spacetime family, with declared support.
#[derive(Clone)]
pub struct FieldConfiguration {
    family: Arc<SpacetimeFamily>,
    components: usize,
    kind: ScalarKind,
    eval: EvalFn,
    support: SupportClass,
}

impl fmt::Debug for FieldConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldConfiguration")
            .field("components", &self.components)
            .field("kind", &self.kind)
            .field("support", &self.support.kind())
            .finish_non_exhaustive()
    }
}

impl FieldConfiguration {
    pub fn new(
        family: Arc<SpacetimeFamily>,
        components: usize,
        kind: ScalarKind,
        support: SupportClass,
        eval: impl Fn(f64, &[f64]) -> Result<FieldValue, GeometryError> + Send + Sync + 'static,
    ) -> Result<Self, GeometryError> {
        Self::from_eval_fn(family, components, kind, support, Arc::new(eval))
    }

    pub(crate) fn from_eval_fn(
        family: Arc<SpacetimeFamily>,
        components: usize,
        kind: ScalarKind,
        support: SupportClass,
        eval: EvalFn,
    ) -> Result<Self, GeometryError> {
        if components == 0 {
            return Err(GeometryError::FieldMismatch("a field needs at least one component".into()));
        }
        support.validate(&family)?;
        Ok(Self { family, components, kind, eval, support })
    }

    /// A real scalar field.
    pub fn real(
        family: Arc<SpacetimeFamily>,
        support: SupportClass,
        f: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, GeometryError> {
        Self::new(family, 1, ScalarKind::Real, support, move |t, x| Ok(FieldValue::real(f(t, x))))
    }

    /// A complex field with `n` components.
    pub fn complex(
        family: Arc<SpacetimeFamily>,
        components: usize,
        support: SupportClass,
        f: impl Fn(f64, &[f64]) -> FieldValue + Send + Sync + 'static,
    ) -> Result<Self, GeometryError> {
        Self::new(family, components, ScalarKind::Complex, support, move |t, x| Ok(f(t, x)))
    }

    pub fn zero(
        family: Arc<SpacetimeFamily>,
        components: usize,
        kind: ScalarKind,
        support: SupportClass,
    ) -> Result<Self, GeometryError> {
        Self::new(family, components, kind, support, move |_, _| Ok(FieldValue::zeros(components)))
    }

    pub fn family(&self) -> &Arc<SpacetimeFamily> {
        &self.family
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn support(&self) -> &SupportClass {
        &self.support
    }

    pub(crate) fn eval_fn(&self) -> &EvalFn {
        &self.eval
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> Result<FieldValue, GeometryError> {
        let v = (self.eval)(t, x)?;
        if v.len() != self.components {
            return Err(GeometryError::FieldMismatch(format!(
                "evaluation returned {} components, expected {}",
                v.len(),
                self.components
            )));
        }
        if !v.is_finite() {
            return Err(GeometryError::NonFinite { t, x: point(x) });
        }
        Ok(v)
    }

    /// Same values with a different declared support.
    pub fn with_support(&self, support: SupportClass) -> Result<Self, GeometryError> {
        support.validate(&self.family)?;
        Ok(Self { support, ..self.clone() })
    }

    fn check_compatible(&self, other: &FieldConfiguration) -> Result<(), GeometryError> {
        if !Arc::ptr_eq(&self.family, &other.family) {
            return Err(GeometryError::FieldMismatch("fields live on different families".into()));
        }
        if self.components != other.components {
            return Err(GeometryError::FieldMismatch(format!(
                "component counts differ: {} vs {}",
                self.components, other.components
            )));
        }
        Ok(())
    }

    /// `a·self + b·other`, supported on the union of the supports.
    pub fn linear_combination(&self, a: Complex64, other: &FieldConfiguration, b: Complex64) -> Result<Self, GeometryError> {
        self.check_compatible(other)?;
        let kind = if self.kind == ScalarKind::Real && other.kind == ScalarKind::Real && a.im == 0.0 && b.im == 0.0 {
            ScalarKind::Real
        } else {
            ScalarKind::Complex
        };
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Self::new(self.family.clone(), self.components, kind, self.support.union(&other.support), move |t, x| {
            Ok(f(t, x)?.scale(a) + g(t, x)?.scale(b))
        })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let f = self.eval.clone();
        let kind = if c.im == 0.0 { self.kind } else { ScalarKind::Complex };
        Self { kind, eval: Arc::new(move |t, x| Ok(f(t, x)?.scale(c))), ..self.clone() }
    }

    /// `(g ∘ π) · φ` for a real base function `g`.
    pub fn times_base_function(&self, g: BaseFn) -> Self {
        let f = self.eval.clone();
        Self { eval: Arc::new(move |t, x| Ok(f(t, x)? * g(x))), ..self.clone() }
    }

    /// Largest `|φ|` at sample points outside the declared support region.
    pub fn support_violation(&self) -> Result<f64, GeometryError> {
        let mut worst = 0.0f64;
        for (t, x) in self.family.sample_points() {
            if !self.support.contains(t, &x) {
                worst = worst.max(self.eval(t, &x)?.norm_inf());
            }
        }
        Ok(worst)
    }

    /// `max |self - other|` over the given sample points.
    pub fn max_distance(&self, other: &FieldConfiguration, points: &[(f64, Point)]) -> Result<f64, GeometryError> {
        let mut worst = 0.0f64;
        for (t, x) in points {
            let d = self.eval(*t, x)?.distance(&other.eval(*t, x)?);
            worst = worst.max(d);
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BaseDomain;

    fn family() -> Arc<SpacetimeFamily> {
        SpacetimeFamily::constant(BaseDomain::interval(0.0, 1.0, 3).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn evaluation_is_pure() {
        let f = FieldConfiguration::real(family(), SupportClass::Unrestricted, |t, x| (t * x[0]).sin()).unwrap();
        let a = f.eval(0.3, &[0.7]).unwrap();
        let b = f.eval(0.3, &[0.7]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unordered_compact_support_is_rejected() {
        let err = FieldConfiguration::zero(family(), 1, ScalarKind::Real, SupportClass::compact(1.0, -1.0)).unwrap_err();
        assert!(matches!(err, GeometryError::UnorderedSupport { .. }));
    }

    #[test]
    fn union_of_supports() {
        let a = SupportClass::compact(-1.0, 0.0);
        let b = SupportClass::compact(0.5, 2.0);
        let u = a.union(&b);
        assert_eq!(u.kind(), SupportKind::Compact);
        assert_eq!(u.lower(&[0.0]), Some(-1.0));
        assert_eq!(u.upper(&[0.0]), Some(2.0));
        let c = SupportClass::PastCompact(Section::constant(3.0));
        let v = a.union(&c);
        assert_eq!(v.kind(), SupportKind::PastCompact);
        assert_eq!(v.lower(&[0.0]), Some(-1.0));
    }

    #[test]
    fn support_violation_detects_leaks() {
        let fam = family();
        let good = FieldConfiguration::real(fam.clone(), SupportClass::compact(-1.0, 1.0), |t, _| {
            if t.abs() < 1.0 { 1.0 - t * t } else { 0.0 }
        })
        .unwrap();
        assert_eq!(good.support_violation().unwrap(), 0.0);
        let bad = good.with_support(SupportClass::compact(-0.5, 0.5)).unwrap();
        assert!(bad.support_violation().unwrap() > 0.1);
    }

    #[test]
    fn combinations_require_the_same_family() {
        let a = FieldConfiguration::zero(family(), 1, ScalarKind::Real, SupportClass::Unrestricted).unwrap();
        let b = FieldConfiguration::zero(family(), 1, ScalarKind::Real, SupportClass::Unrestricted).unwrap();
        assert!(a.linear_combination(Complex64::new(1.0, 0.0), &b, Complex64::new(1.0, 0.0)).is_err());
    }
}
