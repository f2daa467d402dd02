use std::sync::Arc;

use super::{FieldConfiguration, GeometryError, Section, SpacetimeFamily, SpacetimeFn};
use crate::diff;
use crate::value::FieldValue;

/// Default tolerance for the 1-form check `ρ′(f)·∂_t f = ρ`.
pub const EMBEDDING_TOLERANCE: f64 = 1e-8;

const SLOPE_STEP: f64 = 1e-3;

/// A fiberwise map `(t, x) ↦ (f(t, x), x)` between two families over the same base.
#[derive(Clone)]
pub struct FamilyMorphism {
    source: Arc<SpacetimeFamily>,
    target: Arc<SpacetimeFamily>,
    map: SpacetimeFn,
    inverse: Option<SpacetimeFn>,
}

impl std::fmt::Debug for FamilyMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FamilyMorphism").field("explicit_inverse", &self.inverse.is_some()).finish_non_exhaustive()
    }
}

/// Outcome of [`check_open_embedding`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingReport {
    pub monotone: bool,
    pub inside_target: bool,
    pub max_form_error: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

impl FamilyMorphism {
    pub fn new(
        source: Arc<SpacetimeFamily>,
        target: Arc<SpacetimeFamily>,
        map: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, GeometryError> {
        if source.base() != target.base() {
            return Err(GeometryError::FieldMismatch("a family morphism needs a common base".into()));
        }
        Ok(Self { source, target, map: Arc::new(map), inverse: None })
    }

    /// Supplies a closed-form inverse on the image instead of bisection.
    pub fn with_inverse(mut self, inverse: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    pub fn identity(family: Arc<SpacetimeFamily>) -> Self {
        Self { source: family.clone(), target: family, map: Arc::new(|t, _| t), inverse: Some(Arc::new(|s, _| s)) }
    }

    /// `t ↦ t + dt`.
    pub fn translation(source: Arc<SpacetimeFamily>, target: Arc<SpacetimeFamily>, dt: f64) -> Result<Self, GeometryError> {
        Ok(Self::new(source, target, move |t, _| t + dt)?.with_inverse(move |s, _| s - dt))
    }

    pub fn source(&self) -> &Arc<SpacetimeFamily> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SpacetimeFamily> {
        &self.target
    }

    pub fn apply(&self, t: f64, x: &[f64]) -> f64 {
        (self.map)(t, x)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &FamilyMorphism) -> Result<FamilyMorphism, GeometryError> {
        if !Arc::ptr_eq(&self.target, &next.source) {
            return Err(GeometryError::FieldMismatch("morphisms do not compose: target and source differ".into()));
        }
        let (f, g) = (self.map.clone(), next.map.clone());
        let inverse = match (&self.inverse, &next.inverse) {
            (Some(fi), Some(gi)) => {
                let (fi, gi) = (fi.clone(), gi.clone());
                Some(Arc::new(move |s: f64, x: &[f64]| fi(gi(s, x), x)) as SpacetimeFn)
            }
            _ => None,
        };
        Ok(FamilyMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            map: Arc::new(move |t, x| g(f(t, x), x)),
            inverse,
        })
    }

    /// The source time mapped to `s`, or `None` when `s` is outside the image.
    pub fn preimage(&self, s: f64, x: &[f64]) -> Option<f64> {
        if let Some(inv) = &self.inverse {
            let t = inv(s, x);
            return self.source.in_fiber(t, x).then_some(t);
        }
        let (lo, hi) = self.source.fiber(x);
        let f = |t: f64| (self.map)(t, x);
        let start = if lo < 0.0 && 0.0 < hi {
            0.0
        } else if lo.is_finite() && hi.is_finite() {
            0.5 * (lo + hi)
        } else if lo.is_finite() {
            lo + 1.0
        } else {
            hi - 1.0
        };
        let (mut a, mut b) = (start, start);
        let mut step = 1.0;
        while f(a) > s {
            if a <= lo {
                return None;
            }
            a = (start - step).max(lo);
            step *= 2.0;
            if !step.is_finite() {
                return None;
            }
        }
        step = 1.0;
        while f(b) < s {
            if b >= hi {
                return None;
            }
            b = (start + step).min(hi);
            step *= 2.0;
            if !step.is_finite() {
                return None;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if f(mid) < s {
                a = mid;
            } else {
                b = mid;
            }
        }
        let t = 0.5 * (a + b);
        self.source.in_fiber(t, x).then_some(t)
    }

    /// Extension by zero: `f_*φ = φ ∘ f⁻¹` on the image and `0` elsewhere.
    pub fn push_field(&self, field: &FieldConfiguration) -> Result<FieldConfiguration, GeometryError> {
        if !Arc::ptr_eq(field.family(), &self.source) {
            return Err(GeometryError::FieldMismatch("field does not live on the morphism's source".into()));
        }
        let this = self.clone();
        let push = |s: &Section| {
            let (sigma, f) = (s.as_fn().clone(), this.map.clone());
            Section::new(move |x| f(sigma(x), x))
        };
        let support = field.support().map_sections(push);
        let (eval, n) = (field.eval_fn().clone(), field.components());
        FieldConfiguration::from_eval_fn(
            self.target.clone(),
            n,
            field.kind(),
            support,
            Arc::new(move |s, x| match this.preimage(s, x) {
                Some(t) => eval(t, x),
                None => Ok(FieldValue::zeros(n)),
            }),
        )
    }
}

/// Checks that `f` is a fiberwise open embedding preserving `E = ρ dt`.
///
/// On every base sample the sampled times must map strictly increasingly
/// into the target fiber, and `ρ′(f(t, x), x)·∂_t f(t, x) = ρ(t, x)` must hold
/// within `tol`.
pub fn check_open_embedding(f: &FamilyMorphism, tol: f64) -> EmbeddingReport {
    let mut monotone = true;
    let mut inside_target = true;
    let mut max_form_error = 0.0f64;
    let mut samples = 0;
    for x in f.source.base().samples() {
        let mut previous: Option<f64> = None;
        for t in f.source.sample_times(&x) {
            samples += 1;
            let s = f.apply(t, &x);
            if previous.is_some_and(|p| !(s > p)) {
                monotone = false;
            }
            previous = Some(s);
            if !f.target.in_fiber(s, &x) {
                inside_target = false;
                continue;
            }
            let slope: Result<f64, ()> = diff::first(|u| Ok(f.apply(u, &x)), t, SLOPE_STEP);
            let form = f.target.density(s, &x) * slope.unwrap_or(f64::NAN);
            let error = (form - f.source.density(t, &x)).abs();
            max_form_error = if error.is_nan() { f64::INFINITY } else { max_form_error.max(error) };
        }
    }
    EmbeddingReport {
        monotone,
        inside_target,
        max_form_error,
        tolerance: tol,
        samples,
        passed: monotone && inside_target && max_form_error <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BaseDomain, SupportClass};

    fn base() -> BaseDomain {
        BaseDomain::interval(0.0, 1.0, 3).unwrap()
    }

    #[test]
    fn identity_and_translation_pass() {
        let fam = SpacetimeFamily::builder(base()).density(|t, x| 1.0 + 0.2 * x[0] + 0.1 * t * t).build().unwrap();
        assert!(check_open_embedding(&FamilyMorphism::identity(fam), EMBEDDING_TOLERANCE).passed);
        let a = SpacetimeFamily::constant(base(), 1.0).unwrap();
        let b = SpacetimeFamily::constant(base(), 1.0).unwrap();
        let shift = FamilyMorphism::translation(a, b, 1.0).unwrap();
        let report = check_open_embedding(&shift, EMBEDDING_TOLERANCE);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn folding_map_fails() {
        let fam = SpacetimeFamily::builder(base()).fiber(|_| -1.0, |_| 1.0).build().unwrap();
        let fold = FamilyMorphism::new(fam.clone(), fam, |t, _| t * t).unwrap();
        let report = check_open_embedding(&fold, EMBEDDING_TOLERANCE);
        assert!(!report.monotone && !report.passed);
    }

    #[test]
    fn stretching_breaks_the_form() {
        let a = SpacetimeFamily::constant(base(), 1.0).unwrap();
        let b = SpacetimeFamily::constant(base(), 1.0).unwrap();
        let stretch = FamilyMorphism::new(a, b, |t, _| 2.0 * t).unwrap();
        let report = check_open_embedding(&stretch, EMBEDDING_TOLERANCE);
        assert!(report.monotone && !report.passed);
        assert!((report.max_form_error - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bisection_preimage_and_extension_by_zero() {
        let small = SpacetimeFamily::builder(base()).fiber(|_| -1.0, |_| 1.0).build().unwrap();
        let line = SpacetimeFamily::constant(base(), 1.0).unwrap();
        let f = FamilyMorphism::new(small.clone(), line, |t, x| t + x[0]).unwrap();
        assert!((f.preimage(0.7, &[0.5]).unwrap() - 0.2).abs() < 1e-14);
        assert_eq!(f.preimage(3.0, &[0.5]), None);
        let phi = FieldConfiguration::real(small, SupportClass::compact(-0.5, 0.5), |t, _| (1.0 - 4.0 * t * t).max(0.0)).unwrap();
        let pushed = f.push_field(&phi).unwrap();
        assert_eq!(pushed.support().lower(&[1.0]), Some(0.5));
        assert!((pushed.eval(1.0, &[1.0]).unwrap()[0].re - 1.0).abs() < 1e-12);
        assert_eq!(pushed.eval(5.0, &[1.0]).unwrap()[0].re, 0.0);
    }

    #[test]
    fn composition_of_translations() {
        let a = SpacetimeFamily::constant(base(), 1.0).unwrap();
        let b = SpacetimeFamily::constant(base(), 1.0).unwrap();
        let c = SpacetimeFamily::constant(base(), 1.0).unwrap();
        let f = FamilyMorphism::translation(a, b.clone(), 1.0).unwrap();
        let g = FamilyMorphism::translation(b, c, 0.5).unwrap();
        let gf = f.then(&g).unwrap();
        assert_eq!(gf.apply(0.0, &[0.0]), 1.5);
        assert_eq!(gf.preimage(1.5, &[0.0]), Some(0.0));
    }
}
