use std::sync::Arc;

use super::{point, BaseDomain, BaseMap, FieldConfiguration, GeometryError, Point, Section, SpacetimeFamily};

/// A smooth map `h: U′ → U` from a new base box into an old one.
#[derive(Clone)]
pub struct BaseMapping {
    domain: BaseDomain,
    map: BaseMap,
}

impl std::fmt::Debug for BaseMapping {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BaseMapping").field("domain", &self.domain).finish_non_exhaustive()
    }
}

impl BaseMapping {
    pub fn new(domain: BaseDomain, map: impl Fn(&[f64]) -> Point + Send + Sync + 'static) -> Self {
        Self { domain, map: Arc::new(map) }
    }

    pub fn identity(domain: BaseDomain) -> Self {
        Self::new(domain, point)
    }

    /// The constant map onto `x0`, restricting to a single fiber.
    pub fn constant(domain: BaseDomain, x0: &[f64]) -> Self {
        let x0 = point(x0);
        Self::new(domain, move |_| x0.clone())
    }

    pub fn domain(&self) -> &BaseDomain {
        &self.domain
    }

    pub fn apply(&self, x: &[f64]) -> Point {
        (self.map)(x)
    }

    /// `self ∘ inner`, defined on `inner`'s domain.
    pub fn after(&self, inner: &BaseMapping) -> BaseMapping {
        let (outer, first) = (self.map.clone(), inner.map.clone());
        BaseMapping { domain: inner.domain.clone(), map: Arc::new(move |x| outer(&first(x))) }
    }

    /// Checks that every sampled point of the domain lands in `target`.
    pub fn check_into(&self, target: &BaseDomain) -> Result<(), GeometryError> {
        for x in self.domain.samples() {
            let y = self.apply(&x);
            if y.len() != target.dimension() || !target.contains(&y) {
                return Err(GeometryError::MapLeavesBase { from: x, to: y });
            }
        }
        Ok(())
    }

    fn pull_section(&self, s: &Section) -> Section {
        let (sigma, h) = (s.as_fn().clone(), self.map.clone());
        Section::new(move |x| sigma(&h(x)))
    }

    /// The pulled-back family `h*M` with fibers and density composed with `h`.
    pub fn pull_family(&self, family: &SpacetimeFamily) -> Result<Arc<SpacetimeFamily>, GeometryError> {
        self.check_into(family.base())?;
        let (lo, hi) = family.fiber_fns();
        let (lo, hi, rho) = (lo.clone(), hi.clone(), family.density_fn().clone());
        let (h1, h2, h3) = (self.map.clone(), self.map.clone(), self.map.clone());
        SpacetimeFamily::from_parts(
            self.domain.clone(),
            Arc::new(move |x| lo(&h1(x))),
            Arc::new(move |x| hi(&h2(x))),
            Arc::new(move |t, x| rho(t, &h3(x))),
            family.window(),
            family.quadrature(),
        )
    }

    /// Pulls `field` back onto an already pulled-back family.
    pub fn pull_field_onto(
        &self,
        field: &FieldConfiguration,
        target: &Arc<SpacetimeFamily>,
    ) -> Result<FieldConfiguration, GeometryError> {
        let (f, h) = (field.eval_fn().clone(), self.map.clone());
        let support = field.support().map_sections(|s| self.pull_section(s));
        FieldConfiguration::from_eval_fn(
            target.clone(),
            field.components(),
            field.kind(),
            support,
            Arc::new(move |t, x| f(t, &h(x))),
        )
    }

    /// Pulls several fields on one family back onto a single shared family.
    pub fn pull_fields(&self, fields: &[FieldConfiguration]) -> Result<Vec<FieldConfiguration>, GeometryError> {
        let Some(first) = fields.first() else {
            return Ok(Vec::new());
        };
        let target = self.pull_family(first.family())?;
        fields.iter().map(|f| self.pull_field_onto(f, &target)).collect()
    }
}

/// `h*φ`, evaluating as `φ(t, h(x′))` with support sections `σ ∘ h`.
pub fn restrict_field(field: &FieldConfiguration, h: &BaseMapping) -> Result<FieldConfiguration, GeometryError> {
    let target = h.pull_family(field.family())?;
    h.pull_field_onto(field, &target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SupportClass;

    fn unit() -> BaseDomain {
        BaseDomain::interval(0.0, 1.0, 5).unwrap()
    }

    fn xt_field() -> FieldConfiguration {
        let fam = SpacetimeFamily::constant(unit(), 1.0).unwrap();
        FieldConfiguration::real(fam, SupportClass::Unrestricted, |t, x| x[0] * t).unwrap()
    }

    #[test]
    fn identity_and_constant_maps() {
        let f = xt_field();
        let id = restrict_field(&f, &BaseMapping::identity(unit())).unwrap();
        for (t, x) in f.family().sample_points() {
            assert_eq!(id.eval(t, &x).unwrap(), f.eval(t, &x).unwrap());
        }
        let c = restrict_field(&f, &BaseMapping::constant(BaseDomain::point(), &[0.25])).unwrap();
        assert_eq!(c.eval(2.0, &[]).unwrap()[0].re, 0.5);
    }

    #[test]
    fn squaring_map() {
        let h = BaseMapping::new(unit(), |x| point(&[x[0] * x[0]]));
        let g = restrict_field(&xt_field(), &h).unwrap();
        assert_eq!(g.eval(2.0, &[0.5]).unwrap()[0].re, 0.5);
    }

    #[test]
    fn leaving_the_box_is_an_error() {
        let h = BaseMapping::new(unit(), |x| point(&[x[0] + 0.5]));
        assert!(matches!(restrict_field(&xt_field(), &h), Err(GeometryError::MapLeavesBase { .. })));
    }

    #[test]
    fn support_sections_pull_back() {
        let fam = SpacetimeFamily::constant(unit(), 1.0).unwrap();
        let support = SupportClass::PastCompact(Section::new(|x| x[0]));
        let f = FieldConfiguration::zero(fam, 1, crate::geometry::ScalarKind::Real, support).unwrap();
        let h = BaseMapping::new(unit(), |x| point(&[1.0 - x[0]]));
        let g = restrict_field(&f, &h).unwrap();
        assert_eq!(g.support().lower(&[0.25]), Some(0.75));
    }

    #[test]
    fn restriction_is_functorial() {
        let f = xt_field();
        let h = BaseMapping::new(unit(), |x| point(&[x[0] * x[0]]));
        let h2 = BaseMapping::new(unit(), |x| point(&[0.5 * (x[0] + 1.0)]));
        let twice = restrict_field(&restrict_field(&f, &h).unwrap(), &h2).unwrap();
        let once = restrict_field(&f, &h.after(&h2)).unwrap();
        for (t, x) in once.family().sample_points() {
            let d = twice.eval(t, &x).unwrap().distance(&once.eval(t, &x).unwrap());
            assert!(d <= 1e-12);
        }
    }
}
