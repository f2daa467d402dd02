use std::sync::Arc;

use super::{point, BaseDomain, FieldConfiguration, GeometryError, ScalarKind, Section, SpacetimeFamily, SupportClass, SupportKind};

type Locator = Arc<dyn Fn(&[f64]) -> Option<usize> + Send + Sync>;

/// Glues local fields over a cover of boxes into one field.
///
/// Every pair of locals is compared on the sampled overlap of their boxes:
/// field values, densities and fiber ends must agree within `tol`. The glued
/// field lives over the bounding box of the cover and evaluates through the
/// first cover box containing the base point.
pub fn glue_fields(cover: &[BaseDomain], locals: &[FieldConfiguration], tol: f64) -> Result<FieldConfiguration, GeometryError> {
    if cover.is_empty() || cover.len() != locals.len() {
        return Err(GeometryError::InvalidCover(format!(
            "need one local field per cover box, got {} boxes and {} fields",
            cover.len(),
            locals.len()
        )));
    }
    for (i, (b, f)) in cover.iter().zip(locals).enumerate() {
        let base = f.family().base();
        if base.lo() != b.lo() || base.hi() != b.hi() {
            return Err(GeometryError::InvalidCover(format!("field {i} is not defined over cover box {i}")));
        }
        if f.components() != locals[0].components() {
            return Err(GeometryError::FieldMismatch(format!("field {i} has a different component count")));
        }
    }

    let global = bounding_box(cover)?;
    let boxes: Vec<BaseDomain> = cover.to_vec();
    let locate: Locator = Arc::new(move |x| boxes.iter().position(|b| b.contains(x)));
    for x in global.samples() {
        if locate(&x).is_none() {
            return Err(GeometryError::CoverGap { x });
        }
    }

    let mut worst: Option<(f64, f64, super::Point)> = None;
    for i in 0..cover.len() {
        for j in i + 1..cover.len() {
            let Some(xs) = cover[i].overlap_samples(&cover[j]) else { continue };
            let (a, b) = (&locals[i], &locals[j]);
            for x in xs {
                let (alo, ahi) = a.family().fiber(&x);
                let (blo, bhi) = b.family().fiber(&x);
                let fiber_error = end_gap(alo, blo).max(end_gap(ahi, bhi));
                record(&mut worst, fiber_error, f64::NAN, &x);
                for t in a.family().sample_times(&x) {
                    if !b.family().in_fiber(t, &x) {
                        continue;
                    }
                    let rho = (a.family().density(t, &x) - b.family().density(t, &x)).abs();
                    let value = a.eval(t, &x)?.distance(&b.eval(t, &x)?);
                    record(&mut worst, rho.max(value), t, &x);
                }
            }
        }
    }
    if let Some((error, t, x)) = worst {
        if !(error <= tol) {
            return Err(GeometryError::Incompatible { error, t, x, tolerance: tol });
        }
    }

    let families: Vec<Arc<SpacetimeFamily>> = locals.iter().map(|f| f.family().clone()).collect();
    let family = glue_family(&global, &families, &locate)?;
    let support = glue_support(locals, &locate);
    let kind = if locals.iter().all(|f| f.kind() == ScalarKind::Real) { ScalarKind::Real } else { ScalarKind::Complex };
    let evals: Vec<_> = locals.iter().map(|f| f.eval_fn().clone()).collect();
    let loc = locate.clone();
    FieldConfiguration::from_eval_fn(
        family,
        locals[0].components(),
        kind,
        support,
        Arc::new(move |t, x| match loc(x) {
            Some(i) => evals[i](t, x),
            None => Err(GeometryError::CoverGap { x: point(x) }),
        }),
    )
}

fn end_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

fn record(worst: &mut Option<(f64, f64, super::Point)>, error: f64, t: f64, x: &[f64]) {
    let error = if error.is_nan() { f64::INFINITY } else { error };
    if worst.as_ref().is_none_or(|w| error > w.0) {
        *worst = Some((error, t, point(x)));
    }
}

fn bounding_box(cover: &[BaseDomain]) -> Result<BaseDomain, GeometryError> {
    let d = cover[0].dimension();
    if cover.iter().any(|b| b.dimension() != d) {
        return Err(GeometryError::InvalidCover("cover boxes have different dimensions".into()));
    }
    let mut lo = cover[0].lo().to_vec();
    let mut hi = cover[0].hi().to_vec();
    let mut grid = cover[0].grid().to_vec();
    for b in &cover[1..] {
        for k in 0..d {
            lo[k] = lo[k].min(b.lo()[k]);
            hi[k] = hi[k].max(b.hi()[k]);
            grid[k] = grid[k].max(b.grid()[k]);
        }
    }
    if d == 0 {
        return Ok(BaseDomain::point());
    }
    BaseDomain::new(lo, hi, grid)
}

fn glue_family(global: &BaseDomain, families: &[Arc<SpacetimeFamily>], locate: &Locator) -> Result<Arc<SpacetimeFamily>, GeometryError> {
    let pick = |families: Vec<Arc<SpacetimeFamily>>, locate: Locator| move |x: &[f64]| families[locate(x).unwrap_or(0)].clone();
    let (p1, p2, p3) = (
        pick(families.to_vec(), locate.clone()),
        pick(families.to_vec(), locate.clone()),
        pick(families.to_vec(), locate.clone()),
    );
    SpacetimeFamily::from_parts(
        global.clone(),
        Arc::new(move |x| p1(x).fiber(x).0),
        Arc::new(move |x| p2(x).fiber(x).1),
        Arc::new(move |t, x| p3(x).density(t, x)),
        families[0].window(),
        families[0].quadrature(),
    )
}

fn glue_support(locals: &[FieldConfiguration], locate: &Locator) -> SupportClass {
    let kind = locals[0].support().kind();
    if kind == SupportKind::Unrestricted || locals.iter().any(|f| f.support().kind() != kind) {
        return SupportClass::Unrestricted;
    }
    let piecewise = |get: fn(&SupportClass) -> Option<&Section>| {
        let sections: Vec<Section> = locals.iter().map(|f| get(f.support()).expect("same kind").clone()).collect();
        let locate = locate.clone();
        Section::new(move |x| sections[locate(x).unwrap_or(0)].eval(x))
    };
    match kind {
        SupportKind::PastCompact => SupportClass::PastCompact(piecewise(SupportClass::lower_section)),
        SupportKind::FutureCompact => SupportClass::FutureCompact(piecewise(SupportClass::upper_section)),
        SupportKind::Compact => SupportClass::Compact {
            lower: piecewise(SupportClass::lower_section),
            upper: piecewise(SupportClass::upper_section),
        },
        SupportKind::Unrestricted => SupportClass::Unrestricted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{restrict_field, BaseMapping};

    fn halves() -> Vec<BaseDomain> {
        vec![BaseDomain::interval(0.0, 0.6, 4).unwrap(), BaseDomain::interval(0.4, 1.0, 4).unwrap()]
    }

    fn local(b: &BaseDomain, offset: f64) -> FieldConfiguration {
        let fam = SpacetimeFamily::constant(b.clone(), 1.0).unwrap();
        FieldConfiguration::real(fam, SupportClass::Unrestricted, move |t, x| x[0] * t + offset).unwrap()
    }

    #[test]
    fn compatible_halves_glue() {
        let cover = halves();
        let locals: Vec<_> = cover.iter().map(|b| local(b, 0.0)).collect();
        let g = glue_fields(&cover, &locals, 1e-8).unwrap();
        for (t, x) in g.family().sample_points() {
            assert_eq!(g.eval(t, &x).unwrap()[0].re, x[0] * t);
        }
    }

    #[test]
    fn disagreement_is_reported() {
        let cover = halves();
        let locals = vec![local(&cover[0], 0.0), local(&cover[1], 1.0)];
        match glue_fields(&cover, &locals, 1e-8) {
            Err(GeometryError::Incompatible { error, .. }) => assert!((error - 1.0).abs() < 1e-12),
            other => panic!("expected incompatibility, got {other:?}"),
        }
    }

    #[test]
    fn noise_within_tolerance_is_accepted() {
        let cover = halves();
        let locals = vec![local(&cover[0], 0.0), local(&cover[1], 1e-12)];
        assert!(glue_fields(&cover, &locals, 1e-8).is_ok());
    }

    #[test]
    fn gaps_are_rejected() {
        let cover = vec![BaseDomain::interval(0.0, 0.4, 3).unwrap(), BaseDomain::interval(0.6, 1.0, 3).unwrap()];
        let locals: Vec<_> = cover.iter().map(|b| local(b, 0.0)).collect();
        assert!(matches!(glue_fields(&cover, &locals, 1e-8), Err(GeometryError::CoverGap { .. })));
    }

    #[test]
    fn descent_roundtrip() {
        let base = BaseDomain::interval(0.0, 1.0, 7).unwrap();
        let fam = SpacetimeFamily::builder(base).density(|t, x| 1.0 + 0.1 * x[0] * t * t).build().unwrap();
        let support = SupportClass::PastCompact(Section::new(|x| -2.0 + x[0]));
        let global = FieldConfiguration::real(fam, support, |t, x| (t - x[0]).sin() * (1.0 + x[0])).unwrap();
        let cover = halves();
        let locals: Vec<_> = cover
            .iter()
            .map(|b| {
                let lo = b.lo()[0];
                let h = BaseMapping::new(b.clone(), move |x| point(&[x[0].max(lo)]));
                restrict_field(&global, &h).unwrap()
            })
            .collect();
        let g = glue_fields(&cover, &locals, 1e-12).unwrap();
        assert_eq!(g.support().kind(), SupportKind::PastCompact);
        for (t, x) in global.family().sample_points() {
            assert!(g.eval(t, &x).unwrap().distance(&global.eval(t, &x).unwrap()) <= 1e-12);
            assert_eq!(g.family().density(t, &x), global.family().density(t, &x));
            assert_eq!(g.support().lower(&x), global.support().lower(&x));
        }
    }
}
