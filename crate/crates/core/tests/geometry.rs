use std::sync::Arc;

use aqft1d::bump::{Bump, BUMP_MASS};
use aqft1d::geometry::{
    glue_fields, inverse_proper_time, proper_time, restrict_field, BaseDomain, BaseMapping, Section, SpacetimeFamily, TimeWindow,
};
use proptest::prelude::*;

fn wavy() -> Arc<SpacetimeFamily> {
    SpacetimeFamily::builder(BaseDomain::interval(0.0, 1.0, 3).unwrap())
        .fiber(|_| -4.0, |_| 4.0)
        .density(|t, x| 1.0 + 0.2 * x[0] + 0.3 * t.sin())
        .window(TimeWindow { lo: -4.0, hi: 4.0, samples: 41 })
        .build()
        .unwrap()
}

#[test]
fn bump_normalization() {
    let b = Bump::unit(0.3, 0.25);
    assert!((BUMP_MASS - 0.443_993_816_168_079_4).abs() < 1e-16);
    let n = 4000;
    let h = (b.upper() - b.lower()) / n as f64;
    let total: f64 = (0..n).map(|k| b.eval(b.lower() + (k as f64 + 0.5) * h) * h).sum();
    assert!((total - 1.0).abs() < 1e-9, "{total}");
}

#[test]
fn proper_time_of_sine_density() {
    let fam = wavy();
    let anchor = Section::constant(0.0);
    // ∫₀ᵗ (1.1 + 0.3 sin s) ds at x = 0.5.
    for &t in &[-3.0, -0.5, 1.0, 3.5] {
        let expected = 1.1 * t + 0.3 * (1.0 - f64::cos(t));
        let got = proper_time(&fam, t, &[0.5], &anchor).unwrap();
        assert!((got - expected).abs() < 1e-10, "{t}: {got} vs {expected}");
    }
}

#[test]
fn restriction_then_glue_recovers_the_field() {
    let fam = wavy();
    let phi = Bump::unit(0.5, 0.7).field(fam.clone()).unwrap();
    let halves = [BaseDomain::interval(0.0, 0.6, 3).unwrap(), BaseDomain::interval(0.4, 1.0, 3).unwrap()];
    let locals: Vec<_> = halves.iter().map(|d| restrict_field(&phi, &BaseMapping::identity(d.clone())).unwrap()).collect();
    let glued = glue_fields(&halves, &locals, 1e-12).unwrap();
    for &x in &[0.0, 0.3, 0.5, 0.9] {
        for &t in &[-0.1, 0.5, 1.1] {
            assert_eq!(glued.eval(t, &[x]).unwrap(), phi.eval(t, &[x]).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn inverse_proper_time_roundtrips(t in -3.9f64..3.9, x in 0.0f64..1.0, a in -1.0f64..1.0) {
        let fam = wavy();
        let anchor = Section::constant(a);
        let big_t = proper_time(&fam, t, &[x], &anchor).unwrap();
        let back = inverse_proper_time(&fam, big_t, &[x], &anchor).unwrap();
        prop_assert!((back - t).abs() < 1e-10);
    }

    #[test]
    fn proper_time_is_additive(a in -3.0f64..3.0, b in -3.0f64..3.0, x in 0.0f64..1.0) {
        let fam = wavy();
        let whole = proper_time(&fam, b, &[x], &Section::constant(-3.5)).unwrap();
        let parts = proper_time(&fam, a, &[x], &Section::constant(-3.5)).unwrap() + proper_time(&fam, b, &[x], &Section::constant(a)).unwrap();
        prop_assert!((whole - parts).abs() < 1e-10);
    }
}
