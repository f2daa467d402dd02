use std::sync::Arc;

use aqft1d::bump::Bump;
use aqft1d::geometry::{BaseDomain, BaseMapping, FamilyMorphism, SpacetimeFamily, TimeWindow};
use aqft1d::green::VerticalOperator;
use aqft1d::models::{
    ip_from_spacetime, poisson_from_spacetime, pullback_coherence_check, pushforward_observables, smoothness_probe, u1_action,
    BosonicModel, FermionicModel, Model, ModelError, TestFamily,
};
use num_complex::Complex64;

/// `sin(−2)·C(1, 0.1)²` for unit bumps of radius 0.1 at 0 and 2, m = 1.
const TAU_12: f64 = -0.907_860_673_001_836_6;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn line(rho: f64) -> Arc<SpacetimeFamily> {
    SpacetimeFamily::constant(BaseDomain::interval(-1.0, 1.0, 3).unwrap(), rho).unwrap()
}

fn two_bumps(family: &Arc<SpacetimeFamily>) -> TestFamily {
    TestFamily::new(vec![Bump::unit(0.0, 0.1).field(family.clone()).unwrap(), Bump::unit(2.0, 0.1).field(family.clone()).unwrap()])
        .unwrap()
}

#[test]
fn tau_matches_oracle() {
    let family = line(1.0);
    let w = poisson_from_spacetime(family.clone(), Arc::new(|_| 1.0), &two_bumps(&family), &[0.0]).unwrap();
    assert!((w.tau(0, 1) - TAU_12).abs() < 1e-7, "{}", w.tau(0, 1));
    assert_eq!(w.tau(0, 0), 0.0);
}

#[test]
fn tau_vanishes_on_equation_of_motion_image() {
    let family = line(1.0);
    let op = VerticalOperator::klein_gordon_constant(family.clone(), 1.0).unwrap();
    let psi = Bump::unit(1.0, 0.5).field(family.clone()).unwrap();
    let tests = TestFamily::new(vec![Bump::unit(0.0, 0.3).field(family.clone()).unwrap(), op.apply(&psi).unwrap()]).unwrap();
    let model = BosonicModel::new(op, tests).unwrap();
    let raw = model.raw_tau(&[0.0]).unwrap();
    assert!(raw[0][1].abs() < 1e-7 && raw[1][0].abs() < 1e-7, "{raw:?}");
}

#[test]
fn dirac_pairing_of_star_pair() {
    let family = line(1.0);
    let tests = TestFamily::new(vec![Bump::unit(0.0, 0.1).spinor(family.clone(), c(1.0, 0.0), c(0.0, 0.0)).unwrap()]).unwrap();
    let model = FermionicModel::new(family.clone(), tests.clone()).unwrap();
    assert_eq!(model.added(), 1);
    assert_eq!(model.involution(), &[1, 0]);
    let v = ip_from_spacetime(family, &tests, &[0.0]).unwrap();
    assert_eq!(v.pairing(0, 0), c(0.0, 0.0));
    assert!((v.pairing(0, 1) - c(-1.0, 0.0)).norm() < 1e-12, "{}", v.pairing(0, 1));
}

#[test]
fn dirac_pairing_kills_operator_image() {
    let family = line(1.0);
    let op = VerticalOperator::dirac(family.clone());
    let chi = Bump::unit(0.5, 0.4).spinor(family.clone(), c(1.0, 0.5), c(0.0, 0.0)).unwrap();
    let tests = TestFamily::new(vec![
        Bump::unit(0.0, 0.2).spinor(family.clone(), c(1.0, 0.0), c(0.0, 0.0)).unwrap(),
        op.apply(&chi).unwrap(),
    ])
    .unwrap();
    let model = FermionicModel::new(family, tests).unwrap();
    let b = model.raw_pairing(&[0.0]).unwrap();
    let worst = (0..model.tests().len()).map(|i| b[i][1].norm().max(b[1][i].norm())).fold(0.0, f64::max);
    assert!(worst < 1e-7, "{worst}");
}

#[test]
fn translation_pushforward_preserves_tau() {
    let source = line(1.0);
    let window = TimeWindow { lo: -3.0, hi: 6.0, samples: 41 };
    let target = SpacetimeFamily::builder(source.base().clone()).fiber(|_| -3.0, |_| 6.0).window(window).build().unwrap();
    let f = FamilyMorphism::translation(source.clone(), target.clone(), 1.0).unwrap();
    let model = Model::from(BosonicModel::with_mass(source.clone(), Arc::new(|_| 1.0), two_bumps(&source)).unwrap());
    let m = pushforward_observables(&f, &model, &[0.0]).unwrap();
    assert_eq!(m.matrix()[0][0], c(1.0, 0.0));
    let id = pushforward_observables(&FamilyMorphism::identity(source.clone()), &model, &[0.0]).unwrap();
    assert_eq!(id.distance(&aqft1d::quantize::AlgebraMorphism::identity(id.source())), 0.0);
}

#[test]
fn non_isometric_embedding_is_rejected() {
    let source = line(1.0);
    let target = line(2.0);
    let f = FamilyMorphism::translation(source.clone(), target, 0.0).unwrap();
    let model = Model::from(BosonicModel::with_mass(source.clone(), Arc::new(|_| 1.0), two_bumps(&source)).unwrap());
    assert!(matches!(pushforward_observables(&f, &model, &[0.0]), Err(ModelError::Precondition(_))));
}

#[test]
fn pullback_coherence_for_squared_base_map() {
    let base = BaseDomain::interval(0.0, 1.0, 3).unwrap();
    let family = SpacetimeFamily::builder(base.clone()).density(|_, x| 1.0 + 0.2 * x[0]).build().unwrap();
    let tests = TestFamily::new(vec![Bump::unit(-0.5, 0.3).field(family.clone()).unwrap(), Bump::unit(0.5, 0.3).field(family.clone()).unwrap()])
        .unwrap();
    let model = Model::from(BosonicModel::with_mass(family, Arc::new(|x| 1.0 + 0.1 * x[0]), tests).unwrap());
    for h in [BaseMapping::identity(base.clone()), BaseMapping::constant(base.clone(), &[0.5]), BaseMapping::new(base.clone(), |x| vec![x[0] * x[0]].into())] {
        let r = pullback_coherence_check(&h, &model, 1e-7);
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn phase_action_on_chiral_generators() {
    let family = line(1.0);
    let tests = TestFamily::new(vec![Bump::unit(0.0, 0.2).spinor(family.clone(), c(1.0, 0.0), c(0.0, 0.0)).unwrap()]).unwrap();
    let model = FermionicModel::new(family, tests).unwrap();
    let g = u1_action(|_| c(0.0, 1.0), &model, &[0.0]).unwrap();
    assert_eq!(g.matrix()[0][0], c(0.0, 1.0));
    assert_eq!(g.matrix()[1][1], c(0.0, -1.0));
    assert!(matches!(u1_action(|_| c(2.0, 0.0), &model, &[0.0]), Err(ModelError::NotUnimodular { .. })));
}

#[test]
fn tau_is_smooth_in_mass() {
    let family = line(1.0);
    let tests = two_bumps(&family);
    let tau = |m: f64| -> Result<f64, ModelError> {
        Ok(poisson_from_spacetime(family.clone(), Arc::new(move |_| m), &tests, &[0.0])?.tau(0, 1))
    };
    let r = smoothness_probe(tau, 1.0, &[0.1, 0.05, 0.025]).unwrap();
    assert!(r.passed, "{r:?}");
}
