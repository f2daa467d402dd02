use std::sync::Arc;

use aqft1d::quantize::checks::{algebra_suite, random_element, random_parent};
use aqft1d::quantize::{parse_element, AlgebraElement, IPSpace, Parent, PoissonSpace};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::SmallRng;
use rand::SeedableRng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn suite_passes() {
    for r in algebra_suite(7, 200) {
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn ccr_word_221_matches_hand_reduction() {
    // w2 w2 w1 = w1 w2 w2 − 2i w2 when τ12 = 1.
    let p = Arc::new(Parent::Ccr(PoissonSpace::from_matrix(&[vec![0.0, 1.0], vec![-1.0, 0.0]], 0.0).unwrap()));
    let a = AlgebraElement::normal_form(&p, &[1, 1, 0], c(1.0, 0.0)).unwrap();
    assert_eq!(a.to_string(), "i*-2 * w2 + 1 * w1 w2^2");
}

#[test]
fn car_square_and_anticommutator() {
    let b = vec![vec![c(2.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]];
    let p = Arc::new(Parent::Car(IPSpace::new(vec![0, 1], b, 0.0).unwrap()));
    assert_eq!(AlgebraElement::normal_form(&p, &[0, 0], c(1.0, 0.0)).unwrap(), AlgebraElement::unit(&p));
    let b = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
    let p = Arc::new(Parent::Car(IPSpace::new(vec![1, 0], b, 0.0).unwrap()));
    let v1 = parse_element(&p, "v1").unwrap();
    let v2 = parse_element(&p, "v2").unwrap();
    assert_eq!(v1.anticommutator(&v2).unwrap().to_string(), "1 * 1");
    assert_eq!(v1.star(), v2);
}

proptest! {
    #[test]
    fn products_are_associative(seed in any::<u64>()) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let p = random_parent(&mut rng);
        let [a, b, c] = [(); 3].map(|_| random_element(&mut rng, &p));
        prop_assert_eq!(a.multiply(&b).unwrap().multiply(&c).unwrap(), a.multiply(&b.multiply(&c).unwrap()).unwrap());
    }

    #[test]
    fn star_reverses_products(seed in any::<u64>()) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let p = random_parent(&mut rng);
        let (a, b) = (random_element(&mut rng, &p), random_element(&mut rng, &p));
        prop_assert_eq!(a.multiply(&b).unwrap().star(), b.star().multiply(&a.star()).unwrap());
        prop_assert_eq!(a.star().star(), a);
    }

    #[test]
    fn rendering_roundtrips(seed in any::<u64>()) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let p = random_parent(&mut rng);
        let a = random_element(&mut rng, &p);
        prop_assert_eq!(parse_element(&p, &a.to_string()).unwrap(), a);
    }
}
