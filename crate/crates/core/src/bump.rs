//! Smooth compactly supported test functions and a smooth step.

use std::sync::Arc;

use num_complex::Complex64;

use crate::geometry::{FieldConfiguration, GeometryError, SpacetimeFamily, SupportClass};
use crate::value::FieldValue;

/// `∫_{-1}^{1} exp(-1/(1-u²)) du`.
pub const BUMP_MASS: f64 = 0.443_993_816_168_079_4;

/// `exp(-1/(1-u²))` on `(-1, 1)`, zero outside.
pub fn bump_profile(u: f64) -> f64 {
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// `0` for `u ≤ 0`, `1` for `u ≥ 1`, smooth and monotone between.
pub fn smooth_step(u: f64) -> f64 {
    let f = |v: f64| if v <= 0.0 { 0.0 } else { (-1.0 / v).exp() };
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = f(u);
        a / (a + f(1.0 - u))
    }
}

/// A rescaled bump supported on `(centre - radius, centre + radius)` with
/// `∫ φ dt = mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub centre: f64,
    pub radius: f64,
    pub mass: f64,
}

impl Bump {
    pub fn unit(centre: f64, radius: f64) -> Self {
        Self { centre, radius, mass: 1.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.mass * bump_profile((t - self.centre) / self.radius) / (self.radius * BUMP_MASS)
    }

    pub fn lower(&self) -> f64 {
        self.centre - self.radius
    }

    pub fn upper(&self) -> f64 {
        self.centre + self.radius
    }

    pub fn support(&self) -> SupportClass {
        SupportClass::compact(self.lower(), self.upper())
    }

    /// The real scalar field `φ(t, x) = bump(t)`.
    pub fn field(&self, family: Arc<SpacetimeFamily>) -> Result<FieldConfiguration, GeometryError> {
        let b = *self;
        FieldConfiguration::real(family, self.support(), move |t, _| b.eval(t))
    }

    /// The Dirac field `(a·bump, b·bump)`.
    pub fn spinor(&self, family: Arc<SpacetimeFamily>, a: Complex64, b: Complex64) -> Result<FieldConfiguration, GeometryError> {
        let bump = *self;
        FieldConfiguration::complex(family, 2, self.support(), move |t, _| {
            let v = bump.eval(t);
            FieldValue::pair(a * v, b * v)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{simpson, SimpsonSettings};

    #[test]
    fn profile_mass() {
        let settings = SimpsonSettings { tolerance: 1e-14, max_depth: 50 };
        let m = simpson(bump_profile, -1.0, 1.0, settings).unwrap().value;
        assert!((m - BUMP_MASS).abs() < 1e-13);
    }

    #[test]
    fn unit_bumps_integrate_to_one() {
        let settings = SimpsonSettings { tolerance: 1e-13, max_depth: 50 };
        for &(c, r) in &[(0.0, 0.1), (2.0, 0.5), (-1.0, 1.0)] {
            let b = Bump::unit(c, r);
            let m = simpson(|t| b.eval(t), b.lower(), b.upper(), settings).unwrap().value;
            assert!((m - 1.0).abs() < 1e-12, "{c} {r} {m}");
        }
    }

    #[test]
    fn smooth_step_shape() {
        assert_eq!(smooth_step(-0.5), 0.0);
        assert_eq!(smooth_step(1.5), 1.0);
        assert_eq!(smooth_step(0.5), 0.5);
        for k in 1..10 {
            let u = k as f64 / 10.0;
            assert!((smooth_step(u) + smooth_step(1.0 - u) - 1.0).abs() < 1e-15);
            assert!(smooth_step(u) > smooth_step(u - 0.1));
        }
    }
}
