use super::{point, GeometryError, Section, SpacetimeFamily};
use crate::quad::{simpson, SimpsonSettings};

/// Bisection stops once the bracket is this narrow (relative to `max(1, |t|)`).
pub const INVERSE_TOLERANCE: f64 = 1e-12;

/// `∫_from^to ρ(s, x) ds` with the family's quadrature settings.
pub fn proper_time_between(
    family: &SpacetimeFamily,
    from: f64,
    to: f64,
    x: &[f64],
    settings: SimpsonSettings,
) -> Result<f64, GeometryError> {
    let rho = family.density_fn();
    Ok(simpson(|s| rho(s, x), from, to, settings)?.value)
}

/// The proper time `T(t, x) = ∫_{σ(x)}^t ρ(s, x) ds` measured from an anchor
/// section.
///
/// `T` is strictly increasing in `t` because `ρ > 0`, and vanishes on the
/// anchor.
pub fn proper_time(family: &SpacetimeFamily, t: f64, x: &[f64], anchor: &Section) -> Result<f64, GeometryError> {
    family.check_in_fiber(t, x)?;
    let a = anchor.eval(x);
    family.check_in_fiber(a, x)?;
    proper_time_between(family, a, t, x, family.quadrature())
}

/// Inverts [`proper_time`] in `t` by bisection.
///
/// The bracket is found by doubling steps away from the anchor. A fiber end
/// that is never reached, or a finite end whose proper time falls short of
/// `big_t`, is a domain error.
pub fn inverse_proper_time(family: &SpacetimeFamily, big_t: f64, x: &[f64], anchor: &Section) -> Result<f64, GeometryError> {
    let a = anchor.eval(x);
    family.check_in_fiber(a, x)?;
    if !big_t.is_finite() {
        return Err(out_of_range(family, big_t, x, a));
    }
    if big_t == 0.0 {
        return Ok(a);
    }
    let settings = family.quadrature();
    let (flo, fhi) = family.fiber(x);
    let dir = big_t.signum();
    let end = if dir > 0.0 { fhi } else { flo };
    let target = big_t.abs();

    // |T| along the search direction, accumulated from the previous bracket point.
    let mut near = a;
    let mut near_value = 0.0;
    let mut step = 1.0;
    let far;
    loop {
        let candidate = a + dir * step;
        let past_end = if dir > 0.0 { candidate >= end } else { candidate <= end };
        if past_end {
            if end.is_infinite() {
                return Err(out_of_range(family, big_t, x, a));
            }
            let value = near_value + proper_time_between(family, near, end, x, settings)?.abs();
            if value <= target {
                return Err(out_of_range(family, big_t, x, a));
            }
            far = end;
            break;
        }
        let value = near_value + proper_time_between(family, near, candidate, x, settings)?.abs();
        if value >= target {
            far = candidate;
            break;
        }
        near = candidate;
        near_value = value;
        step *= 2.0;
        if step > 1e300 {
            return Err(out_of_range(family, big_t, x, a));
        }
    }

    let (mut lo, mut hi) = (near, far);
    let mut lo_value = near_value;
    while (hi - lo).abs() > INVERSE_TOLERANCE * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let value = lo_value + proper_time_between(family, lo, mid, x, settings)?.abs();
        if value < target {
            lo = mid;
            lo_value = value;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn out_of_range(family: &SpacetimeFamily, value: f64, x: &[f64], anchor: f64) -> GeometryError {
    let (flo, fhi) = family.fiber(x);
    let settings = family.quadrature();
    let reach = |end: f64| {
        if end.is_finite() {
            proper_time_between(family, anchor, end, x, settings).unwrap_or(f64::NAN)
        } else {
            end
        }
    };
    GeometryError::ProperTimeOutOfRange { value, x: point(x), lo: reach(flo), hi: reach(fhi) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BaseDomain;

    fn base() -> BaseDomain {
        BaseDomain::interval(0.0, 1.0, 3).unwrap()
    }

    #[test]
    fn unit_and_constant_densities() {
        let unit = SpacetimeFamily::constant(base(), 1.0).unwrap();
        let zero = Section::constant(0.0);
        assert_eq!(proper_time(&unit, 2.5, &[0.3], &zero).unwrap(), 2.5);
        let double = SpacetimeFamily::constant(base(), 2.0).unwrap();
        assert_eq!(proper_time(&double, 1.0, &[0.3], &zero).unwrap(), 2.0);
        assert!((inverse_proper_time(&unit, 2.5, &[0.3], &zero).unwrap() - 2.5).abs() < 1e-11);
        assert!((inverse_proper_time(&double, 2.0, &[0.3], &zero).unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn quadratic_density_matches_antiderivative() {
        // T(t) = t + x t³ / 3 is the oracle.
        let fam = SpacetimeFamily::builder(base()).density(|t, x| 1.0 + x[0] * t * t).build().unwrap();
        let zero = Section::constant(0.0);
        let t = proper_time(&fam, 1.0, &[1.0], &zero).unwrap();
        assert!((t - 4.0 / 3.0).abs() < 1e-12);
        for &(tt, x) in &[(0.7, 0.2), (-1.3, 0.9), (2.0, 0.5)] {
            let exact = tt + x * tt * tt * tt / 3.0;
            assert!((proper_time(&fam, tt, &[x], &zero).unwrap() - exact).abs() < 1e-11);
        }
        let inv = inverse_proper_time(&fam, 4.0 / 3.0, &[1.0], &zero).unwrap();
        assert!((inv - 1.0).abs() < 1e-10);
    }

    #[test]
    fn domain_errors() {
        let fam = SpacetimeFamily::builder(base()).fiber(|_| -1.0, |_| 1.0).build().unwrap();
        let zero = Section::constant(0.0);
        assert!(matches!(proper_time(&fam, 1.5, &[0.0], &zero), Err(GeometryError::OutsideFiber { .. })));
        assert!(matches!(
            inverse_proper_time(&fam, 1.5, &[0.0], &zero),
            Err(GeometryError::ProperTimeOutOfRange { .. })
        ));
        assert!(matches!(
            inverse_proper_time(&fam, -1.0, &[0.0], &zero),
            Err(GeometryError::ProperTimeOutOfRange { .. })
        ));
        let inv = inverse_proper_time(&fam, -0.999, &[0.0], &zero).unwrap();
        assert!((inv + 0.999).abs() < 1e-11);
    }

    #[test]
    fn anchored_at_a_moving_section() {
        let fam = SpacetimeFamily::constant(base(), 1.0).unwrap();
        let sigma = Section::new(|x| x[0]);
        assert_eq!(proper_time(&fam, 0.5, &[0.5], &sigma).unwrap(), 0.0);
        assert!((proper_time(&fam, 0.0, &[0.5], &sigma).unwrap() + 0.5).abs() < 1e-15);
    }
}
