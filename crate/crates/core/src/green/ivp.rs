use std::sync::{Arc, Mutex};

use super::kernel::vertical_interval;
use super::operator::{OperatorKind, VerticalOperator};
use super::GreenError;
use crate::diff;
use crate::geometry::{point, FieldConfiguration, GeometryError, Point, ScalarKind, Section, SupportClass};
use crate::value::FieldValue;

/// A base function with values in `𝕂ⁿ`.
pub type DataFn = Arc<dyn Fn(&[f64]) -> Result<FieldValue, GeometryError> + Send + Sync>;

/// Cauchy data on a section.
///
/// Second-order data are `(Φ, ρ⁻¹∂_tΦ)` restricted to the section; first-order
/// data are `Φ` alone.
#[derive(Clone)]
pub enum InitialData {
    SecondOrder { kind: ScalarKind, value: DataFn, velocity: DataFn },
    FirstOrder { value: DataFn },
}

impl std::fmt::Debug for InitialData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialData::SecondOrder { kind, .. } => write!(f, "InitialData::SecondOrder({kind:?})"),
            InitialData::FirstOrder { .. } => f.write_str("InitialData::FirstOrder"),
        }
    }
}

impl InitialData {
    /// Real second-order data.
    pub fn second_order(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        velocity: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        InitialData::SecondOrder {
            kind: ScalarKind::Real,
            value: Arc::new(move |x| Ok(FieldValue::real(value(x)))),
            velocity: Arc::new(move |x| Ok(FieldValue::real(velocity(x)))),
        }
    }

    pub fn first_order(value: impl Fn(&[f64]) -> FieldValue + Send + Sync + 'static) -> Self {
        InitialData::FirstOrder { value: Arc::new(move |x| Ok(value(x))) }
    }

    /// The data values at `x`: `[Φ₀, Φ₁]` or `[Φ₀]`.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<FieldValue>, GeometryError> {
        match self {
            InitialData::SecondOrder { value, velocity, .. } => Ok(vec![value(x)?, velocity(x)?]),
            InitialData::FirstOrder { value } => Ok(vec![value(x)?]),
        }
    }

    /// The same data, remembering the most recent base point per record.
    ///
    /// Data built from an integral operator are expensive and are usually
    /// queried many times at one base point in a row.
    pub fn cached(&self) -> InitialData {
        match self {
            InitialData::SecondOrder { kind, value, velocity } => {
                InitialData::SecondOrder { kind: *kind, value: remember_last(value.clone()), velocity: remember_last(velocity.clone()) }
            }
            InitialData::FirstOrder { value } => InitialData::FirstOrder { value: remember_last(value.clone()) },
        }
    }

    /// Largest component difference to `other` over `points`.
    pub fn max_distance(&self, other: &InitialData, points: &[Point]) -> Result<f64, GreenError> {
        let mut worst = 0.0f64;
        for x in points {
            let (a, b) = (self.evaluate(x)?, other.evaluate(x)?);
            if a.len() != b.len() {
                return Err(GreenError::DataMismatch("data of different orders".into()));
            }
            for (u, v) in a.iter().zip(&b) {
                worst = worst.max(u.distance(v));
            }
        }
        Ok(worst)
    }
}

fn remember_last(f: DataFn) -> DataFn {
    let last: Mutex<Option<(Point, FieldValue)>> = Mutex::new(None);
    Arc::new(move |x| {
        if let Some((p, v)) = last.lock().expect("cache lock").as_ref() {
            if p.as_slice() == x {
                return Ok(v.clone());
            }
        }
        let v = f(x)?;
        *last.lock().expect("cache lock") = Some((point(x), v.clone()));
        Ok(v)
    })
}

/// Largest `|PΦ|` over the family's sample points.
pub(crate) fn worst_residual(op: &VerticalOperator, solution: &FieldConfiguration) -> Result<(f64, f64, Point), GreenError> {
    let mut worst = (0.0f64, f64::NAN, Point::new());
    for (t, x) in op.family().sample_points() {
        let r = op.apply_at(solution, t, &x)?.norm_inf();
        if r > worst.0 || worst.1.is_nan() {
            worst = (r, t, x);
        }
    }
    Ok(worst)
}

/// Restricts a solution and, for second-order operators, its proper-time
/// derivative to `σ`.
pub fn initial_data(op: &VerticalOperator, sigma: &Section, solution: &FieldConfiguration) -> Result<InitialData, GreenError> {
    op.check_field(solution)?;
    sigma.validate(op.family())?;
    let tolerance = op.settings().solution_tolerance;
    let (residual, t, x) = worst_residual(op, solution)?;
    if !(residual <= tolerance) {
        return Err(GreenError::NotASolution { residual, t, x, tolerance });
    }
    let (field, s) = (solution.clone(), sigma.clone());
    let value: DataFn = Arc::new(move |x| field.eval(s.eval(x), x));
    match op.kind() {
        OperatorKind::Dirac => Ok(InitialData::FirstOrder { value }),
        OperatorKind::KleinGordon { .. } => {
            let (field, s, family, step) = (solution.clone(), sigma.clone(), op.family().clone(), op.settings().step);
            let velocity: DataFn = Arc::new(move |x| {
                let t = s.eval(x);
                let rho = family.density(t, x);
                let d = diff::first(|u| field.eval(u, x), t, step / rho)?;
                Ok(d * (1.0 / rho))
            });
            Ok(InitialData::SecondOrder { kind: solution.kind(), value, velocity })
        }
    }
}

/// The solution with the given data on `σ`.
///
/// Second order: `Φ₀ cos(m(T − T_σ)) + Φ₁ m⁻¹ sin(m(T − T_σ))`. First order:
/// `Φ₀` transported unchanged along each fiber.
pub fn solve_ivp(op: &VerticalOperator, sigma: &Section, data: &InitialData) -> Result<FieldConfiguration, GreenError> {
    sigma.validate(op.family())?;
    let family = op.family().clone();
    let n = op.components();
    let probe = family.base().centre();
    for v in data.evaluate(&probe)? {
        if v.len() != n {
            return Err(GreenError::DataMismatch(format!("data have {} components, operator needs {n}", v.len())));
        }
    }
    let s = sigma.clone();
    match (op.kind(), data) {
        (OperatorKind::KleinGordon { mass }, InitialData::SecondOrder { kind, value, velocity }) => {
            let (mass, value, velocity, fam) = (mass.clone(), value.clone(), velocity.clone(), family.clone());
            Ok(FieldConfiguration::new(family, n, *kind, SupportClass::Unrestricted, move |t, x| {
                let m = mass(x);
                let dt = vertical_interval(&fam, s.eval(x), t, x);
                let (c, sn) = ((m * dt).cos(), (m * dt).sin() / m);
                let out = value(x)? * c + velocity(x)? * sn;
                if out.len() != n {
                    return Err(GeometryError::FieldMismatch(format!("data at {:?} changed dimension", point(x))));
                }
                Ok(out)
            })?)
        }
        (OperatorKind::Dirac, InitialData::FirstOrder { value }) => {
            let value = value.clone();
            Ok(FieldConfiguration::new(family, n, ScalarKind::Complex, SupportClass::Unrestricted, move |_, x| value(x))?)
        }
        (OperatorKind::KleinGordon { .. }, _) => Err(GreenError::DataMismatch("second-order operator needs (Φ₀, Φ₁)".into())),
        (OperatorKind::Dirac, _) => Err(GreenError::DataMismatch("first-order operator needs a single record".into())),
    }
}
