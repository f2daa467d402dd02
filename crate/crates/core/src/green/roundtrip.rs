//! Cauchy data and solutions are inverse to each other.

use std::sync::Arc;

use num_complex::Complex64;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use super::ivp::{initial_data, solve_ivp, InitialData};
use super::operator::VerticalOperator;
use super::{GreenError, GreenReport};
use crate::geometry::{FieldConfiguration, Point, Section, SpacetimeFamily};
use crate::value::FieldValue;

pub const DATA_SOLVE_TOLERANCE: f64 = 1e-10;
pub const SOLVE_DATA_TOLERANCE: f64 = 1e-8;

/// `data(σ, solve(σ, d))` against `d` on the base samples.
pub fn data_after_solve(op: &VerticalOperator, sigma: &Section, data: &InitialData) -> Result<(f64, usize), GreenError> {
    let points = op.family().base().samples();
    let back = initial_data(op, sigma, &solve_ivp(op, sigma, data)?)?;
    Ok((back.max_distance(data, &points)?, points.len()))
}

/// `solve(σ, data(σ, Φ))` against the solution `Φ` on the sample points.
pub fn solve_after_data(op: &VerticalOperator, sigma: &Section, solution: &FieldConfiguration) -> Result<(f64, usize), GreenError> {
    let points = op.family().sample_points();
    let again = solve_ivp(op, sigma, &initial_data(op, sigma, solution)?)?;
    Ok((again.max_distance(solution, &points)?, points.len()))
}

fn smooth_record(rng: &mut SmallRng) -> impl Fn(&[f64]) -> f64 + Send + Sync + 'static {
    let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..3.0));
    move |x: &[f64]| a + b * (x.iter().sum::<f64>() + c).sin()
}

fn random_section(rng: &mut SmallRng, family: &SpacetimeFamily) -> Section {
    let x0 = family.base().centre();
    let (lo, hi) = family.fiber(&x0);
    let w = family.window();
    let (lo, hi) = (lo.max(w.lo), hi.min(w.hi));
    let (centre, half) = (0.5 * (lo + hi), 0.25 * (hi - lo));
    let c = rng.gen_range(centre - 0.5 * half..centre + 0.5 * half);
    let slope = rng.gen_range(-0.1..0.1);
    Section::new(move |x: &[f64]| c + slope * x.iter().zip(&x0).map(|(a, b)| a - b).sum::<f64>())
}

fn record(rng: &mut SmallRng, family: &Arc<SpacetimeFamily>, dirac: bool) -> Result<(VerticalOperator, InitialData), GreenError> {
    if dirac {
        let (f, g, h, k) = (smooth_record(rng), smooth_record(rng), smooth_record(rng), smooth_record(rng));
        let data = InitialData::first_order(move |x| FieldValue::pair(Complex64::new(f(x), g(x)), Complex64::new(h(x), k(x))));
        Ok((VerticalOperator::dirac(family.clone()), data))
    } else {
        let m0 = rng.gen_range(0.5..2.0);
        let wobble = rng.gen_range(0.0..0.2);
        let op = VerticalOperator::klein_gordon(family.clone(), move |x: &[f64]| m0 * (1.0 + wobble * x.iter().sum::<f64>().sin()))?;
        Ok((op, InitialData::second_order(smooth_record(rng), smooth_record(rng))))
    }
}

/// Both roundtrips on `records` random data sets, masses and sections.
pub fn ivp_roundtrip_suite(family: &Arc<SpacetimeFamily>, dirac: bool, records: usize, seed: u64) -> Vec<GreenReport> {
    let mut rng = SmallRng::seed_from_u64(seed);
    let mut first = Ok((0.0f64, 0usize));
    let mut second = Ok((0.0f64, 0usize));
    let merge = |acc: &mut Result<(f64, usize), GreenError>, r: Result<(f64, usize), GreenError>| {
        if let Ok((w, n)) = acc {
            match r {
                Ok((e, k)) => {
                    *w = w.max(e);
                    *n += k;
                }
                Err(e) => *acc = Err(e),
            }
        }
    };
    for _ in 0..records {
        let outcome = record(&mut rng, family, dirac).map(|(op, data)| {
            let (sigma, other) = (random_section(&mut rng, family), random_section(&mut rng, family));
            let a = data_after_solve(&op, &sigma, &data);
            let b = solve_ivp(&op, &other, &data).and_then(|phi| solve_after_data(&op, &sigma, &phi));
            (a, b)
        });
        match outcome {
            Ok((a, b)) => {
                merge(&mut first, a);
                merge(&mut second, b);
            }
            Err(e) => {
                let msg = e.to_string();
                merge(&mut first, Err(GreenError::DataMismatch(msg.clone())));
                merge(&mut second, Err(GreenError::DataMismatch(msg)));
            }
        }
    }
    let tag = if dirac { "dirac" } else { "klein_gordon" };
    vec![
        GreenReport::measure(format!("green.ivp.{tag}.data_after_solve"), DATA_SOLVE_TOLERANCE, first),
        GreenReport::measure(format!("green.ivp.{tag}.solve_after_data"), SOLVE_DATA_TOLERANCE, second),
    ]
}

/// `|G⁺φ|` at the sample points strictly below the lower section of `φ`.
pub fn support_check(op: &VerticalOperator, phi: &FieldConfiguration) -> Result<(f64, usize), GreenError> {
    let g = op.retarded(phi)?;
    let lower = phi.support().lower_section().cloned().ok_or(GreenError::WrongSupport {
        operator: "retarded Green operator",
        expected: "past compact",
        found: phi.support().kind(),
    })?;
    let mut worst = 0.0f64;
    let mut samples = 0;
    let below: Vec<(f64, Point)> = op.family().sample_points().into_iter().filter(|(t, x)| *t < lower.eval(x)).collect();
    for (t, x) in &below {
        worst = worst.max(g.eval(*t, x)?.norm_inf());
        samples += 1;
    }
    Ok((worst, samples))
}
