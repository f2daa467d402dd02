use super::ivp::{initial_data, solve_ivp};
use super::operator::VerticalOperator;
use super::{GreenError, GreenReport};
use crate::bump::smooth_step;
use crate::geometry::{FieldConfiguration, Point, Section, SupportClass};

impl GreenReport {
    fn from_result(check: String, tolerance: f64, result: Result<(f64, usize), GreenError>) -> Self {
        match result {
            Ok((e, n)) => Self::new(check, e, tolerance, n),
            Err(e) => Self::failed(check, tolerance, e),
        }
    }
}

/// Where the surjectivity probe cuts a solution in two.
///
/// The partition of unity switches from `0` to `1` between the sections
/// `lower − margin` and `upper + margin` of the test field's support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings {
    pub margin: f64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self { margin: 0.5 }
    }
}

/// Checks the four nodes of `0 → C_vc → C_vc → C_spc → C_sc → 0` on each test
/// field: `G±Pφ = φ` and `PG±φ = φ`, `GPφ = 0`, `PGφ = 0`, and that a solution
/// split by a partition of unity is recovered as `G(PΦ₊)`.
pub fn verify_exact_sequence(
    op: &VerticalOperator,
    fields: &[FieldConfiguration],
    tol: f64,
    probe: ProbeSettings,
) -> Vec<GreenReport> {
    let mut out = Vec::with_capacity(4 * fields.len());
    for (i, phi) in fields.iter().enumerate() {
        let name = |check: &str| format!("exact_sequence[{i}].{check}");
        out.push(GreenReport::from_result(name("inverse"), tol, inverse(op, phi)));
        out.push(GreenReport::from_result(name("causal_kills_image"), tol, causal_kills_image(op, phi)));
        out.push(GreenReport::from_result(name("causal_solves"), tol, causal_solves(op, phi)));
        out.push(GreenReport::from_result(name("surjectivity"), tol, surjectivity(op, phi, probe)));
    }
    out
}

fn require_compact(phi: &FieldConfiguration) -> Result<(Section, Section), GreenError> {
    match phi.support() {
        SupportClass::Compact { lower, upper } => Ok((lower.clone(), upper.clone())),
        other => Err(GreenError::WrongSupport {
            operator: "exact sequence check",
            expected: "compact",
            found: other.kind(),
        }),
    }
}

fn points(op: &VerticalOperator) -> Vec<(f64, Point)> {
    op.family().sample_points()
}

fn inverse(op: &VerticalOperator, phi: &FieldConfiguration) -> Result<(f64, usize), GreenError> {
    require_compact(phi)?;
    let pts = points(op);
    let p_phi = op.apply(phi)?;
    let candidates = [
        op.retarded(&p_phi)?,
        op.advanced(&p_phi)?,
        op.apply(&op.retarded(phi)?)?,
        op.apply(&op.advanced(phi)?)?,
    ];
    let mut worst = 0.0f64;
    for c in &candidates {
        worst = worst.max(c.max_distance(phi, &pts)?);
    }
    Ok((worst, candidates.len() * pts.len()))
}

fn max_norm(f: &FieldConfiguration, pts: &[(f64, Point)]) -> Result<f64, GreenError> {
    let mut worst = 0.0f64;
    for (t, x) in pts {
        worst = worst.max(f.eval(*t, x)?.norm_inf());
    }
    Ok(worst)
}

fn causal_kills_image(op: &VerticalOperator, phi: &FieldConfiguration) -> Result<(f64, usize), GreenError> {
    require_compact(phi)?;
    let pts = points(op);
    let g = op.causal(&op.apply(phi)?)?;
    Ok((max_norm(&g, &pts)?, pts.len()))
}

fn causal_solves(op: &VerticalOperator, phi: &FieldConfiguration) -> Result<(f64, usize), GreenError> {
    require_compact(phi)?;
    let pts = points(op);
    let pg = op.apply(&op.causal(phi)?)?;
    Ok((max_norm(&pg, &pts)?, pts.len()))
}

fn surjectivity(op: &VerticalOperator, phi: &FieldConfiguration, probe: ProbeSettings) -> Result<(f64, usize), GreenError> {
    let (lower, upper) = require_compact(phi)?;
    let pts = points(op);
    let (minus, plus) = (lower.shifted(-probe.margin), upper.shifted(probe.margin));
    let (l, u) = (lower.as_fn().clone(), upper.as_fn().clone());
    let middle = Section::new(move |x| 0.5 * (l(x) + u(x)));

    let data = initial_data(op, &middle, &op.causal(phi)?)?.cached();
    let solution = solve_ivp(op, &middle, &data)?;

    let (m, p, sol) = (minus.clone(), plus.clone(), solution.clone());
    let future_part = FieldConfiguration::new(
        op.family().clone(),
        solution.components(),
        solution.kind(),
        SupportClass::PastCompact(minus.clone()),
        move |t, x| {
            let (a, b) = (m.eval(x), p.eval(x));
            Ok(sol.eval(t, x)? * smooth_step((t - a) / (b - a)))
        },
    )?;
    let source = op.apply(&future_part)?.with_support(SupportClass::Compact { lower: minus, upper: plus })?;
    let recovered = op.causal(&source)?;
    Ok((recovered.max_distance(&solution, &pts)?, pts.len()))
}
