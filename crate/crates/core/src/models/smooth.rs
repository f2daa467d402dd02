/// Accepted empirical convergence orders of the second-derivative estimate.
pub const ORDER_RANGE: (f64, f64) = (1.5, 2.5);

/// Central-difference derivatives of an observable at several step sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub s0: f64,
    pub steps: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// Empirical order from the last three first-derivative estimates.
    pub first_order: Option<f64>,
    /// Empirical order from the last three second-derivative estimates.
    pub second_order: Option<f64>,
    /// Every second-derivative estimate agrees exactly.
    pub exact: bool,
    pub passed: bool,
}

fn order(estimates: &[f64], steps: &[f64]) -> Option<f64> {
    let n = estimates.len();
    if n < 3 {
        return None;
    }
    let d1 = (estimates[n - 3] - estimates[n - 2]).abs();
    let d2 = (estimates[n - 2] - estimates[n - 1]).abs();
    let q = steps[n - 2] / steps[n - 1];
    Some((d1 / d2).ln() / q.ln())
}

/// Estimates `f′(s₀)` and `f″(s₀)` by central differences at each step in
/// `steps` (shrinking geometrically) and reports the empirical order at which successive
/// second-derivative estimates converge. Passes when that order lies in
/// [`ORDER_RANGE`], or when all estimates coincide.
pub fn smoothness_probe<E>(
    observable: impl Fn(f64) -> Result<f64, E>,
    s0: f64,
    steps: &[f64],
) -> Result<ConvergenceReport, E> {
    let centre = observable(s0)?;
    let mut first = Vec::with_capacity(steps.len());
    let mut second = Vec::with_capacity(steps.len());
    for &h in steps {
        let (plus, minus) = (observable(s0 + h)?, observable(s0 - h)?);
        first.push((plus - minus) / (2.0 * h));
        second.push((plus - 2.0 * centre + minus) / (h * h));
    }
    let exact = second.windows(2).all(|w| w[0] == w[1]);
    let second_order = if exact { None } else { order(&second, steps) };
    let first_order = if first.windows(2).all(|w| w[0] == w[1]) { None } else { order(&first, steps) };
    let passed = exact || second_order.is_some_and(|p| p >= ORDER_RANGE.0 && p <= ORDER_RANGE.1);
    Ok(ConvergenceReport { s0, steps: steps.to_vec(), first, second, first_order, second_order, exact, passed })
}
