//! Fixed-node evaluation of the Green kernels.
//!
//! With `D = T(t) − T(s)` the retarded operator is
//! `∫_{lo}^{min(t, hi)} K(D) φ(s) ρ(s) ds`, the advanced one is
//! `−∫_{max(t, lo)}^{hi} K(D) φ(s) ρ(s) ds`, and their difference integrates
//! over the whole support. `K(D) = sin(mD)/m` for Klein–Gordon and `K = 1` for
//! Dirac, whose components then pick up `(−i, i)`.
//!
//! `D` at the nodes is built as `∫_p^t ρ + ∫_s^p ρ` for a pivot `p` at one
//! end of the range, the second term accumulated node to node. Every piece
//! moves smoothly with `t`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use super::operator::{OperatorKind, VerticalOperator};
use crate::geometry::{FieldConfiguration, GeometryError, SpacetimeFamily};
use crate::quad::{Compensated, GaussLegendre};
use crate::value::FieldValue;

const PROPER_TIME_PANELS: usize = 8;
const MAX_SPAN_MULTIPLE: f64 = 256.0;
const MAX_REFINEMENTS: usize = 6;
const RESOLUTION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Branch {
    Retarded,
    Advanced,
    Causal,
}

/// `∫_from^to ρ(s, x) ds` by a fixed rule, smooth in both ends.
pub(crate) fn vertical_interval(family: &SpacetimeFamily, from: f64, to: f64, x: &[f64]) -> f64 {
    if from == to {
        return 0.0;
    }
    let r: Result<f64, ()> = GaussLegendre::new(PROPER_TIME_PANELS).integrate(|s| Ok(family.density(s, x)), from, to);
    r.unwrap_or(f64::NAN)
}

fn short_interval(family: &SpacetimeFamily, from: f64, to: f64, x: &[f64]) -> f64 {
    if from == to {
        return 0.0;
    }
    let r: Result<f64, ()> = GaussLegendre::new(1).integrate(|s| Ok(family.density(s, x)), from, to);
    r.unwrap_or(f64::NAN)
}

/// The part of the support that does not depend on `t`: the whole support,
/// cut at the sampling window where it is unbounded.
fn reference_range(field: &FieldConfiguration, branch: Branch, x: &[f64]) -> (f64, f64) {
    let window = field.family().window();
    let support = field.support();
    let (lo, hi) = (support.lower(x), support.upper(x));
    match branch {
        Branch::Retarded => (lo.expect("retarded input is past compact"), hi.unwrap_or(window.hi)),
        Branch::Advanced => (lo.unwrap_or(window.lo), hi.expect("advanced input is future compact")),
        Branch::Causal => (lo.expect("compact input"), hi.expect("compact input")),
    }
}

/// `panels` per `panel_span` of the range.
pub(crate) fn base_panels(op: &VerticalOperator, panels: usize, a: f64, b: f64) -> usize {
    let multiple = ((b - a).max(0.0) / op.settings().panel_span).ceil().clamp(1.0, MAX_SPAN_MULTIPLE);
    panels * multiple as usize
}

/// Doubles the panel count from `start` until the moments `∫φρ` and
/// `∫φρ·(s − a)/(b − a)` over `[a, b]` settle. Narrow features inside a wide
/// support need this; a single smooth bump usually stops at `start`.
fn resolved_panels(field: &FieldConfiguration, a: f64, b: f64, x: &[f64], start: usize) -> Result<usize, GeometryError> {
    let family = field.family();
    let n = field.components();
    let moments = |panels: usize| -> Result<(FieldValue, FieldValue, f64), GeometryError> {
        let (mut m0, mut m1, mut scale) = (Compensated::new(FieldValue::zeros(n)), Compensated::new(FieldValue::zeros(n)), 0.0);
        for (s, w) in GaussLegendre::new(panels).nodes(a, b) {
            let v = field.eval(s, x)? * (w * family.density(s, x));
            scale += v.norm_inf();
            m1.add(v.clone() * ((s - a) / (b - a)));
            m0.add(v);
        }
        Ok((m0.value(), m1.value(), scale))
    };
    let mut panels = start;
    let mut coarse = moments(panels)?;
    for _ in 0..MAX_REFINEMENTS {
        let fine = moments(2 * panels)?;
        let change = coarse.0.distance(&fine.0).max(coarse.1.distance(&fine.1));
        if change <= RESOLUTION_TOLERANCE * fine.2 {
            return Ok(panels);
        }
        panels *= 2;
        coarse = fine;
    }
    Ok(panels)
}

/// Green operator values at a fixed panel count.
pub(crate) fn integrate(
    op: &VerticalOperator,
    field: &FieldConfiguration,
    branch: Branch,
    t: f64,
    x: &[f64],
    panels: usize,
) -> Result<FieldValue, GeometryError> {
    let family = op.family();
    let support = field.support();
    let lo = support.lower(x);
    let hi = support.upper(x);
    let n = field.components();

    let (a, b, pivot_at_end, sign) = match branch {
        Branch::Retarded => (lo.expect("retarded input is past compact"), t.min(hi.unwrap_or(f64::INFINITY)), true, 1.0),
        Branch::Advanced => (t.max(lo.unwrap_or(f64::NEG_INFINITY)), hi.expect("advanced input is future compact"), false, -1.0),
        Branch::Causal => (lo.expect("compact input"), hi.expect("compact input"), true, 1.0),
    };
    if !(b > a) {
        return Ok(FieldValue::zeros(n));
    }

    let nodes = GaussLegendre::new(panels).nodes(a, b);

    let pivot = if pivot_at_end { b } else { a };
    let second_order = matches!(op.kind(), OperatorKind::KleinGordon { .. });
    let tail = if second_order { vertical_interval(family, pivot, t, x) } else { 0.0 };
    let mut offsets = vec![0.0; nodes.len()];
    if second_order && pivot_at_end {
        let (mut acc, mut prev) = (Compensated::new(tail), b);
        for k in (0..nodes.len()).rev() {
            acc.add(short_interval(family, nodes[k].0, prev, x));
            prev = nodes[k].0;
            offsets[k] = acc.value();
        }
    } else if second_order {
        let (mut acc, mut prev) = (Compensated::new(tail), a);
        for k in 0..nodes.len() {
            acc.add(-short_interval(family, prev, nodes[k].0, x));
            prev = nodes[k].0;
            offsets[k] = acc.value();
        }
    }

    let mut total = Compensated::new(FieldValue::zeros(n));
    match op.kind() {
        OperatorKind::KleinGordon { mass } => {
            let m = mass(x);
            for (&(s, w), &d) in nodes.iter().zip(&offsets) {
                let weight = w * family.density(s, x) * (m * d).sin() / m;
                total.add(field.eval(s, x)? * weight);
            }
        }
        OperatorKind::Dirac => {
            for &(s, w) in &nodes {
                total.add(field.eval(s, x)? * (w * family.density(s, x)));
            }
        }
    }
    Ok(finish(op, total.value()) * sign)
}

fn finish(op: &VerticalOperator, total: FieldValue) -> FieldValue {
    match op.kind() {
        OperatorKind::KleinGordon { .. } => total,
        OperatorKind::Dirac => {
            let i = Complex64::new(0.0, 1.0);
            FieldValue::pair(-i * total[0], i * total[1])
        }
    }
}

type PointKey = Vec<u64>;

fn key(x: &[f64]) -> PointKey {
    x.iter().map(|c| c.to_bits()).collect()
}

/// `G⁺` or `G⁻` of one field, with the panel count chosen once per base point.
pub(crate) struct GreenKernel {
    op: VerticalOperator,
    field: FieldConfiguration,
    branch: Branch,
    panels: usize,
    resolution: Mutex<HashMap<PointKey, usize>>,
}

impl GreenKernel {
    pub(crate) fn new(op: VerticalOperator, field: FieldConfiguration, branch: Branch, panels: usize) -> Self {
        Self { op, field, branch, panels, resolution: Mutex::new(HashMap::new()) }
    }

    fn panels(&self, x: &[f64]) -> Result<usize, GeometryError> {
        let k = key(x);
        if let Some(&p) = self.resolution.lock().expect("cache lock").get(&k) {
            return Ok(p);
        }
        let (a, b) = reference_range(&self.field, self.branch, x);
        let p = if b > a { resolved_panels(&self.field, a, b, x, base_panels(&self.op, self.panels, a, b))? } else { 1 };
        self.resolution.lock().expect("cache lock").insert(k, p);
        Ok(p)
    }

    pub(crate) fn eval(&self, t: f64, x: &[f64]) -> Result<FieldValue, GeometryError> {
        integrate(&self.op, &self.field, self.branch, t, x, self.panels(x)?)
    }
}

/// Per base point sums that make `Gφ(t)` cheap: with the pivot at the top of
/// the support and `D_k = tail(t) + c_k`, the Klein–Gordon value is
/// `sin(m·tail)·A + cos(m·tail)·B`; the Dirac value does not depend on `t`.
#[derive(Debug, Clone)]
enum CausalSums {
    Zero(usize),
    KleinGordon { top: f64, m: f64, a: FieldValue, b: FieldValue },
    Dirac(FieldValue),
}

/// The causal propagator of one field, memoized per base point.
pub(crate) struct CausalKernel {
    op: VerticalOperator,
    field: FieldConfiguration,
    panels: usize,
    cache: Mutex<HashMap<PointKey, Arc<CausalSums>>>,
}

impl CausalKernel {
    pub(crate) fn new(op: VerticalOperator, field: FieldConfiguration, panels: usize) -> Self {
        Self { op, field, panels, cache: Mutex::new(HashMap::new()) }
    }

    fn sums(&self, x: &[f64]) -> Result<Arc<CausalSums>, GeometryError> {
        let k = key(x);
        if let Some(s) = self.cache.lock().expect("cache lock").get(&k) {
            return Ok(s.clone());
        }
        let sums = Arc::new(self.compute(x)?);
        self.cache.lock().expect("cache lock").insert(k, sums.clone());
        Ok(sums)
    }

    fn compute(&self, x: &[f64]) -> Result<CausalSums, GeometryError> {
        let family = self.op.family();
        let support = self.field.support();
        let (a, b) = (support.lower(x).expect("compact input"), support.upper(x).expect("compact input"));
        let n = self.field.components();
        if !(b > a) {
            return Ok(CausalSums::Zero(n));
        }
        let panels = resolved_panels(&self.field, a, b, x, base_panels(&self.op, self.panels, a, b))?;
        let nodes = GaussLegendre::new(panels).nodes(a, b);
        match self.op.kind() {
            OperatorKind::KleinGordon { mass } => {
                let m = mass(x);
                let (mut sa, mut sb) = (Compensated::new(FieldValue::zeros(n)), Compensated::new(FieldValue::zeros(n)));
                let (mut offset, mut prev) = (Compensated::new(0.0), b);
                for &(s, w) in nodes.iter().rev() {
                    offset.add(short_interval(family, s, prev, x));
                    prev = s;
                    let c = offset.value();
                    let v = self.field.eval(s, x)? * (w * family.density(s, x) / m);
                    sa.add(v.clone() * (m * c).cos());
                    sb.add(v * (m * c).sin());
                }
                Ok(CausalSums::KleinGordon { top: b, m, a: sa.value(), b: sb.value() })
            }
            OperatorKind::Dirac => {
                let mut total = Compensated::new(FieldValue::zeros(n));
                for &(s, w) in &nodes {
                    total.add(self.field.eval(s, x)? * (w * family.density(s, x)));
                }
                Ok(CausalSums::Dirac(finish(&self.op, total.value())))
            }
        }
    }

    pub(crate) fn eval(&self, t: f64, x: &[f64]) -> Result<FieldValue, GeometryError> {
        Ok(match &*self.sums(x)? {
            CausalSums::Zero(n) => FieldValue::zeros(*n),
            CausalSums::Dirac(v) => v.clone(),
            CausalSums::KleinGordon { top, m, a, b } => {
                let tail = vertical_interval(self.op.family(), *top, t, x);
                a.clone() * (m * tail).sin() + b.clone() * (m * tail).cos()
            }
        })
    }
}
