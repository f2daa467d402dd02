use std::fmt;
use std::sync::Arc;

use super::{point, BaseDomain, BaseFn, GeometryError, Point, SpacetimeFn};
use crate::quad::SimpsonSettings;

/// The range of fiber times used when a check samples a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl Default for TimeWindow {
    fn default() -> Self {
        Self { lo: -4.0, hi: 4.0, samples: 41 }
    }
}

/// A `U`-family of 1-dimensional spacetimes `I × U` with `E = ρ dt`.
#[derive(Clone)]
pub struct SpacetimeFamily {
    base: BaseDomain,
    fiber_lo: BaseFn,
    fiber_hi: BaseFn,
    density: SpacetimeFn,
    window: TimeWindow,
    quadrature: SimpsonSettings,
}

impl fmt::Debug for SpacetimeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpacetimeFamily")
            .field("base", &self.base)
            .field("window", &self.window)
            .field("quadrature", &self.quadrature)
            .finish_non_exhaustive()
    }
}

pub struct FamilyBuilder {
    base: BaseDomain,
    fiber_lo: BaseFn,
    fiber_hi: BaseFn,
    density: SpacetimeFn,
    window: TimeWindow,
    quadrature: SimpsonSettings,
}

impl FamilyBuilder {
    pub fn density(mut self, rho: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.density = Arc::new(rho);
        self
    }

    pub fn density_fn(mut self, rho: SpacetimeFn) -> Self {
        self.density = rho;
        self
    }

    pub fn fiber(
        mut self,
        lo: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        hi: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.fiber_lo = Arc::new(lo);
        self.fiber_hi = Arc::new(hi);
        self
    }

    pub fn fiber_fns(mut self, lo: BaseFn, hi: BaseFn) -> Self {
        self.fiber_lo = lo;
        self.fiber_hi = hi;
        self
    }

    pub fn window(mut self, window: TimeWindow) -> Self {
        self.window = window;
        self
    }

    pub fn quadrature(mut self, settings: SimpsonSettings) -> Self {
        self.quadrature = settings;
        self
    }

    pub fn build(self) -> Result<Arc<SpacetimeFamily>, GeometryError> {
        let family = SpacetimeFamily {
            base: self.base,
            fiber_lo: self.fiber_lo,
            fiber_hi: self.fiber_hi,
            density: self.density,
            window: self.window,
            quadrature: self.quadrature,
        };
        family.validate()?;
        Ok(Arc::new(family))
    }
}

impl SpacetimeFamily {
    /// Starts a family over `base` with fiber `ℝ` and unit density.
    pub fn builder(base: BaseDomain) -> FamilyBuilder {
        FamilyBuilder {
            base,
            fiber_lo: Arc::new(|_| f64::NEG_INFINITY),
            fiber_hi: Arc::new(|_| f64::INFINITY),
            density: Arc::new(|_, _| 1.0),
            window: TimeWindow::default(),
            quadrature: SimpsonSettings::default(),
        }
    }

    /// `ℝ × U` with constant density.
    pub fn constant(base: BaseDomain, rho: f64) -> Result<Arc<Self>, GeometryError> {
        Self::builder(base).density(move |_, _| rho).build()
    }

    /// Reassembles a family from its parts, revalidating.
    pub(crate) fn from_parts(
        base: BaseDomain,
        fiber_lo: BaseFn,
        fiber_hi: BaseFn,
        density: SpacetimeFn,
        window: TimeWindow,
        quadrature: SimpsonSettings,
    ) -> Result<Arc<Self>, GeometryError> {
        FamilyBuilder { base, fiber_lo, fiber_hi, density, window, quadrature }.build()
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let w = self.window;
        if !(w.lo.is_finite() && w.hi.is_finite() && w.lo < w.hi && w.samples >= 2) {
            return Err(GeometryError::InvalidWindow(format!("need finite lo < hi and >= 2 samples, got {w:?}")));
        }
        for x in self.base.samples() {
            let (lo, hi) = self.fiber(&x);
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(GeometryError::EmptyFiber { x, lo, hi });
            }
            for t in self.sample_times(&x) {
                let value = self.density(t, &x);
                if !(value > 0.0 && value.is_finite()) {
                    return Err(GeometryError::NonPositiveDensity { t, x: x.clone(), value });
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &BaseDomain {
        &self.base
    }

    pub fn density(&self, t: f64, x: &[f64]) -> f64 {
        (self.density)(t, x)
    }

    pub(crate) fn density_fn(&self) -> &SpacetimeFn {
        &self.density
    }

    pub(crate) fn fiber_fns(&self) -> (&BaseFn, &BaseFn) {
        (&self.fiber_lo, &self.fiber_hi)
    }

    /// The open fiber interval over `x`; endpoints may be infinite.
    pub fn fiber(&self, x: &[f64]) -> (f64, f64) {
        ((self.fiber_lo)(x), (self.fiber_hi)(x))
    }

    pub fn in_fiber(&self, t: f64, x: &[f64]) -> bool {
        let (lo, hi) = self.fiber(x);
        lo < t && t < hi
    }

    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn quadrature(&self) -> SimpsonSettings {
        self.quadrature
    }

    /// Cell-centred times in the window, clipped to the fiber over `x`.
    pub fn sample_times(&self, x: &[f64]) -> Vec<f64> {
        let (flo, fhi) = self.fiber(x);
        let a = self.window.lo.max(flo);
        let b = self.window.hi.min(fhi);
        if !(a < b) {
            return Vec::new();
        }
        let n = self.window.samples;
        (0..n).map(|k| a + (b - a) * (k as f64 + 0.5) / n as f64).collect()
    }

    /// All `(t, x)` verification samples, base-major.
    pub fn sample_points(&self) -> Vec<(f64, Point)> {
        let mut out = Vec::new();
        for x in self.base.samples() {
            for t in self.sample_times(&x) {
                out.push((t, x.clone()));
            }
        }
        out
    }

    pub(crate) fn check_in_fiber(&self, t: f64, x: &[f64]) -> Result<(), GeometryError> {
        let (lo, hi) = self.fiber(x);
        if lo < t && t < hi {
            Ok(())
        } else {
            Err(GeometryError::OutsideFiber { t, x: point(x), lo, hi })
        }
    }

    /// Same family with a different sampling window.
    pub fn with_window(&self, window: TimeWindow) -> Result<Arc<Self>, GeometryError> {
        Self::from_parts(
            self.base.clone(),
            self.fiber_lo.clone(),
            self.fiber_hi.clone(),
            self.density.clone(),
            window,
            self.quadrature,
        )
    }
}

/// A section `σ: U → M`, given by its fiber coordinate `σ(x)`.
#[derive(Clone)]
pub struct Section(BaseFn);

impl fmt::Debug for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Section(..)")
    }
}

impl Section {
    pub fn new(sigma: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(sigma))
    }

    pub fn from_fn(sigma: BaseFn) -> Self {
        Self(sigma)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.0)(x)
    }

    pub fn as_fn(&self) -> &BaseFn {
        &self.0
    }

    /// `σ + dt`.
    pub fn shifted(&self, dt: f64) -> Self {
        let inner = self.0.clone();
        Self::new(move |x| inner(x) + dt)
    }

    /// Pointwise minimum of two sections.
    pub fn min(&self, other: &Section) -> Self {
        let (a, b) = (self.0.clone(), other.0.clone());
        Self::new(move |x| a(x).min(b(x)))
    }

    /// Pointwise maximum of two sections.
    pub fn max(&self, other: &Section) -> Self {
        let (a, b) = (self.0.clone(), other.0.clone());
        Self::new(move |x| a(x).max(b(x)))
    }

    /// Checks `fiber_lo(x) < σ(x) < fiber_hi(x)` on the base grid.
    pub fn validate(&self, family: &SpacetimeFamily) -> Result<(), GeometryError> {
        for x in family.base().samples() {
            let value = self.eval(&x);
            let (lo, hi) = family.fiber(&x);
            if !(lo < value && value < hi) {
                return Err(GeometryError::SectionOutsideFiber { x, value, lo, hi });
            }
        }
        Ok(())
    }
}
