use super::{point, GeometryError, Point};

/// A closed rectangular parameter box with a uniform sampling grid.
///
/// A zero-dimensional box is a single point and samples as one empty
/// coordinate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
    grid: Vec<usize>,
}

impl BaseDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, grid: Vec<usize>) -> Result<Self, GeometryError> {
        if lo.len() != hi.len() || lo.len() != grid.len() {
            return Err(GeometryError::InvalidBase(format!(
                "axis counts differ: {} lower bounds, {} upper bounds, {} grid sizes",
                lo.len(),
                hi.len(),
                grid.len()
            )));
        }
        for axis in 0..lo.len() {
            if !(lo[axis].is_finite() && hi[axis].is_finite() && lo[axis] < hi[axis]) {
                return Err(GeometryError::InvalidBase(format!(
                    "axis {axis}: need finite lo < hi, got [{}, {}]",
                    lo[axis], hi[axis]
                )));
            }
            if grid[axis] < 2 {
                return Err(GeometryError::InvalidBase(format!("axis {axis}: need at least 2 samples, got {}", grid[axis])));
            }
        }
        Ok(Self { lo, hi, grid })
    }

    /// The one-point base.
    pub fn point() -> Self {
        Self { lo: Vec::new(), hi: Vec::new(), grid: Vec::new() }
    }

    pub fn interval(lo: f64, hi: f64, samples: usize) -> Result<Self, GeometryError> {
        Self::new(vec![lo], vec![hi], vec![samples])
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn grid(&self) -> &[usize] {
        &self.grid
    }

    /// Membership with a relative slack of `1e-12` per axis.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter().enumerate().all(|(i, &v)| {
                let slack = 1e-12 * (self.hi[i] - self.lo[i]).max(1.0);
                v >= self.lo[i] - slack && v <= self.hi[i] + slack
            })
    }

    /// Squared distance from `x` to the box, zero inside.
    pub fn distance_squared(&self, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, &v)| {
                let d = if v < self.lo[i] {
                    self.lo[i] - v
                } else if v > self.hi[i] {
                    v - self.hi[i]
                } else {
                    0.0
                };
                d * d
            })
            .sum()
    }

    /// Grid points in row-major order, first axis slowest.
    pub fn samples(&self) -> Vec<Point> {
        let axes: Vec<Vec<f64>> = (0..self.dimension()).map(|i| axis_samples(self.lo[i], self.hi[i], self.grid[i])).collect();
        cartesian(&axes)
    }

    pub fn centre(&self) -> Point {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Sample points of the closed intersection with `other`, `None` if it is empty.
    pub(crate) fn overlap_samples(&self, other: &BaseDomain) -> Option<Vec<Point>> {
        if self.dimension() != other.dimension() {
            return None;
        }
        let mut axes = Vec::with_capacity(self.dimension());
        for i in 0..self.dimension() {
            let lo = self.lo[i].max(other.lo[i]);
            let hi = self.hi[i].min(other.hi[i]);
            if lo > hi {
                return None;
            }
            if lo == hi {
                axes.push(vec![lo]);
            } else {
                axes.push(axis_samples(lo, hi, self.grid[i].max(other.grid[i])));
            }
        }
        Some(cartesian(&axes))
    }
}

fn axis_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn cartesian(axes: &[Vec<f64>]) -> Vec<Point> {
    let mut out: Vec<Point> = vec![point(&[])];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &v in axis {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_axes() {
        assert!(BaseDomain::interval(1.0, 1.0, 3).is_err());
        assert!(BaseDomain::interval(0.0, 1.0, 1).is_err());
        assert!(BaseDomain::new(vec![0.0], vec![1.0, 2.0], vec![2]).is_err());
        assert!(BaseDomain::interval(0.0, f64::INFINITY, 3).is_err());
    }

    #[test]
    fn samples_cover_the_corners() {
        let b = BaseDomain::new(vec![0.0, -1.0], vec![1.0, 1.0], vec![2, 3]).unwrap();
        let s = b.samples();
        assert_eq!(s.len(), 6);
        assert_eq!(s[0].as_slice(), &[0.0, -1.0]);
        assert_eq!(s[5].as_slice(), &[1.0, 1.0]);
        assert!(s.iter().all(|p| b.contains(p)));
    }

    #[test]
    fn point_base_has_one_sample() {
        let b = BaseDomain::point();
        assert_eq!(b.samples().len(), 1);
        assert!(b.contains(&[]));
    }

    #[test]
    fn overlaps() {
        let a = BaseDomain::interval(0.0, 0.6, 4).unwrap();
        let b = BaseDomain::interval(0.4, 1.0, 4).unwrap();
        let s = a.overlap_samples(&b).unwrap();
        assert_eq!(s.first().unwrap()[0], 0.4);
        assert_eq!(s.last().unwrap()[0], 0.6);
        let c = BaseDomain::interval(0.7, 1.0, 2).unwrap();
        assert!(a.overlap_samples(&c).is_none());
    }
}
