use super::{GeometryError, Section, SpacetimeFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Future,
    Past,
}

/// The vertical future or past `J±_v(σ(U))` of a section.
#[derive(Clone, Debug)]
pub struct VerticalRegion {
    section: Section,
    direction: Direction,
}

impl VerticalRegion {
    /// Future: `t ≥ σ(x)`. Past: `t ≤ σ(x)`.
    pub fn contains(&self, t: f64, x: &[f64]) -> bool {
        let s = self.section.eval(x);
        match self.direction {
            Direction::Future => t >= s,
            Direction::Past => t <= s,
        }
    }

    pub fn section(&self) -> &Section {
        &self.section
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }
}

pub fn vertical_region(family: &SpacetimeFamily, section: Section, direction: Direction) -> Result<VerticalRegion, GeometryError> {
    section.validate(family)?;
    Ok(VerticalRegion { section, direction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BaseDomain;

    #[test]
    fn membership() {
        let fam = SpacetimeFamily::constant(BaseDomain::interval(0.0, 1.0, 5).unwrap(), 1.0).unwrap();
        let future = vertical_region(&fam, Section::constant(0.0), Direction::Future).unwrap();
        assert!(future.contains(1.0, &[0.3]));
        assert!(!future.contains(-1.0, &[0.3]));
        let past = vertical_region(&fam, Section::new(|x| x[0]), Direction::Past).unwrap();
        assert!(past.contains(0.4, &[0.5]));
        assert!(!past.contains(0.6, &[0.5]));
    }

    #[test]
    fn future_and_past_meet_on_the_graph() {
        let fam = SpacetimeFamily::constant(BaseDomain::interval(0.0, 1.0, 5).unwrap(), 1.0).unwrap();
        let sigma = Section::new(|x| 0.5 * x[0] - 0.1);
        let f = vertical_region(&fam, sigma.clone(), Direction::Future).unwrap();
        let p = vertical_region(&fam, sigma.clone(), Direction::Past).unwrap();
        for (t, x) in fam.sample_points() {
            assert!(f.contains(t, &x) || p.contains(t, &x));
            assert_eq!(f.contains(t, &x) && p.contains(t, &x), t == sigma.eval(&x));
        }
        let s = sigma.eval(&[0.4]);
        assert!(f.contains(s, &[0.4]) && p.contains(s, &[0.4]));
    }

    #[test]
    fn section_must_lie_in_the_fiber() {
        let fam = SpacetimeFamily::builder(BaseDomain::interval(0.0, 1.0, 3).unwrap()).fiber(|_| -1.0, |_| 1.0).build().unwrap();
        assert!(vertical_region(&fam, Section::constant(2.0), Direction::Future).is_err());
    }
}
