use std::sync::Arc;

use num_complex::Complex64;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use super::{AlgebraElement, Parent, QuantizeError};

const WORD_SAMPLES: usize = 16;
const MAX_WORD_LENGTH: usize = 4;
const DEFAULT_SEED: u64 = 0x5eed;

/// A ∗-algebra morphism determined by linear images of the generators.
///
/// Row `i` of the coefficient matrix is the image of generator `i` as a
/// combination of the target generators.
#[derive(Debug, Clone)]
pub struct AlgebraMorphism {
    source: Arc<Parent>,
    target: Arc<Parent>,
    matrix: Vec<Vec<Complex64>>,
    images: Vec<AlgebraElement>,
}

impl AlgebraMorphism {
    /// Checks that the generator map preserves `τ` (resp. the pairing and the
    /// involution) within `tol`, then runs a seeded random-word check that
    /// the extension commutes with normal ordering.
    pub fn new(source: Arc<Parent>, target: Arc<Parent>, matrix: Vec<Vec<Complex64>>, tol: f64) -> Result<Self, QuantizeError> {
        Self::with_seed(source, target, matrix, tol, DEFAULT_SEED)
    }

    pub fn with_seed(
        source: Arc<Parent>,
        target: Arc<Parent>,
        matrix: Vec<Vec<Complex64>>,
        tol: f64,
        seed: u64,
    ) -> Result<Self, QuantizeError> {
        let m = Self::unchecked(source, target, matrix)?;
        let (deviation, detail) = m.structure_deviation();
        if !(deviation <= tol) {
            return Err(QuantizeError::StructureViolation { deviation, tolerance: tol, detail });
        }
        m.check_random_words(tol, seed)?;
        Ok(m)
    }

    /// Builds the morphism from degree-one images.
    pub fn from_images(source: Arc<Parent>, target: Arc<Parent>, images: &[AlgebraElement], tol: f64) -> Result<Self, QuantizeError> {
        let k2 = target.rank();
        let mut matrix = Vec::with_capacity(images.len());
        for (i, img) in images.iter().enumerate() {
            if !(Arc::ptr_eq(img.parent(), &target) || **img.parent() == *target) {
                return Err(QuantizeError::ParentMismatch);
            }
            let mut row = vec![Complex64::new(0.0, 0.0); k2];
            for (w, c) in img.terms() {
                if w.len() != 1 {
                    return Err(QuantizeError::StructureViolation {
                        deviation: c.norm(),
                        tolerance: 0.0,
                        detail: format!("image of generator {} is not linear in the generators", i + 1),
                    });
                }
                row[w.letters()[0]] = *c;
            }
            matrix.push(row);
        }
        Self::new(source, target, matrix, tol)
    }

    pub fn identity(parent: &Arc<Parent>) -> Self {
        let k = parent.rank();
        let matrix = (0..k)
            .map(|i| (0..k).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        Self::unchecked(parent.clone(), parent.clone(), matrix).expect("square identity")
    }

    fn unchecked(source: Arc<Parent>, target: Arc<Parent>, matrix: Vec<Vec<Complex64>>) -> Result<Self, QuantizeError> {
        let (k, k2) = (source.rank(), target.rank());
        if matrix.len() != k || matrix.iter().any(|r| r.len() != k2) {
            return Err(QuantizeError::Shape { rank: k });
        }
        let zero = AlgebraElement::zero(&target);
        let mut images = Vec::with_capacity(k);
        for row in &matrix {
            let mut img = zero.clone();
            for (q, &c) in row.iter().enumerate() {
                if c != Complex64::new(0.0, 0.0) {
                    img = img.add(&AlgebraElement::generator(&target, q)?.scale(c))?;
                }
            }
            images.push(img);
        }
        Ok(Self { source, target, matrix, images })
    }

    pub fn source(&self) -> &Arc<Parent> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Parent> {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<Complex64>] {
        &self.matrix
    }

    /// The image of generator `i`.
    pub fn image(&self, i: usize) -> &AlgebraElement {
        &self.images[i]
    }

    /// Largest deviation from structure preservation, with a description.
    pub fn structure_deviation(&self) -> (f64, String) {
        let a = &self.matrix;
        let (k, k2) = (self.source.rank(), self.target.rank());
        let mut worst = (0.0f64, String::from("exact"));
        let mut note = |d: f64, what: String| {
            if d > worst.0 || d.is_nan() {
                worst = (if d.is_nan() { f64::INFINITY } else { d }, what);
            }
        };
        match (&*self.source, &*self.target) {
            (Parent::Ccr(tau), Parent::Ccr(tau2)) => {
                for i in 0..k {
                    for q in 0..k2 {
                        note(a[i][q].im.abs(), format!("image of w{} is not self-adjoint", i + 1));
                    }
                    for j in 0..k {
                        let mut s = Complex64::new(0.0, 0.0);
                        for p in 0..k2 {
                            for q in 0..k2 {
                                s += a[i][p] * a[j][q] * tau2.tau(p, q);
                            }
                        }
                        note((s - tau.tau(i, j)).norm(), format!("tau({}, {})", i + 1, j + 1));
                    }
                }
            }
            (Parent::Car(b), Parent::Car(b2)) => {
                for i in 0..k {
                    for r in 0..k2 {
                        let d = (a[i][b2.involution(r)].conj() - a[b.involution(i)][r]).norm();
                        note(d, format!("involution at v{}", i + 1));
                    }
                    for j in 0..k {
                        let mut s = Complex64::new(0.0, 0.0);
                        for p in 0..k2 {
                            for q in 0..k2 {
                                s += a[i][p] * a[j][q] * b2.pairing(p, q);
                            }
                        }
                        note((s - b.pairing(i, j)).norm(), format!("pairing({}, {})", i + 1, j + 1));
                    }
                }
            }
            _ => note(f64::INFINITY, "CCR and CAR algebras cannot be mapped to each other".into()),
        }
        worst
    }

    fn check_random_words(&self, tol: f64, seed: u64) -> Result<(), QuantizeError> {
        let k = self.source.rank();
        if k == 0 {
            return Ok(());
        }
        let scale = self.matrix.iter().flatten().map(|c| c.norm()).fold(1.0, f64::max);
        let allowed = 64.0 * tol * scale.powi(MAX_WORD_LENGTH as i32);
        let mut rng = SmallRng::seed_from_u64(seed);
        let one = Complex64::new(1.0, 0.0);
        for _ in 0..WORD_SAMPLES {
            let len = rng.gen_range(1..=MAX_WORD_LENGTH);
            let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..k)).collect();
            let reduced = self.apply(&AlgebraElement::normal_form(&self.source, &word, one)?)?;
            let mut direct = AlgebraElement::unit(&self.target);
            for &g in &word {
                direct = direct.multiply(&self.images[g])?;
            }
            let deviation = reduced.distance(&direct)?;
            if !(deviation <= allowed) {
                return Err(QuantizeError::StructureViolation {
                    deviation,
                    tolerance: allowed,
                    detail: format!("word {:?} does not commute with normal ordering", word.iter().map(|i| i + 1).collect::<Vec<_>>()),
                });
            }
        }
        Ok(())
    }

    /// Extends the generator map linearly and multiplicatively.
    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement, QuantizeError> {
        if !(Arc::ptr_eq(a.parent(), &self.source) || **a.parent() == *self.source) {
            return Err(QuantizeError::ParentMismatch);
        }
        let mut out = AlgebraElement::zero(&self.target);
        for (w, c) in a.terms() {
            let mut product = AlgebraElement::scalar(&self.target, *c);
            for &g in w.letters() {
                product = product.multiply(&self.images[g])?;
            }
            out = out.add(&product)?;
        }
        Ok(out)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &AlgebraMorphism) -> Result<AlgebraMorphism, QuantizeError> {
        if !(Arc::ptr_eq(&self.target, &next.source) || *self.target == *next.source) {
            return Err(QuantizeError::ParentMismatch);
        }
        let (k, mid, k2) = (self.source.rank(), self.target.rank(), next.target.rank());
        let matrix = (0..k)
            .map(|i| {
                (0..k2)
                    .map(|r| (0..mid).map(|q| self.matrix[i][q] * next.matrix[q][r]).sum())
                    .collect()
            })
            .collect();
        Self::unchecked(self.source.clone(), next.target.clone(), matrix)
    }

    /// Largest coefficient difference between the generator images.
    pub fn distance(&self, other: &AlgebraMorphism) -> f64 {
        if self.matrix.len() != other.matrix.len() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for (a, b) in self.matrix.iter().zip(&other.matrix) {
            if a.len() != b.len() {
                return f64::INFINITY;
            }
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantize::PoissonSpace;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ccr(m: &[Vec<f64>]) -> Arc<Parent> {
        Arc::new(Parent::Ccr(PoissonSpace::from_matrix(m, 0.0).unwrap()))
    }

    fn rank2() -> Arc<Parent> {
        ccr(&[vec![0.0, 1.0], vec![-1.0, 0.0]])
    }

    #[test]
    fn identity_acts_trivially() {
        let p = rank2();
        let id = AlgebraMorphism::identity(&p);
        let a = crate::quantize::parse_element(&p, "w2 w1 w2 + 3*i").unwrap();
        assert_eq!(id.apply(&a).unwrap(), a);
    }

    #[test]
    fn embedding_into_larger_rank() {
        let small = rank2();
        let big = ccr(&[
            vec![0.0, 1.0, 2.0, 0.0],
            vec![-1.0, 0.0, 0.0, 1.0],
            vec![-2.0, 0.0, 0.0, 3.0],
            vec![0.0, -1.0, -3.0, 0.0],
        ]);
        let m = vec![vec![c(1.0), c(0.0), c(0.0), c(0.0)], vec![c(0.0), c(1.0), c(0.0), c(0.0)]];
        let f = AlgebraMorphism::new(small.clone(), big.clone(), m, 1e-10).unwrap();
        let a = AlgebraElement::normal_form(&small, &[1, 0], c(1.0)).unwrap();
        let b = f.apply(&a).unwrap();
        assert_eq!(b.coefficient(&[0, 1]), c(1.0));
        assert_eq!(b.scalar_part(), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn scaling_breaks_tau() {
        let p = rank2();
        let m = vec![vec![c(2.0), c(0.0)], vec![c(0.0), c(1.0)]];
        match AlgebraMorphism::new(p.clone(), p, m, 1e-10) {
            Err(QuantizeError::StructureViolation { deviation, .. }) => assert_eq!(deviation, 1.0),
            other => panic!("expected a structure violation, got {other:?}"),
        }
    }

    #[test]
    fn composition_multiplies_matrices() {
        let p = rank2();
        // The symplectic swap (w1, w2) ↦ (w2, −w1) preserves τ.
        let s = AlgebraMorphism::new(p.clone(), p.clone(), vec![vec![c(0.0), c(1.0)], vec![c(-1.0), c(0.0)]], 0.0).unwrap();
        let s2 = s.then(&s).unwrap();
        let minus = AlgebraMorphism::new(p.clone(), p.clone(), vec![vec![c(-1.0), c(0.0)], vec![c(0.0), c(-1.0)]], 0.0).unwrap();
        assert_eq!(s2.distance(&minus), 0.0);
        let a = crate::quantize::parse_element(&p, "w1 w2^2 + w2").unwrap();
        assert_eq!(s2.apply(&a).unwrap(), s.apply(&s.apply(&a).unwrap()).unwrap());
    }
}
