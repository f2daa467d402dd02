//! Matrix representations used as independent oracles for the rewrite rules.

use num_complex::Complex64;

use super::{AlgebraElement, Parent, QuantizeError};

/// A dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self { n, data: rows.concat() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, c: Complex64) {
        self.data[i * self.n + j] = c;
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: Complex64, other: &Matrix) -> Matrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + c * b).collect();
        Matrix { n: self.n, data }
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (n, m) = (self.n, other.n);
        let mut out = Matrix::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    for l in 0..m {
                        out.set(i * m + k, j * m + l, self.get(i, j) * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Largest entry difference on the leading `block × block` corner.
    pub fn block_distance(&self, other: &Matrix, block: usize) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..block.min(self.n) {
            for j in 0..block.min(self.n) {
                worst = worst.max((self.get(i, j) - other.get(i, j)).norm());
            }
        }
        worst
    }
}

/// Images of the generators under a (possibly truncated) representation.
#[derive(Debug, Clone)]
pub struct Representation {
    pub generators: Vec<Matrix>,
    /// Size of the leading block on which products are compared.
    pub block: usize,
}

impl Representation {
    /// Position and momentum on a truncated oscillator, scaled so that
    /// `[ρ(w₁), ρ(w₂)] = i·τ₁₂` away from the top levels.
    pub fn oscillator(tau12: f64, levels: usize, block: usize) -> Self {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let mut q = Matrix::zeros(levels);
        let mut p = Matrix::zeros(levels);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for n in 1..levels {
            let a = (n as f64).sqrt();
            // a|n⟩ = √n |n−1⟩
            q.set(n - 1, n, c(a * s, 0.0));
            q.set(n, n - 1, c(a * s, 0.0));
            p.set(n - 1, n, c(0.0, -a * s * tau12));
            p.set(n, n - 1, c(0.0, a * s * tau12));
        }
        Self { generators: vec![q, p], block }
    }

    /// Jordan–Wigner gamma matrices with `γ_i γ_j + γ_j γ_i = 2δ_ij`, the
    /// Clifford representation of the pairing `B = 2I`.
    pub fn clifford(rank: usize) -> Self {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let o = c(0.0, 0.0);
        let id = Matrix::identity(2);
        let x = Matrix::from_rows(&[vec![o, c(1.0, 0.0)], vec![c(1.0, 0.0), o]]);
        let y = Matrix::from_rows(&[vec![o, c(0.0, -1.0)], vec![c(0.0, 1.0), o]]);
        let z = Matrix::from_rows(&[vec![c(1.0, 0.0), o], vec![o, c(-1.0, 0.0)]]);
        let qubits = rank.div_ceil(2).max(1);
        let mut generators = Vec::with_capacity(rank);
        for g in 0..rank {
            let site = g / 2;
            let mut m = Matrix::identity(1);
            for q in 0..qubits {
                let factor = match q.cmp(&site) {
                    std::cmp::Ordering::Less => &z,
                    std::cmp::Ordering::Equal if g % 2 == 0 => &x,
                    std::cmp::Ordering::Equal => &y,
                    std::cmp::Ordering::Greater => &id,
                };
                m = m.kron(factor);
            }
            generators.push(m);
        }
        let block = 1 << qubits;
        Self { generators, block }
    }

    pub fn size(&self) -> usize {
        self.generators.first().map_or(1, Matrix::size)
    }

    /// The matrix of a word, read left to right.
    pub fn word(&self, letters: &[usize]) -> Matrix {
        letters.iter().fold(Matrix::identity(self.size()), |acc, &g| acc.mul(&self.generators[g]))
    }

    pub fn element(&self, a: &AlgebraElement) -> Matrix {
        let mut out = Matrix::zeros(self.size());
        for (w, c) in a.terms() {
            out = out.add_scaled(*c, &self.word(w.letters()));
        }
        out
    }

    /// Largest block deviation between the representation of the normal form
    /// of each word and the direct matrix product of its letters.
    pub fn deviation(&self, parent: &std::sync::Arc<Parent>, words: &[Vec<usize>]) -> Result<f64, QuantizeError> {
        let mut worst = 0.0f64;
        for w in words {
            let nf = AlgebraElement::normal_form(parent, w, Complex64::new(1.0, 0.0))?;
            worst = worst.max(self.element(&nf).block_distance(&self.word(w), self.block));
        }
        Ok(worst)
    }
}
