use num_complex::Complex64;

use super::QuantizeError;

/// A finite Poisson vector space `(W, τ)` on generators `w_1, …, w_k`.
///
/// Only the strict upper triangle is stored, so `τᵀ = −τ` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSpace {
    rank: usize,
    upper: Vec<f64>,
}

fn upper_index(rank: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < rank);
    i * rank - i * (i + 1) / 2 + (j - i - 1)
}

fn check_square<T>(m: &[Vec<T>]) -> Result<usize, QuantizeError> {
    let rank = m.len();
    if rank == 0 || m.iter().any(|row| row.len() != rank) {
        return Err(QuantizeError::Shape { rank });
    }
    Ok(rank)
}

impl PoissonSpace {
    /// `τ = 0` on `rank` generators.
    pub fn zero(rank: usize) -> Self {
        Self { rank, upper: vec![0.0; rank * rank.saturating_sub(1) / 2] }
    }

    /// Builds `τ` from a full matrix after checking `|τ_ij + τ_ji| ≤ tol`,
    /// then stores `(τ_ij − τ_ji)/2`.
    pub fn from_matrix(m: &[Vec<f64>], tol: f64) -> Result<Self, QuantizeError> {
        let rank = check_square(m)?;
        let mut out = Self::zero(rank);
        for i in 0..rank {
            let error = m[i][i].abs();
            if !(error <= tol) {
                return Err(QuantizeError::NotAntisymmetric { i, j: i, error, tolerance: tol });
            }
            for j in i + 1..rank {
                let error = (m[i][j] + m[j][i]).abs();
                if !(error <= tol) {
                    return Err(QuantizeError::NotAntisymmetric { i, j, error, tolerance: tol });
                }
                out.upper[upper_index(rank, i, j)] = 0.5 * (m[i][j] - m[j][i]);
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `τ(w_i, w_j)`, 0-based.
    pub fn tau(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper[upper_index(self.rank, i, j)],
            Greater => -self.upper[upper_index(self.rank, j, i)],
            Equal => 0.0,
        }
    }

    /// Largest `|m_ij + m_ji|` of a raw matrix.
    pub fn antisymmetry_defect(m: &[Vec<f64>]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..m.len() {
            for j in i..m.len() {
                worst = worst.max((m[i][j] + m[j][i]).abs());
            }
        }
        worst
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.rank).map(|i| (0..self.rank).map(|j| self.tau(i, j)).collect()).collect()
    }
}

/// `(i, j, |defect|)`.
type Defect = (usize, usize, f64);

/// A finite space with involution and symmetric pairing `(V, ∗, ⟨·,·⟩)`.
///
/// The involution sends `v_i` to `v_{p(i)}` and conjugates coefficients. The
/// pairing matrix `B_ij = ⟨v_i, v_j⟩` is stored exactly symmetric and exactly
/// compatible, `conj(B_ij) = B_{p(i)p(j)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IPSpace {
    involution: Vec<usize>,
    pairing: Vec<Vec<Complex64>>,
}

impl IPSpace {
    /// Checks the pairing within `tol`, then symmetrizes and averages it with
    /// its conjugated permutation so both identities hold exactly.
    pub fn new(involution: Vec<usize>, pairing: Vec<Vec<Complex64>>, tol: f64) -> Result<Self, QuantizeError> {
        let rank = check_square(&pairing)?;
        if involution.len() != rank {
            return Err(QuantizeError::NotAnInvolution(format!("permutation has length {}, rank is {rank}", involution.len())));
        }
        for (i, &p) in involution.iter().enumerate() {
            if p >= rank || involution[p] != i {
                return Err(QuantizeError::NotAnInvolution(format!("p(p({})) != {}", i + 1, i + 1)));
            }
        }
        let (symmetry, compatibility) = Self::defects(&involution, &pairing);
        if let Some((i, j, error)) = symmetry.filter(|d| !(d.2 <= tol)) {
            return Err(QuantizeError::NotSymmetric { i, j, error, tolerance: tol });
        }
        if let Some((i, j, error)) = compatibility.filter(|d| !(d.2 <= tol)) {
            return Err(QuantizeError::NotCompatible { i, j, error, tolerance: tol });
        }
        let sym: Vec<Vec<Complex64>> =
            (0..rank).map(|i| (0..rank).map(|j| (pairing[i][j] + pairing[j][i]) * 0.5).collect()).collect();
        let p = &involution;
        let exact = (0..rank).map(|i| (0..rank).map(|j| (sym[i][j] + sym[p[i]][p[j]].conj()) * 0.5).collect()).collect();
        Ok(Self { involution, pairing: exact })
    }

    /// Worst symmetry and compatibility defects with their positions.
    pub(crate) fn defects(involution: &[usize], pairing: &[Vec<Complex64>]) -> (Option<Defect>, Option<Defect>) {
        let rank = pairing.len();
        let mut sym: Option<Defect> = None;
        let mut comp: Option<Defect> = None;
        for i in 0..rank {
            for j in 0..rank {
                let s = (pairing[i][j] - pairing[j][i]).norm();
                if sym.is_none_or(|w| s > w.2) {
                    sym = Some((i, j, s));
                }
                let c = (pairing[i][j].conj() - pairing[involution[i]][involution[j]]).norm();
                if comp.is_none_or(|w| c > w.2) {
                    comp = Some((i, j, c));
                }
            }
        }
        (sym, comp)
    }

    pub fn rank(&self) -> usize {
        self.involution.len()
    }

    /// `p(i)`, 0-based.
    pub fn involution(&self, i: usize) -> usize {
        self.involution[i]
    }

    pub fn permutation(&self) -> &[usize] {
        &self.involution
    }

    /// `⟨v_i, v_j⟩`, 0-based.
    pub fn pairing(&self, i: usize, j: usize) -> Complex64 {
        self.pairing[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Complex64>] {
        &self.pairing
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn poisson_storage_is_antisymmetric() {
        let m = vec![vec![0.0, 1.0, -2.0], vec![-1.0, 0.0, 3.0], vec![2.0, -3.0, 0.0]];
        let w = PoissonSpace::from_matrix(&m, 0.0).unwrap();
        assert_eq!(w.matrix(), m);
        assert_eq!(w.tau(2, 1), -3.0);
        let bad = vec![vec![0.0, 1.0], vec![-0.9, 0.0]];
        assert!(matches!(PoissonSpace::from_matrix(&bad, 1e-8), Err(QuantizeError::NotAntisymmetric { .. })));
        let noisy = vec![vec![0.0, 1.0 + 1e-12], vec![-1.0, 0.0]];
        let w = PoissonSpace::from_matrix(&noisy, 1e-8).unwrap();
        assert_eq!(w.tau(0, 1), -w.tau(1, 0));
        assert!((PoissonSpace::antisymmetry_defect(&noisy) - 1e-12).abs() < 1e-15);
    }

    #[test]
    fn ip_space_checks() {
        let b = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
        let v = IPSpace::new(vec![1, 0], b.clone(), 0.0).unwrap();
        assert_eq!(v.involution(0), 1);
        assert_eq!(v.pairing(1, 0), c(1.0, 0.0));
        assert!(matches!(IPSpace::new(vec![1, 1], b.clone(), 0.0), Err(QuantizeError::NotAnInvolution(_))));
        let skew = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(2.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(IPSpace::new(vec![1, 0], skew, 1e-8), Err(QuantizeError::NotSymmetric { .. })));
        // With p = id the pairing must be real.
        let complex = vec![vec![c(0.0, 1.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(IPSpace::new(vec![0, 1], complex, 1e-8), Err(QuantizeError::NotCompatible { .. })));
    }

    #[test]
    fn enforcement_is_exact() {
        let b = vec![
            vec![c(0.0, 0.0), c(0.5, 1e-12), c(0.0, 0.0)],
            vec![c(0.5, -1e-12), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 1e-13)],
        ];
        let v = IPSpace::new(vec![1, 0, 2], b, 1e-10).unwrap();
        let (s, k) = IPSpace::defects(v.permutation(), v.matrix());
        assert_eq!(s.unwrap().2, 0.0);
        assert_eq!(k.unwrap().2, 0.0);
    }
}
