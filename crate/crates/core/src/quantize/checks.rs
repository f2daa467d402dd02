//! Randomized and oracle checks of the algebra construction.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;
use rand::rngs::SmallRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use super::oracle::Representation;
use super::{AlgebraElement, IPSpace, Parent, PoissonSpace, QuantizeError, RewriteOrder};
use crate::report::CheckReport;

pub const MAX_RANK: usize = 4;
pub const MAX_WORD_LENGTH: usize = 4;
pub const OSCILLATOR_TOLERANCE: f64 = 1e-10;
pub const CLIFFORD_TOLERANCE: f64 = 1e-12;

fn small(rng: &mut SmallRng) -> f64 {
    rng.gen_range(-3..=3) as f64
}

/// A Poisson space with small integer `τ`.
pub fn random_poisson(rng: &mut SmallRng, rank: usize) -> PoissonSpace {
    let mut m = vec![vec![0.0; rank]; rank];
    for i in 0..rank {
        for j in i + 1..rank {
            m[i][j] = small(rng);
            m[j][i] = -m[i][j];
        }
    }
    PoissonSpace::from_matrix(&m, 0.0).expect("antisymmetric by construction")
}

/// An involutive pairing space with small integer entries and a random
/// involution on the generators.
pub fn random_ip(rng: &mut SmallRng, rank: usize) -> IPSpace {
    let mut order: Vec<usize> = (0..rank).collect();
    order.shuffle(rng);
    let mut p: Vec<usize> = (0..rank).collect();
    for pair in order.chunks(2) {
        if pair.len() == 2 && rng.gen_bool(0.5) {
            p[pair[0]] = pair[1];
            p[pair[1]] = pair[0];
        }
    }
    let mut s = vec![vec![0.0; rank]; rank];
    let mut y = vec![vec![0.0; rank]; rank];
    for i in 0..rank {
        for j in i..rank {
            s[i][j] = small(rng);
            s[j][i] = s[i][j];
            y[i][j] = small(rng);
            y[j][i] = y[i][j];
        }
    }
    // Re B is p-invariant and Im B is p-odd, so conj(B_ij) = B_{p(i)p(j)}.
    let b = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| Complex64::new(s[i][j] + s[p[i]][p[j]], y[i][j] - y[p[i]][p[j]]))
                .collect()
        })
        .collect();
    IPSpace::new(p, b, 0.0).expect("compatible by construction")
}

/// A random CCR or CAR parent of rank `1..=MAX_RANK`.
pub fn random_parent(rng: &mut SmallRng) -> Arc<Parent> {
    let rank = rng.gen_range(1..=MAX_RANK);
    Arc::new(if rng.gen_bool(0.5) { Parent::Ccr(random_poisson(rng, rank)) } else { Parent::Car(random_ip(rng, rank)) })
}

pub fn random_word(rng: &mut SmallRng, rank: usize, max_len: usize) -> Vec<usize> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..rank)).collect()
}

/// A sum of up to three words of length at most `MAX_WORD_LENGTH` with
/// Gaussian-integer coefficients.
pub fn random_element(rng: &mut SmallRng, parent: &Arc<Parent>) -> AlgebraElement {
    let mut out = AlgebraElement::zero(parent);
    for _ in 0..rng.gen_range(1..=3) {
        let w = random_word(rng, parent.rank(), MAX_WORD_LENGTH);
        let c = Complex64::new(small(rng), small(rng));
        let term = AlgebraElement::normal_form(parent, &w, c).expect("indices in range");
        out = out.add(&term).expect("same parent");
    }
    out
}

fn all_words(rank: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..rank {
                let mut w2: Vec<usize> = w.clone();
                w2.push(g);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// `[w_i, w_j] = i·τ_ij` and `{v_i, v_j} = B_ij` over every generator pair.
pub fn generator_relations(parent: &Arc<Parent>) -> Result<(f64, usize), QuantizeError> {
    let k = parent.rank();
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let (a, b) = (AlgebraElement::generator(parent, i)?, AlgebraElement::generator(parent, j)?);
            let (lhs, expected) = match &**parent {
                Parent::Ccr(w) => (a.commutator(&b)?, Complex64::new(0.0, w.tau(i, j))),
                Parent::Car(v) => (a.anticommutator(&b)?, v.pairing(i, j)),
            };
            worst = worst.max(lhs.distance(&AlgebraElement::scalar(parent, expected))?);
        }
    }
    Ok((worst, k * k))
}

/// `(ab)c = a(bc)` on random triples.
pub fn associativity(rng: &mut SmallRng, products: usize) -> Result<(f64, usize), QuantizeError> {
    let mut worst = 0.0f64;
    for _ in 0..products {
        let parent = random_parent(rng);
        let [a, b, c] = [(); 3].map(|_| random_element(rng, &parent));
        let left = a.multiply(&b)?.multiply(&c)?;
        let right = a.multiply(&b.multiply(&c)?)?;
        worst = worst.max(left.distance(&right)?);
        worst = worst.max(a.multiply(&AlgebraElement::unit(&parent))?.distance(&a)?);
    }
    Ok((worst, products))
}

/// `a** = a`, `(ab)* = b*a*` and `(λa)* = λ̄a*` on random pairs.
pub fn star_antihomomorphism(rng: &mut SmallRng, products: usize) -> Result<(f64, usize), QuantizeError> {
    let mut worst = 0.0f64;
    for _ in 0..products {
        let parent = random_parent(rng);
        let (a, b) = (random_element(rng, &parent), random_element(rng, &parent));
        let lambda = Complex64::new(small(rng), small(rng));
        worst = worst.max(a.star().star().distance(&a)?);
        worst = worst.max(a.multiply(&b)?.star().distance(&b.star().multiply(&a.star())?)?);
        worst = worst.max(a.scale(lambda).star().distance(&a.star().scale(lambda.conj()))?);
    }
    Ok((worst, products))
}

/// Leftmost-first and rightmost-first reduction give the same normal form.
pub fn confluence(rng: &mut SmallRng, words: usize) -> Result<(f64, usize), QuantizeError> {
    let one = Complex64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    for _ in 0..words {
        let parent = random_parent(rng);
        let w = random_word(rng, parent.rank(), 2 * MAX_WORD_LENGTH);
        let l = AlgebraElement::normal_form_with(&parent, &w, one, RewriteOrder::Leftmost)?;
        let r = AlgebraElement::normal_form_with(&parent, &w, one, RewriteOrder::Rightmost)?;
        worst = worst.max(l.distance(&r)?);
    }
    Ok((worst, words))
}

/// Rank 2, `τ₁₂ = 1`, every word of length at most 3 on a 12-level
/// oscillator compared on its lowest 6 levels.
pub fn oscillator_oracle() -> Result<(f64, usize), QuantizeError> {
    let parent = Arc::new(Parent::Ccr(PoissonSpace::from_matrix(&[vec![0.0, 1.0], vec![-1.0, 0.0]], 0.0)?));
    let words = all_words(2, 3);
    let worst = Representation::oscillator(1.0, 12, 6).deviation(&parent, &words)?;
    Ok((worst, words.len()))
}

/// `B = 2I` with trivial involution against gamma matrices, ranks 1 to 4,
/// every word of length at most 4.
pub fn clifford_oracle() -> Result<(f64, usize), QuantizeError> {
    let mut worst = 0.0f64;
    let mut samples = 0;
    for rank in 1..=MAX_RANK {
        let b = (0..rank)
            .map(|i| (0..rank).map(|j| Complex64::new(if i == j { 2.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        let parent = Arc::new(Parent::Car(IPSpace::new((0..rank).collect(), b, 0.0)?));
        let words = all_words(rank, MAX_WORD_LENGTH);
        worst = worst.max(Representation::clifford(rank).deviation(&parent, &words)?);
        samples += words.len();
    }
    Ok((worst, samples))
}

/// The normal forms of all words of length at most `k + 1` span exactly the
/// `2^k` strictly increasing words. Reports `|count − 2^k|` at the worst rank.
pub fn car_dimension(rng: &mut SmallRng) -> Result<(f64, usize), QuantizeError> {
    let one = Complex64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    let mut samples = 0;
    for rank in 1..=MAX_RANK {
        let parent = Arc::new(Parent::Car(random_ip(rng, rank)));
        let mut basis = BTreeSet::new();
        for w in all_words(rank, rank + 1) {
            let nf = AlgebraElement::normal_form(&parent, &w, one)?;
            basis.extend(nf.terms().map(|(w, _)| w.clone()));
            samples += 1;
        }
        let strictly_increasing = basis.iter().all(|w| w.letters().windows(2).all(|p| p[0] < p[1]));
        let deviation = if strictly_increasing { (basis.len() as f64 - (1u64 << rank) as f64).abs() } else { f64::INFINITY };
        worst = worst.max(deviation);
    }
    Ok((worst, samples))
}

/// The full algebra suite with `products` random samples per randomized check.
pub fn algebra_suite(seed: u64, products: usize) -> Vec<CheckReport> {
    let mut rng = SmallRng::seed_from_u64(seed);
    let mut relations = || -> Result<(f64, usize), QuantizeError> {
        let mut worst = 0.0f64;
        let mut n = 0;
        for _ in 0..16 {
            let (e, k) = generator_relations(&random_parent(&mut rng))?;
            worst = worst.max(e);
            n += k;
        }
        Ok((worst, n))
    };
    let relations = relations();
    vec![
        CheckReport::measure("quantize.generator_relations", 0.0, relations),
        CheckReport::measure("quantize.associativity", 0.0, associativity(&mut rng, products)),
        CheckReport::measure("quantize.star_antihomomorphism", 0.0, star_antihomomorphism(&mut rng, products)),
        CheckReport::measure("quantize.confluence", 0.0, confluence(&mut rng, products)),
        CheckReport::measure("quantize.car_dimension", 0.0, car_dimension(&mut rng)),
        CheckReport::measure("quantize.oracle.oscillator", OSCILLATOR_TOLERANCE, oscillator_oracle()),
        CheckReport::measure("quantize.oracle.clifford", CLIFFORD_TOLERANCE, clifford_oracle()),
    ]
}
