use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use smallvec::SmallVec;

use super::{IPSpace, PoissonSpace, QuantizeError};

/// The structure an algebra is built from.
#[derive(Debug, Clone, PartialEq)]
pub enum Parent {
    Ccr(PoissonSpace),
    Car(IPSpace),
}

impl Parent {
    pub fn rank(&self) -> usize {
        match self {
            Parent::Ccr(w) => w.rank(),
            Parent::Car(v) => v.rank(),
        }
    }

    /// The letter generators are rendered with.
    pub fn letter(&self) -> char {
        match self {
            Parent::Ccr(_) => 'w',
            Parent::Car(_) => 'v',
        }
    }

    fn involution(&self, i: usize) -> usize {
        match self {
            Parent::Ccr(_) => i,
            Parent::Car(v) => v.involution(i),
        }
    }
}

/// A generator word, ordered by length first and then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub SmallVec<[usize; 8]>);

impl Word {
    pub fn unit() -> Self {
        Word(SmallVec::new())
    }

    pub fn from_slice(letters: &[usize]) -> Self {
        Word(SmallVec::from_slice(letters))
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which reducible position the rewriting picks first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RewriteOrder {
    #[default]
    Leftmost,
    Rightmost,
}

/// A normal-ordered element of a CCR or CAR algebra.
#[derive(Clone)]
pub struct AlgebraElement {
    parent: Arc<Parent>,
    terms: BTreeMap<Word, Complex64>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement({self})")
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_parent(other) && self.terms == other.terms
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn add_term(terms: &mut BTreeMap<Word, Complex64>, word: Word, c: Complex64) {
    if c == zero() {
        return;
    }
    match terms.entry(word) {
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if *e.get() == zero() {
                e.remove();
            }
        }
        Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

impl AlgebraElement {
    pub fn zero(parent: &Arc<Parent>) -> Self {
        Self { parent: parent.clone(), terms: BTreeMap::new() }
    }

    pub fn unit(parent: &Arc<Parent>) -> Self {
        Self::scalar(parent, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(parent: &Arc<Parent>, c: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        add_term(&mut terms, Word::unit(), c);
        Self { parent: parent.clone(), terms }
    }

    /// The generator with 0-based index `i`.
    pub fn generator(parent: &Arc<Parent>, i: usize) -> Result<Self, QuantizeError> {
        Self::normal_form(parent, &[i], Complex64::new(1.0, 0.0))
    }

    /// `c · word`, reduced with the leftmost rewrite order.
    pub fn normal_form(parent: &Arc<Parent>, word: &[usize], c: Complex64) -> Result<Self, QuantizeError> {
        Self::normal_form_with(parent, word, c, RewriteOrder::Leftmost)
    }

    /// `c · word`, reduced with an explicit choice of rewrite order.
    pub fn normal_form_with(parent: &Arc<Parent>, word: &[usize], c: Complex64, order: RewriteOrder) -> Result<Self, QuantizeError> {
        let rank = parent.rank();
        if let Some(&index) = word.iter().find(|&&i| i >= rank) {
            return Err(QuantizeError::IndexOutOfRange { index, rank });
        }
        let mut out = Self::zero(parent);
        reduce(parent, Word::from_slice(word), c, order, &mut out.terms);
        Ok(out)
    }

    pub fn parent(&self) -> &Arc<Parent> {
        &self.parent
    }

    /// Terms in graded lexicographic order of their words.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &[usize]) -> Complex64 {
        self.terms.get(&Word::from_slice(word)).copied().unwrap_or_else(zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of `1`.
    pub fn scalar_part(&self) -> Complex64 {
        self.coefficient(&[])
    }

    pub fn same_parent(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) || *self.parent == *other.parent
    }

    fn check(&self, other: &Self) -> Result<(), QuantizeError> {
        if self.same_parent(other) {
            Ok(())
        } else {
            Err(QuantizeError::ParentMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, QuantizeError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            add_term(&mut out.terms, w.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, QuantizeError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(&self.parent);
        for (w, v) in &self.terms {
            add_term(&mut out.terms, w.clone(), v * c);
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, QuantizeError> {
        self.check(other)?;
        let mut out = Self::zero(&self.parent);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut word = a.clone();
                word.0.extend_from_slice(&b.0);
                reduce(&self.parent, word, ca * cb, RewriteOrder::Leftmost, &mut out.terms);
            }
        }
        Ok(out)
    }

    /// Reverses words, applies the generator involution and conjugates
    /// coefficients.
    pub fn star(&self) -> Self {
        let mut out = Self::zero(&self.parent);
        for (w, c) in &self.terms {
            let word = Word(w.0.iter().rev().map(|&i| self.parent.involution(i)).collect());
            reduce(&self.parent, word, c.conj(), RewriteOrder::Leftmost, &mut out.terms);
        }
        out
    }

    /// `ab − ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self, QuantizeError> {
        self.multiply(other)?.sub(&other.multiply(self)?)
    }

    /// `ab + ba`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self, QuantizeError> {
        self.multiply(other)?.add(&other.multiply(self)?)
    }

    /// Largest coefficient difference to `other`.
    pub fn distance(&self, other: &Self) -> Result<f64, QuantizeError> {
        Ok(self.sub(other)?.terms.values().map(|c| c.norm()).fold(0.0, f64::max))
    }
}

/// Rewrites `c · word` to normal form and accumulates it into `out`.
fn reduce(parent: &Parent, word: Word, c: Complex64, order: RewriteOrder, out: &mut BTreeMap<Word, Complex64>) {
    let mut stack = vec![(word, c)];
    while let Some((word, c)) = stack.pop() {
        if c == zero() {
            continue;
        }
        let w = &word.0;
        let strict = matches!(parent, Parent::Car(_));
        let reducible = |k: usize| if strict { w[k] >= w[k + 1] } else { w[k] > w[k + 1] };
        let n = w.len();
        let position = match order {
            RewriteOrder::Leftmost => (0..n.saturating_sub(1)).find(|&k| reducible(k)),
            RewriteOrder::Rightmost => (0..n.saturating_sub(1)).rev().find(|&k| reducible(k)),
        };
        let Some(k) = position else {
            add_term(out, word, c);
            continue;
        };
        let (j, i) = (w[k], w[k + 1]);
        let mut contracted: SmallVec<[usize; 8]> = SmallVec::with_capacity(n - 2);
        contracted.extend_from_slice(&w[..k]);
        contracted.extend_from_slice(&w[k + 2..]);
        match parent {
            Parent::Ccr(tau) => {
                let mut swapped = w.clone();
                swapped.swap(k, k + 1);
                stack.push((Word(swapped), c));
                stack.push((Word(contracted), c * Complex64::new(0.0, tau.tau(j, i))));
            }
            Parent::Car(ip) if i == j => {
                stack.push((Word(contracted), c * ip.pairing(i, i) * 0.5));
            }
            Parent::Car(ip) => {
                let mut swapped = w.clone();
                swapped.swap(k, k + 1);
                stack.push((Word(swapped), -c));
                stack.push((Word(contracted), c * ip.pairing(j, i)));
            }
        }
    }
}

fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x == 0.0 {
        f.write_str("0")
    } else {
        write!(f, "{x}")
    }
}

/// Renders a coefficient as `re`, `i*im` or `(re+i*im)`.
pub(crate) fn write_coefficient(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    if c.im == 0.0 {
        write_real(f, c.re)
    } else if c.re == 0.0 {
        f.write_str("i*")?;
        write_real(f, c.im)
    } else {
        f.write_str("(")?;
        write_real(f, c.re)?;
        f.write_str("+i*")?;
        write_real(f, c.im)?;
        f.write_str(")")
    }
}

impl fmt::Display for AlgebraElement {
    /// Terms as `coeff * w1^2 w3`, joined by ` + ` in graded lexicographic
    /// order. The unit word renders as `1` and the zero element as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let letter = self.parent.letter();
        for (n, (w, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write_coefficient(f, *c)?;
            f.write_str(" * ")?;
            if w.is_empty() {
                f.write_str("1")?;
                continue;
            }
            let letters = w.letters();
            let mut k = 0;
            let mut first = true;
            while k < letters.len() {
                let mut run = 1;
                while k + run < letters.len() && letters[k + run] == letters[k] {
                    run += 1;
                }
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{letter}{}", letters[k] + 1)?;
                if run > 1 {
                    write!(f, "^{run}")?;
                }
                first = false;
                k += run;
            }
        }
        Ok(())
    }
}
