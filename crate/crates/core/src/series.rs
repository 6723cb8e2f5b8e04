//! ℤ₂-graded truncated multivariate power series.
//!
//! Carrier for K = k[[x_i]] and K ⊗ A computations: potentials Φ, master
//! equation solutions Γ, and structure-constant series. Variables carry a
//! parity and an optional rational weight (the |x_i| grading of the Euler
//! bookkeeping). Odd variables square to zero; multiplication follows the
//! Koszul sign rule with monomials kept in ascending variable order.
//!
//! Terms are stored sparsely as exponent-vector → coefficient, ordered by
//! (total degree, lexicographic) so all iteration is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::scalar::{rat_to_string, C64, Rat};

/// ℤ₂ parity of a variable or basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity sum (group law of ℤ₂).
    pub fn plus(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// 0 for even, 1 for odd.
    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// A named series variable with parity and optional weight.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedVariable {
    pub name: String,
    pub parity: Parity,
    pub weight: Option<Rat>,
}

/// Ordered list of variables shared by all series of one ring.
#[derive(Debug, Clone, PartialEq)]
pub struct VarRing {
    vars: Vec<GradedVariable>,
}

impl VarRing {
    /// Build a ring; names must be unique.
    pub fn new(vars: Vec<GradedVariable>) -> Self {
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                assert_ne!(vars[i].name, vars[j].name, "duplicate variable name");
            }
        }
        VarRing { vars }
    }

    /// All-even unweighted variables with the given names.
    pub fn even(names: &[&str]) -> Arc<Self> {
        Arc::new(Self::new(
            names
                .iter()
                .map(|n| GradedVariable {
                    name: (*n).to_string(),
                    parity: Parity::Even,
                    weight: None,
                })
                .collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var(&self, i: usize) -> &GradedVariable {
        &self.vars[i]
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.vars[i].parity
    }

    /// Parity of a monomial: sum of parities of its variables.
    pub fn monomial_parity(&self, e: &Expo) -> Parity {
        let mut odd = 0u32;
        for (i, &k) in e.0.iter().enumerate() {
            if self.vars[i].parity == Parity::Odd {
                odd += k as u32;
            }
        }
        if odd % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Weight of a monomial; `None` if any participating variable is
    /// unweighted.
    pub fn monomial_weight(&self, e: &Expo) -> Option<Rat> {
        let mut w = <Rat as Coeff>::zero();
        for (i, &k) in e.0.iter().enumerate() {
            if k > 0 {
                let wi = self.vars[i].weight.as_ref()?;
                w += wi * Rat::from_integer(k.into());
            }
        }
        Some(w)
    }
}

/// Exponent vector of a monomial, one entry per ring variable.
///
/// Ordered by (total degree, lexicographic) so that degree-by-degree
/// iteration falls out of map order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expo(pub Vec<u8>);

impl Expo {
    pub fn zero(nvars: usize) -> Self {
        Expo(vec![0; nvars])
    }

    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Expo(e)
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }
}

impl Ord for Expo {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.total(), &self.0).cmp(&(other.total(), &other.0))
    }
}

impl PartialOrd for Expo {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Coefficient ring abstraction: exact rationals or complex floats.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_i64(n: i64) -> Self;
}

impl Coeff for Rat {
    fn zero() -> Self {
        num::Zero::zero()
    }
    fn one() -> Self {
        num::One::one()
    }
    fn is_zero(&self) -> bool {
        num::Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_i64(n: i64) -> Self {
        Rat::from_integer(n.into())
    }
}

impl Coeff for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_i64(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
}

/// Koszul sign (`true` means −1) and combined exponent of a monomial
/// product, or `None` when an odd variable would appear squared.
pub fn expo_mul(ring: &VarRing, a: &Expo, b: &Expo) -> Option<(Expo, bool)> {
    let n = ring.len();
    let mut out = vec![0u8; n];
    let mut negative = false;
    // Count odd-variable transpositions: every odd occurrence in `b`
    // at index i crosses every odd occurrence in `a` at index j > i.
    let mut total_odd_a: u32 = 0;
    for i in 0..n {
        if ring.parity(i) == Parity::Odd {
            total_odd_a += a.0[i] as u32;
        }
    }
    let mut seen_odd_a: u32 = 0;
    for i in 0..n {
        let ai = a.0[i];
        let bi = b.0[i];
        if ring.parity(i) == Parity::Odd {
            if ai + bi >= 2 {
                return None;
            }
            let odd_in_a_above = total_odd_a - seen_odd_a - ai as u32;
            if bi == 1 && odd_in_a_above % 2 == 1 {
                negative = !negative;
            }
            seen_odd_a += ai as u32;
        }
        out[i] = ai + bi;
    }
    Some((Expo(out), negative))
}

/// All exponent vectors of total degree ≤ `max_deg`, respecting the
/// square-zero cap on odd variables, in (degree, lex) order.
pub fn monomials_up_to(ring: &VarRing, max_deg: usize) -> Vec<Expo> {
    let mut acc = vec![Expo::zero(ring.len())];
    let mut out = Vec::new();
    for i in 0..ring.len() {
        let cap = if ring.parity(i) == Parity::Odd {
            1usize
        } else {
            max_deg
        };
        let mut next = Vec::new();
        for e in &acc {
            let used = e.total();
            for k in 0..=cap.min(max_deg - used) {
                let mut e2 = e.clone();
                e2.0[i] = k as u8;
                next.push(e2);
            }
        }
        acc = next;
    }
    out.extend(acc);
    out.sort();
    out
}

/// Truncated graded power series over `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSeries<T: Coeff> {
    ring: Arc<VarRing>,
    trunc: usize,
    terms: BTreeMap<Expo, T>,
}

impl<T: Coeff> GradedSeries<T> {
    pub fn zero(ring: Arc<VarRing>, trunc: usize) -> Self {
        GradedSeries {
            ring,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: Arc<VarRing>, trunc: usize, c: T) -> Self {
        let mut s = Self::zero(ring, trunc);
        s.add_term(Expo::zero(s.ring.len()), c);
        s
    }

    pub fn one(ring: Arc<VarRing>, trunc: usize) -> Self {
        Self::constant(ring, trunc, T::one())
    }

    /// The variable `x_i` as a series.
    pub fn var(ring: Arc<VarRing>, trunc: usize, i: usize) -> Self {
        let mut s = Self::zero(ring, trunc);
        let n = s.ring.len();
        s.add_term(Expo::unit(n, i), T::one());
        s
    }

    pub fn monomial(ring: Arc<VarRing>, trunc: usize, e: Expo, c: T) -> Self {
        let mut s = Self::zero(ring, trunc);
        s.add_term(e, c);
        s
    }

    pub fn ring(&self) -> &Arc<VarRing> {
        &self.ring
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &T)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Expo) -> T {
        self.terms.get(e).cloned().unwrap_or_else(T::zero)
    }

    /// Add `c` to the coefficient of `e`, respecting truncation and
    /// dropping odd-variable overflows (exponent ≥ 2 on an odd variable
    /// means the term is identically zero).
    pub fn add_term(&mut self, e: Expo, c: T) {
        if c.is_zero() || e.total() > self.trunc {
            return;
        }
        for (i, &k) in e.0.iter().enumerate() {
            if k >= 2 && self.ring.parity(i) == Parity::Odd {
                return;
            }
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(T::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    fn assert_compatible(&self, other: &Self) {
        assert!(
            *self.ring == *other.ring && self.trunc == other.trunc,
            "series ring/truncation mismatch"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.trunc);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.trunc);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = Self::zero(self.ring.clone(), self.trunc);
        for (ea, ca) in &self.terms {
            if ea.total() > self.trunc {
                continue;
            }
            for (eb, cb) in &other.terms {
                if ea.total() + eb.total() > self.trunc {
                    continue;
                }
                if let Some((e, negative)) = expo_mul(&self.ring, ea, eb) {
                    let c = ca.mul(cb);
                    out.add_term(e, if negative { c.neg() } else { c });
                }
            }
        }
        out
    }

    /// Left partial derivative ∂/∂x_i with Koszul signs: for odd x_i the
    /// derivation anticommutes past the odd variables written before
    /// position i in the (ascending-ordered) monomial.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.trunc);
        for (e, c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.0[i] = k - 1;
            let coeff = match self.ring.parity(i) {
                Parity::Even => c.mul(&T::from_i64(k as i64)),
                Parity::Odd => {
                    let mut crossings = 0u32;
                    for j in 0..i {
                        if self.ring.parity(j) == Parity::Odd {
                            crossings += e.0[j] as u32;
                        }
                    }
                    if crossings % 2 == 1 {
                        c.neg()
                    } else {
                        c.clone()
                    }
                }
            };
            out.add_term(e2, coeff);
        }
        out
    }

    /// The homogeneous part of total degree `n`.
    pub fn homogeneous_part(&self, n: usize) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.trunc);
        for (e, c) in &self.terms {
            if e.total() == n {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Drop all terms of total degree ≤ `n`.
    pub fn drop_through_degree(&self, n: usize) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.trunc);
        for (e, c) in &self.terms {
            if e.total() > n {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Constant term (value at x = 0).
    pub fn constant_term(&self) -> T {
        self.coeff(&Expo::zero(self.ring.len()))
    }

    /// Largest total degree with a nonzero term (0 for the zero series).
    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|e| e.total()).max().unwrap_or(0)
    }

    /// True when every term's parity equals `p`.
    pub fn is_parity_homogeneous(&self, p: Parity) -> bool {
        self.terms
            .keys()
            .all(|e| self.ring.monomial_parity(e) == p)
    }

    /// Re-truncate to a (smaller or larger) order.
    pub fn with_trunc(&self, trunc: usize) -> Self {
        let mut out = Self::zero(self.ring.clone(), trunc);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl GradedSeries<Rat> {
    /// Human-readable rendering with `p/q` coefficients, ordered by
    /// (degree, lex): e.g. `1/2*x0^2*x2`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let mut factors = vec![rat_to_string(c)];
            for (i, &k) in e.0.iter().enumerate() {
                if k == 1 {
                    factors.push(self.ring.var(i).name.clone());
                } else if k > 1 {
                    factors.push(format!("{}^{}", self.ring.var(i).name, k));
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mixed_ring() -> Arc<VarRing> {
        Arc::new(VarRing::new(vec![
            GradedVariable {
                name: "x".into(),
                parity: Parity::Even,
                weight: None,
            },
            GradedVariable {
                name: "t".into(),
                parity: Parity::Odd,
                weight: None,
            },
            GradedVariable {
                name: "s".into(),
                parity: Parity::Odd,
                weight: None,
            },
        ]))
    }

    #[test]
    fn odd_square_vanishes() {
        let ring = mixed_ring();
        let t = GradedSeries::<Rat>::var(ring, 4, 1);
        assert!(t.mul(&t).is_zero());
    }

    #[test]
    fn odd_anticommutativity() {
        let ring = mixed_ring();
        let t = GradedSeries::<Rat>::var(ring.clone(), 4, 1);
        let s = GradedSeries::<Rat>::var(ring, 4, 2);
        let ts = t.mul(&s);
        let st = s.mul(&t);
        assert!(ts.add(&st).is_zero());
        assert!(!ts.is_zero());
    }

    #[test]
    fn truncated_product_of_binomials() {
        let ring = mixed_ring();
        let one = GradedSeries::<Rat>::one(ring.clone(), 2);
        let x = GradedSeries::<Rat>::var(ring.clone(), 2, 0);
        let lhs = one.add(&x).mul(&one.sub(&x));
        let mut expect = GradedSeries::<Rat>::one(ring.clone(), 2);
        expect.add_term(Expo(vec![2, 0, 0]), rat(-1, 1));
        assert_eq!(lhs, expect);
    }

    fn random_series(ring: &Arc<VarRing>, trunc: usize, rng: &mut ChaCha8Rng) -> GradedSeries<Rat> {
        let mut s = GradedSeries::zero(ring.clone(), trunc);
        for _ in 0..6 {
            let e: Vec<u8> = (0..ring.len())
                .map(|i| {
                    if ring.parity(i) == Parity::Odd {
                        rng.random_range(0..=1)
                    } else {
                        rng.random_range(0..=2)
                    }
                })
                .collect();
            let c = rat(rng.random_range(-5..=5), rng.random_range(1..=4));
            s.add_term(Expo(e), c);
        }
        s
    }

    #[test]
    fn associativity_and_koszul_on_random_series() {
        let ring = mixed_ring();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let a = random_series(&ring, 4, &mut rng);
            let b = random_series(&ring, 4, &mut rng);
            let c = random_series(&ring, 4, &mut rng);
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }
        // Koszul commutation on parity-homogeneous samples: monomials.
        for ea in [
            Expo(vec![1, 0, 0]),
            Expo(vec![0, 1, 0]),
            Expo(vec![2, 1, 1]),
            Expo(vec![0, 1, 1]),
        ] {
            for eb in [Expo(vec![1, 1, 0]), Expo(vec![0, 0, 1]), Expo(vec![1, 0, 1])] {
                let a = GradedSeries::monomial(ring.clone(), 8, ea.clone(), rat(1, 1));
                let b = GradedSeries::monomial(ring.clone(), 8, eb.clone(), rat(1, 1));
                let pa = ring.monomial_parity(&ea);
                let pb = ring.monomial_parity(&eb);
                let ab = a.mul(&b);
                let ba = b.mul(&a);
                if pa == Parity::Odd && pb == Parity::Odd {
                    assert_eq!(ab, ba.neg(), "odd-odd must anticommute");
                } else {
                    assert_eq!(ab, ba);
                }
            }
        }
    }

    #[test]
    fn left_partial_signs() {
        // d/ds (t*s) = -t when t, s odd and t written first.
        let ring = mixed_ring();
        let t = GradedSeries::<Rat>::var(ring.clone(), 4, 1);
        let s = GradedSeries::<Rat>::var(ring.clone(), 4, 2);
        let ts = t.mul(&s);
        assert_eq!(ts.partial(2), t.neg());
        assert_eq!(ts.partial(1), s);
        // Even variable: d/dx x^2 = 2x.
        let x = GradedSeries::<Rat>::var(ring.clone(), 4, 0);
        assert_eq!(x.mul(&x).partial(0), x.scale(&rat(2, 1)));
    }

    #[test]
    fn truncation_drops_high_degree() {
        let ring = mixed_ring();
        let x = GradedSeries::<Rat>::var(ring, 2, 0);
        let x2 = x.mul(&x);
        assert_eq!(x2.max_degree(), 2);
        assert!(x2.mul(&x).is_zero());
    }

    #[test]
    fn render_is_ordered_and_exact() {
        let ring = mixed_ring();
        let mut s = GradedSeries::<Rat>::zero(ring, 4);
        s.add_term(Expo(vec![2, 0, 0]), rat(1, 2));
        s.add_term(Expo(vec![0, 0, 0]), rat(-3, 1));
        assert_eq!(s.render(), "-3 + 1/2*x^2");
    }
}
