//! Exact d-spectrum arithmetic.
//!
//! A Frobenius manifold with Euler field carries a d-spectrum: the
//! rational `d = 2 − D` together with the multiset of charges `q_a =
//! 1 − d_a` read off the Euler eigenvalues. Tensor products convolve
//! spectra, which turns the integrality and Betti-count questions for
//! iterated `A_n` products into exact lattice arithmetic. Everything in
//! this module is rational — no floats — because the inputs are
//! eigenvalue fractions and the outputs are integer counts.

use num::integer::lcm;
use num::{ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::scalar::{rat, rat_int, rat_is_integer, Rat};

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("non-integral spectrum: {0}")]
    NonIntegral(String),
}

/// A d-spectrum: `d` together with the charge multiset {q_a}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumProfile {
    pub d: Rat,
    /// Charge → multiplicity; keys are distinct by construction.
    pub entries: BTreeMap<Rat, u128>,
    /// Whether the flat (translation) part of the Euler field vanishes.
    pub flat_euler_part_zero: bool,
}

impl SpectrumProfile {
    /// Normalizing constructor: merges repeated charges, rejects zero
    /// multiplicities.
    pub fn new(
        d: Rat,
        entries: impl IntoIterator<Item = (Rat, u128)>,
        flat_euler_part_zero: bool,
    ) -> Result<Self, SpectrumError> {
        let mut map: BTreeMap<Rat, u128> = BTreeMap::new();
        for (q, mult) in entries {
            if mult == 0 {
                return Err(SpectrumError::BadInput(format!(
                    "charge {q} has multiplicity 0"
                )));
            }
            *map.entry(q).or_insert(0) += mult;
        }
        Ok(SpectrumProfile {
            d,
            entries: map,
            flat_euler_part_zero,
        })
    }

    /// The one-point spectrum: d = 0, a single charge 0.
    pub fn trivial() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(Rat::zero(), 1);
        SpectrumProfile {
            d: Rat::zero(),
            entries,
            flat_euler_part_zero: true,
        }
    }

    pub fn total_multiplicity(&self) -> u128 {
        self.entries.values().sum()
    }

    /// Does the pairing q ↔ d−q preserve multiplicities?
    pub fn duality_check(&self) -> bool {
        self.entries
            .iter()
            .all(|(q, m)| self.entries.get(&(self.d.clone() - q)) == Some(m))
    }

    /// d and every charge integral.
    pub fn is_integral(&self) -> bool {
        rat_is_integer(&self.d) && self.entries.keys().all(rat_is_integer)
    }
}

/// Spectrum of the `A_n` unfolding: `d = (n−1)/(n+1)`, charges
/// `i/(n+1)` for `i = 0 … n−1`, no flat Euler part.
pub fn an_profile(n: usize) -> Result<SpectrumProfile, SpectrumError> {
    if n < 1 {
        return Err(SpectrumError::BadInput("an_profile needs n ≥ 1".into()));
    }
    let np1 = (n + 1) as i64;
    SpectrumProfile::new(
        rat(n as i64 - 1, np1),
        (0..n).map(|i| (rat(i as i64, np1), 1)),
        true,
    )
}

/// Tensor product of spectra: d adds, charge multisets convolve, and
/// the flat-Euler flag survives only if it holds on both factors.
pub fn tensor_profile(p1: &SpectrumProfile, p2: &SpectrumProfile) -> SpectrumProfile {
    let mut entries: BTreeMap<Rat, u128> = BTreeMap::new();
    for (q1, m1) in &p1.entries {
        for (q2, m2) in &p2.entries {
            *entries.entry(q1.clone() + q2.clone()).or_insert(0) += m1 * m2;
        }
    }
    SpectrumProfile {
        d: p1.d.clone() + p2.d.clone(),
        entries,
        flat_euler_part_zero: p1.flat_euler_part_zero && p2.flat_euler_part_zero,
    }
}

/// `𝐝 = Σ_k (n_k−1)/(n_k+1)` for a product of `A_{n_k}` factors, with
/// its integrality flag — the first obstruction to the product spectrum
/// being that of a manifold with only integer charges.
pub fn integrality(ns: &[usize]) -> Result<(Rat, bool), SpectrumError> {
    if ns.iter().any(|&n| n < 2) {
        return Err(SpectrumError::BadInput(
            "integrality test needs every n_k ≥ 2".into(),
        ));
    }
    let d: Rat = ns
        .iter()
        .map(|&n| rat(n as i64 - 1, n as i64 + 1))
        .fold(Rat::zero(), |acc, x| acc + x);
    let integral = rat_is_integer(&d);
    Ok((d, integral))
}

fn lattice(ns: &[usize]) -> u64 {
    ns.iter().fold(1u64, |acc, &n| lcm(acc, (n + 1) as u64))
}

/// Betti numbers `h^{2m}`, `m = 0 … ⌊𝐝⌋`, of the product spectrum:
/// `h^{2m}` counts tuples `(i_1, …, i_N)` with `0 ≤ i_k ≤ n_k−1` and
/// `Σ_k i_k/(n_k+1) = m`.
///
/// Computed by coefficient extraction from
/// `∏_k (1 + t^{L/(n_k+1)} + … + t^{(n_k−1)L/(n_k+1)})` on the common
/// lattice `L = lcm(n_k+1)`.
pub fn betti(ns: &[usize]) -> Result<Vec<u128>, SpectrumError> {
    if ns.is_empty() || ns.iter().any(|&n| n < 2) {
        return Err(SpectrumError::BadInput(
            "betti needs a nonempty list with every n_k ≥ 2".into(),
        ));
    }
    let l = lattice(ns);
    let mut coeffs: Vec<u128> = vec![1];
    for &n in ns {
        let step = (l / (n + 1) as u64) as usize;
        let mut next = vec![0u128; coeffs.len() + step * (n - 1)];
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for j in 0..n {
                next[i + j * step] += c;
            }
        }
        coeffs = next;
    }
    let (d, _) = integrality(ns)?;
    let mfloor = d.floor().to_integer().to_u64().unwrap_or(0);
    Ok((0..=mfloor)
        .map(|m| {
            coeffs
                .get((m * l) as usize)
                .copied()
                .unwrap_or(0)
        })
        .collect())
}

/// Brute-force enumeration of the same counts; the oracle for
/// [`betti`]. Cost is `∏ n_k` tuples — callers keep it desk-scale.
pub fn betti_bruteforce(ns: &[usize]) -> Result<Vec<u128>, SpectrumError> {
    if ns.is_empty() || ns.iter().any(|&n| n < 2) {
        return Err(SpectrumError::BadInput(
            "betti needs a nonempty list with every n_k ≥ 2".into(),
        ));
    }
    let l = lattice(ns);
    let steps: Vec<u64> = ns.iter().map(|&n| l / (n + 1) as u64).collect();
    let (d, _) = integrality(ns)?;
    let mfloor = d.floor().to_integer().to_u64().unwrap_or(0);
    let mut h = vec![0u128; mfloor as usize + 1];

    let mut idx = vec![0usize; ns.len()];
    loop {
        let total: u64 = idx
            .iter()
            .zip(&steps)
            .map(|(&i, &s)| i as u64 * s)
            .sum();
        if total % l == 0 {
            let m = total / l;
            if m <= mfloor {
                h[m as usize] += 1;
            }
        }
        // Odometer over 0 ≤ i_k ≤ n_k−1.
        let mut k = ns.len();
        loop {
            if k == 0 {
                return Ok(h);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < ns[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Palindrome test `h^{2m} = h^{2(𝐝−m)}`.
pub fn poincare_check(h: &[u128]) -> bool {
    h.iter().zip(h.iter().rev()).all(|(a, b)| a == b)
}

/// Spectrum of a cohomology-type grading: `d = dim`, charge q with
/// multiplicity `h^{2q}`. The Euler field of a quantum product carries
/// a translation part as soon as there are divisor directions, so the
/// flat flag is set only for the point.
pub fn qc_profile(dim: usize, betti: &[u128]) -> Result<SpectrumProfile, SpectrumError> {
    if betti.first() != Some(&1) {
        return Err(SpectrumError::BadInput(
            "cohomology profile needs h⁰ = 1".into(),
        ));
    }
    SpectrumProfile::new(
        rat_int(dim as i64),
        betti
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(q, &m)| (rat_int(q as i64), m)),
        dim == 0,
    )
}

/// Restriction to the submanifold cutting out the non-integral charge
/// directions: keeps only entries with `q ∈ ℤ`. Requires integral d.
pub fn hm_profile(p: &SpectrumProfile) -> Result<SpectrumProfile, SpectrumError> {
    hm_profile_with_progression(p, 1)
}

/// Generalized restriction keeping charges in the arithmetic
/// progression `(1/r)ℤ`; `r = 1` is the integral case. Requires
/// `r·d ∈ ℤ` so the restricted spectrum is again of the same kind.
pub fn hm_profile_with_progression(
    p: &SpectrumProfile,
    r: u64,
) -> Result<SpectrumProfile, SpectrumError> {
    if r == 0 {
        return Err(SpectrumError::BadInput("progression needs r ≥ 1".into()));
    }
    let rr = rat_int(r as i64);
    let scaled_d = p.d.clone() * rr.clone();
    if !rat_is_integer(&scaled_d) {
        return Err(SpectrumError::NonIntegral(format!(
            "d = {} is not in (1/{r})ℤ",
            p.d
        )));
    }
    let entries: Vec<(Rat, u128)> = p
        .entries
        .iter()
        .filter(|(q, _)| rat_is_integer(&((*q).clone() * rr.clone())))
        .map(|(q, &m)| (q.clone(), m))
        .collect();
    SpectrumProfile::new(p.d.clone(), entries, p.flat_euler_part_zero)
}

/// Spectrum carried by counts that should all be nonnegative and total
/// `∏ n_k`: sanity accessor for the generating-function path.
pub fn gepner_total(ns: &[usize]) -> u128 {
    ns.iter().map(|&n| n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rat {
        rat(n, d)
    }

    #[test]
    fn an_profile_values() {
        let p = an_profile(3).unwrap();
        assert_eq!(p.d, q(1, 2));
        let charges: Vec<Rat> = p.entries.keys().cloned().collect();
        assert_eq!(charges, vec![q(0, 1), q(1, 4), q(1, 2)]);
        assert!(p.entries.values().all(|&m| m == 1));
        assert!(p.flat_euler_part_zero);
        assert!(p.duality_check());

        let p1 = an_profile(1).unwrap();
        assert_eq!(p1.d, q(0, 1));
        assert_eq!(p1.total_multiplicity(), 1);

        let p4 = an_profile(4).unwrap();
        assert_eq!(p4.d, q(3, 5));
        assert_eq!(p4.entries.len(), 4);
        assert!(p4.duality_check());
    }

    #[test]
    fn tensor_a2_squared() {
        let a2 = an_profile(2).unwrap();
        let p = tensor_profile(&a2, &a2);
        assert_eq!(p.d, q(2, 3));
        let got: Vec<(Rat, u128)> = p.entries.iter().map(|(k, &v)| (k.clone(), v)).collect();
        assert_eq!(
            got,
            vec![(q(0, 1), 1), (q(1, 3), 2), (q(2, 3), 1)]
        );
        assert_eq!(p.total_multiplicity(), 4);
        assert!(p.duality_check());
    }

    #[test]
    fn tensor_identity_and_commutativity() {
        let a3 = an_profile(3).unwrap();
        let id = SpectrumProfile::trivial();
        assert_eq!(tensor_profile(&a3, &id), a3);

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let k = rng.random_range(1..4usize);
                let d = q(rng.random_range(-3..4), rng.random_range(1..5));
                let flat = rng.random_range(0..2) == 0;
                let entries: Vec<(Rat, u128)> = (0..k)
                    .map(|_| {
                        (
                            q(rng.random_range(0..6), rng.random_range(1..5)),
                            rng.random_range(1..4u128),
                        )
                    })
                    .collect();
                SpectrumProfile::new(d, entries, flat).unwrap()
            };
            let (p1, p2) = (mk(&mut rng), mk(&mut rng));
            assert_eq!(tensor_profile(&p1, &p2), tensor_profile(&p2, &p1));
        }
    }

    #[test]
    fn integrality_examples() {
        let (d, ok) = integrality(&[3, 3, 3, 3]).unwrap();
        assert_eq!(d, q(2, 1));
        assert!(ok);
        let (d, ok) = integrality(&[4, 4, 4, 4, 4]).unwrap();
        assert_eq!(d, q(3, 1));
        assert!(ok);
        let (d, ok) = integrality(&[2, 2]).unwrap();
        assert_eq!(d, q(2, 3));
        assert!(!ok);
        assert!(integrality(&[1, 3]).is_err());
    }

    #[test]
    fn betti_known_instances() {
        assert_eq!(betti(&[3, 3, 3, 3]).unwrap(), vec![1, 19, 1]);
        assert_eq!(betti(&[4, 4, 4, 4, 4]).unwrap(), vec![1, 101, 101, 1]);
        assert_eq!(betti(&[2, 2, 2]).unwrap(), vec![1, 1]);
    }

    #[test]
    fn betti_agrees_with_bruteforce() {
        let mut instances: Vec<Vec<usize>> = Vec::new();
        for n1 in 2..=5 {
            for n2 in n1..=5 {
                instances.push(vec![n1, n2]);
                for n3 in n2..=5 {
                    instances.push(vec![n1, n2, n3]);
                    for n4 in n3..=5 {
                        instances.push(vec![n1, n2, n3, n4]);
                    }
                }
            }
        }
        instances.push(vec![3, 3, 3, 3]);
        instances.push(vec![4, 4, 4, 4, 4]);
        for ns in instances {
            let prod: u128 = gepner_total(&ns);
            assert!(prod <= 100_000);
            assert_eq!(
                betti(&ns).unwrap(),
                betti_bruteforce(&ns).unwrap(),
                "mismatch on {ns:?}"
            );
        }
    }

    #[test]
    fn poincare_examples_and_involution() {
        assert!(poincare_check(&[1, 19, 1]));
        assert!(poincare_check(&[1, 101, 101, 1]));
        assert!(!poincare_check(&[1, 2, 3]));

        // The relabeling i_k ↦ n_k−1−i_k forces the palindrome whenever
        // the total is integral; sweep all multisets with N ≤ 6, n ≤ 6.
        fn sweep(ns: &mut Vec<usize>, lo: usize, max_n: usize, max_len: usize) {
            if !ns.is_empty() {
                if let Ok((_, true)) = integrality(ns) {
                    assert!(poincare_check(&betti(ns).unwrap()), "failed on {ns:?}");
                }
            }
            if ns.len() == max_len {
                return;
            }
            for n in lo..=max_n {
                ns.push(n);
                sweep(ns, n, max_n, max_len);
                ns.pop();
            }
        }
        sweep(&mut Vec::new(), 2, 6, 6);
    }

    #[test]
    fn betti_total_is_product() {
        for ns in [vec![3, 3, 3, 3], vec![2, 4, 5]] {
            let l = super::lattice(&ns);
            let mut coeffs: Vec<u128> = vec![1];
            for &n in &ns {
                let step = (l / (n + 1) as u64) as usize;
                let mut next = vec![0u128; coeffs.len() + step * (n - 1)];
                for (i, &c) in coeffs.iter().enumerate() {
                    for j in 0..n {
                        next[i + j * step] += c;
                    }
                }
                coeffs = next;
            }
            let total: u128 = coeffs.iter().sum();
            assert_eq!(total, gepner_total(&ns));
        }
    }

    #[test]
    fn qc_profile_examples() {
        let p2 = qc_profile(2, &[1, 1, 1]).unwrap();
        assert_eq!(p2.d, q(2, 1));
        assert_eq!(p2.entries.len(), 3);
        assert!(p2.entries.values().all(|&m| m == 1));
        assert!(!p2.flat_euler_part_zero);
        assert!(p2.duality_check());
        assert!(p2.is_integral());

        let pt = qc_profile(0, &[1]).unwrap();
        assert_eq!(pt, SpectrumProfile::trivial());

        let quintic = qc_profile(3, &[1, 13, 13, 1]).unwrap();
        assert!(quintic.duality_check());

        assert!(qc_profile(2, &[2, 1, 1]).is_err());
    }

    #[test]
    fn hm_profile_a3_fourth_power() {
        let a3 = an_profile(3).unwrap();
        let mut p = a3.clone();
        for _ in 0..3 {
            p = tensor_profile(&p, &a3);
        }
        assert_eq!(p.d, q(2, 1));
        let hm = hm_profile(&p).unwrap();
        let got: Vec<(Rat, u128)> = hm.entries.iter().map(|(k, &v)| (k.clone(), v)).collect();
        assert_eq!(got, vec![(q(0, 1), 1), (q(1, 1), 19), (q(2, 1), 1)]);
    }

    #[test]
    fn hm_profile_rejects_fractional_d() {
        let a2 = an_profile(2).unwrap();
        let p = tensor_profile(&a2, &a2);
        assert!(matches!(
            hm_profile(&p),
            Err(SpectrumError::NonIntegral(_))
        ));
        // But the (1/3)ℤ progression keeps the whole spectrum.
        let third = hm_profile_with_progression(&p, 3).unwrap();
        assert_eq!(third.entries, p.entries);
    }

    #[test]
    fn hm_profile_integral_input_unchanged() {
        let p2 = qc_profile(2, &[1, 1, 1]).unwrap();
        assert_eq!(hm_profile(&p2).unwrap(), p2);
    }
}
