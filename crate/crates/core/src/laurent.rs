//! Laurent-at-infinity expansions `w(z) = z + c₀ + c₁ z⁻¹ + c₂ z⁻² + …`.
//!
//! These carry the change of variable `w = (n+1)-th root of F(z)` and its
//! compositional inverse, whose first Laurent coefficients are the flat
//! coordinates of the `A_n` Saito metric. Coefficients live in the complex
//! float regime; truncation is by the power of `z⁻¹`.

use crate::poly::{ComplexPolynomial, PolyError};
use crate::scalar::C64;

/// Truncated expansion at infinity with unit leading term:
/// `z + Σ_{k=0..=order} coeffs[k]·z^{−k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfinitySeries {
    coeffs: Vec<C64>,
}

impl InfinitySeries {
    /// Series from tail coefficients; `coeffs[k]` multiplies `z^{−k}`.
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant slot");
        InfinitySeries { coeffs }
    }

    /// The identity `w = z`, truncated at `z^{−order}`.
    pub fn identity(order: usize) -> Self {
        InfinitySeries {
            coeffs: vec![C64::new(0.0, 0.0); order + 1],
        }
    }

    /// Largest retained power of `z^{−1}`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `z^{−k}` (zero beyond the truncation).
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Compose `self(inner(v))`, truncated at `min` of the two orders.
    ///
    /// With `inner(v) = v·(1+e)` for a tail `e` in `t = v^{−1}`, the
    /// composition is `inner(v) + Σ_k c_k t^k (1+e)^{−k}`; each factor is
    /// expanded by the power-series recurrences below.
    pub fn compose(&self, inner: &InfinitySeries) -> InfinitySeries {
        let ord = self.order().min(inner.order());
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);

        // Leading term of self contributes inner(v) itself.
        let mut out: Vec<C64> = (0..=ord).map(|k| inner.coeff(k)).collect();

        // base = 1 + e truncated at t^ord; e_k = d_{k−1} for k ≥ 1.
        let mut base = vec![zero; ord + 1];
        base[0] = one;
        for k in 0..ord {
            base[k + 1] = inner.coeff(k);
        }
        let inv = ts_pow(&base, -1.0, ord);

        let mut powk = vec![zero; ord + 1];
        powk[0] = one;
        for k in 0..=ord {
            if k > 0 {
                powk = ts_mul(&powk, &inv, ord);
            }
            let ck = self.coeff(k);
            if ck.re == 0.0 && ck.im == 0.0 {
                continue;
            }
            for j in 0..=(ord - k) {
                out[k + j] += ck * powk[j];
            }
        }
        InfinitySeries { coeffs: out }
    }
}

/// Product of truncated power series in `t` (index = power), cut at `ord`.
fn ts_mul(a: &[C64], b: &[C64], ord: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); ord + 1];
    for (i, &ai) in a.iter().enumerate().take(ord + 1) {
        if ai.re == 0.0 && ai.im == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if i + j > ord {
                break;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `a(t)^α` for a series with `a[0] = 1`, by the Miller recurrence
/// `k·s_k = Σ_{i=1..k} (α·i − (k−i))·a_i·s_{k−i}`.
fn ts_pow(a: &[C64], alpha: f64, ord: usize) -> Vec<C64> {
    debug_assert!(a[0].re == 1.0 && a[0].im == 0.0);
    let mut s = vec![C64::new(0.0, 0.0); ord + 1];
    s[0] = C64::new(1.0, 0.0);
    for k in 1..=ord {
        let mut acc = C64::new(0.0, 0.0);
        for i in 1..=k {
            let ai = if i < a.len() { a[i] } else { continue };
            let factor = alpha * (i as f64) - ((k - i) as f64);
            acc += ai * s[k - i] * C64::new(factor, 0.0);
        }
        s[k] = acc / C64::new(k as f64, 0.0);
    }
    s
}

/// The branch of `p(z)^{1/(n+1)}` that equals `z + O(1)` at infinity,
/// for monic `p` of degree `n+1`, truncated at `z^{−order}`.
pub fn laurent_nth_root(
    p: &ComplexPolynomial,
    order: usize,
) -> Result<InfinitySeries, PolyError> {
    if p.degree() < 1 {
        return Err(PolyError::ConstantPolynomial);
    }
    if !p.is_monic() {
        return Err(PolyError::NotMonic {
            expected: p.degree(),
            found: p.leading(),
        });
    }
    let np1 = p.degree();
    // p(z)/z^{n+1} = 1 + Σ_{k=1..n+1} p_{n+1−k} t^k with t = z^{−1};
    // w = z·(that)^{1/(n+1)} needs the power through t^{order+1}.
    let m = order + 1;
    let mut a = vec![C64::new(0.0, 0.0); m + 1];
    a[0] = C64::new(1.0, 0.0);
    for k in 1..=np1.min(m) {
        a[k] = p.coeff(np1 - k);
    }
    let s = ts_pow(&a, 1.0 / (np1 as f64), m);
    Ok(InfinitySeries {
        coeffs: (0..=order).map(|k| s[k + 1]).collect(),
    })
}

/// Compositional inverse: `z(w) = w + x₁ w^{−1} + x₂ w^{−2} + …` with
/// `w(z(w)) = w` up to the truncation.
///
/// One sweep of coefficient elimination suffices: correcting the `w^{−j}`
/// slot of the candidate moves the residual only in slots ≥ j, because
/// `w′(z) = 1 + O(z^{−2})`.
pub fn laurent_invert(w: &InfinitySeries, order: usize) -> InfinitySeries {
    let ord = order.min(w.order());
    let mut zed = InfinitySeries::identity(ord);
    for j in 0..=ord {
        let comp = w.compose(&zed);
        let r = comp.coeff(j);
        zed.coeffs[j] -= r;
    }
    zed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c_close;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn sqrt_of_quadratic_matches_binomial_series() {
        // (1 + a t²)^{1/2} = 1 + a/2·t² − a²/8·t⁴ + a³/16·t⁶ − …
        let a1 = c(2.5, -1.5);
        let p = ComplexPolynomial::new(vec![a1, c(0.0, 0.0), c(1.0, 0.0)]);
        let w = laurent_nth_root(&p, 6).unwrap();
        assert!(c_close(w.coeff(0), c(0.0, 0.0), 1e-14));
        assert!(c_close(w.coeff(1), a1 * c(0.5, 0.0), 1e-13));
        assert!(c_close(w.coeff(2), c(0.0, 0.0), 1e-14));
        assert!(c_close(w.coeff(3), -a1 * a1 * c(0.125, 0.0), 1e-13));
        assert!(c_close(w.coeff(5), a1 * a1 * a1 * c(0.0625, 0.0), 1e-12));
    }

    #[test]
    fn cube_root_of_cubic_first_coeffs() {
        // (1 + a₁t² + a₂t³)^{1/3} = 1 + a₁/3·t² + a₂/3·t³ − a₁²/9·t⁴ + …
        let a1 = c(1.0, 2.0);
        let a2 = c(-0.75, 0.0);
        let p = ComplexPolynomial::new(vec![a2, a1, c(0.0, 0.0), c(1.0, 0.0)]);
        let w = laurent_nth_root(&p, 3).unwrap();
        assert!(c_close(w.coeff(0), c(0.0, 0.0), 1e-14));
        assert!(c_close(w.coeff(1), a1 / c(3.0, 0.0), 1e-13));
        assert!(c_close(w.coeff(2), a2 / c(3.0, 0.0), 1e-13));
        assert!(c_close(w.coeff(3), -a1 * a1 / c(9.0, 0.0), 1e-13));
    }

    #[test]
    fn monomial_root_is_exactly_z() {
        let p = ComplexPolynomial::from_real(&[0.0, 0.0, 1.0]);
        let w = laurent_nth_root(&p, 5).unwrap();
        for k in 0..=5 {
            assert_eq!(w.coeff(k), c(0.0, 0.0));
        }
    }

    #[test]
    fn non_monic_rejected() {
        let p = ComplexPolynomial::from_real(&[1.0, 0.0, 2.0]);
        assert!(matches!(
            laurent_nth_root(&p, 3),
            Err(PolyError::NotMonic { .. })
        ));
    }

    #[test]
    fn invert_quadratic_gives_flat_coordinate() {
        // Exact inverse of w² = z² + a₁:
        // z = w·(1 − a₁w^{−2})^{1/2} = w − (a₁/2)w^{−1} − (a₁²/8)w^{−3} − …
        let a1 = c(3.0, -1.0);
        let p = ComplexPolynomial::new(vec![a1, c(0.0, 0.0), c(1.0, 0.0)]);
        let w = laurent_nth_root(&p, 4).unwrap();
        let z = laurent_invert(&w, 4);
        assert!(c_close(z.coeff(0), c(0.0, 0.0), 1e-13));
        assert!(c_close(z.coeff(1), -a1 * c(0.5, 0.0), 1e-12));
        assert!(c_close(z.coeff(2), c(0.0, 0.0), 1e-12));
        assert!(c_close(z.coeff(3), -a1 * a1 * c(0.125, 0.0), 1e-12));
    }

    #[test]
    fn invert_cubic_gives_flat_coordinates() {
        let a1 = c(-3.0, 0.0);
        let a2 = c(0.5, 0.25);
        let p = ComplexPolynomial::new(vec![a2, a1, c(0.0, 0.0), c(1.0, 0.0)]);
        let w = laurent_nth_root(&p, 4).unwrap();
        let z = laurent_invert(&w, 4);
        assert!(c_close(z.coeff(1), -a1 / c(3.0, 0.0), 1e-12));
        assert!(c_close(z.coeff(2), -a2 / c(3.0, 0.0), 1e-12));
    }

    #[test]
    fn identity_inverts_to_identity() {
        let w = InfinitySeries::identity(3);
        let z = laurent_invert(&w, 3);
        assert_eq!(z, InfinitySeries::identity(3));
    }

    #[test]
    fn round_trip_composition_vanishes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let coeffs: Vec<C64> = (0..=8)
                .map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                .collect();
            let w = InfinitySeries::new(coeffs);
            let z = laurent_invert(&w, 8);
            let back = w.compose(&z);
            let fwd = z.compose(&w);
            for k in 0..=8 {
                assert!(back.coeff(k).norm() < 1e-10, "w(z(w)) residue at {k}");
                assert!(fwd.coeff(k).norm() < 1e-10, "z(w(v)) residue at {k}");
            }
        }
    }
}
