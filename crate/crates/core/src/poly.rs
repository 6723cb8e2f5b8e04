//! Univariate complex polynomials and simultaneous root finding.
//!
//! Polynomials are dense coefficient vectors in ascending degree order
//! with a nonzero leading coefficient. Roots are found by Aberth–Ehrlich
//! simultaneous iteration with Newton polishing, then sorted by
//! (argument, modulus) so downstream labelings are deterministic; close
//! clusters are flagged as multiple roots.

use thiserror::Error;

use crate::scalar::C64;

/// Dense univariate polynomial over complex floats.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    /// Coefficients `c[k]` of `z^k`; `c.last()` is nonzero unless the
    /// polynomial is identically zero (represented by an empty vector).
    coeffs: Vec<C64>,
}

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("root iteration failed to converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("polynomial must have degree >= 1")]
    ConstantPolynomial,
    #[error("polynomial must be monic of degree {expected}, leading coefficient {found}")]
    NotMonic { expected: usize, found: C64 },
}

impl ComplexPolynomial {
    /// Build from ascending coefficients, trimming trailing (near-)zeros
    /// exactly: only literal `0+0i` entries are trimmed.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while matches!(coeffs.last(), Some(c) if c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        ComplexPolynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn is_monic(&self) -> bool {
        let l = self.leading();
        l.re == 1.0 && l.im == 0.0
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> ComplexPolynomial {
        if self.coeffs.len() <= 1 {
            return ComplexPolynomial { coeffs: vec![] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * C64::new(k as f64, 0.0))
            .collect();
        ComplexPolynomial::new(coeffs)
    }

    /// Largest coefficient magnitude, the scale used for residual tests.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0)
    }
}

/// One root with its cluster multiplicity.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub value: C64,
    /// Size of the tolerance-cluster this root belongs to; 1 for simple.
    pub multiplicity: usize,
}

/// All roots of `p`, deterministically ordered.
#[derive(Debug, Clone)]
pub struct Roots {
    pub roots: Vec<Root>,
    /// Max |p(ρ)| over returned roots, unscaled.
    pub max_residual: f64,
}

impl Roots {
    pub fn values(&self) -> Vec<C64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn has_multiple(&self) -> bool {
        self.roots.iter().any(|r| r.multiplicity > 1)
    }
}

const MAX_SWEEPS: usize = 200;

/// Sort key (argument, modulus); ties broken by modulus.
fn sort_roots(roots: &mut [C64]) {
    roots.sort_by(|a, b| {
        let ka = (a.arg(), a.norm());
        let kb = (b.arg(), b.norm());
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Find all roots of `p` by Aberth–Ehrlich iteration.
///
/// `tol` is the absolute tolerance after scaling by the coefficient
/// magnitude: accepted roots satisfy |p(ρ)| ≤ tol·scale. Roots closer
/// than `max(sqrt(tol), 1e-4)`·(1+|ρ|) are merged into one cluster and
/// flagged with the cluster size as multiplicity — at double precision a
/// numerical cluster around an m-fold root has radius ≈ eps^(1/m), up to
/// ~1e-4 for m = 4, while genuinely distinct desk-scale roots sit far
/// above that.
pub fn poly_roots(p: &ComplexPolynomial, tol: f64) -> Result<Roots, PolyError> {
    if p.degree() < 1 {
        return Err(PolyError::ConstantPolynomial);
    }
    let deg = p.degree();
    let dp = p.derivative();

    // Initial guesses on a circle of radius set by the Cauchy bound,
    // with an irrational angular offset to break symmetry.
    let lead = p.leading().norm();
    let radius = 1.0
        + p.coeffs()
            .iter()
            .take(deg)
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (deg as f64) + 0.4;
            C64::new(0.0, theta).exp() * (radius * 0.8)
        })
        .collect();

    let scale = p.coeff_scale();
    let target = tol.max(f64::EPSILON) * scale;
    for _sweep in 0..MAX_SWEEPS {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let pv = p.eval(z[i]);
            let dv = dp.eval(z[i]);
            // Newton correction, guarded against dv = 0.
            let w = if dv.norm() > 0.0 {
                pv / dv
            } else {
                C64::new(tol, tol)
            };
            let mut s = C64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        s += C64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() > 0.0 { w / denom } else { w };
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step <= 1e-3 * tol.max(1e-14) * (1.0 + radius) {
            break;
        }
    }
    // Newton polish: quadratic convergence near simple roots; bounded
    // steps keep clustered (multiple) roots stable.
    for zi in z.iter_mut() {
        for _ in 0..4 {
            let pv = p.eval(*zi);
            let dv = dp.eval(*zi);
            if dv.norm() == 0.0 {
                break;
            }
            let step = pv / dv;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *zi -= step;
        }
    }

    let max_residual = z.iter().map(|&zi| p.eval(zi).norm()).fold(0.0, f64::max);
    if max_residual > target {
        return Err(PolyError::NoConvergence(MAX_SWEEPS));
    }

    sort_roots(&mut z);

    // Cluster roots closer than the multiple-root resolution limit.
    let cluster_tol = tol.max(f64::EPSILON).sqrt().max(1e-4);
    let mut assigned = vec![usize::MAX; deg];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..deg {
        let mut placed = false;
        for (ci, cluster) in clusters.iter_mut().enumerate() {
            let rep = z[cluster[0]];
            if (z[i] - rep).norm() <= cluster_tol * (1.0 + rep.norm()) {
                cluster.push(i);
                assigned[i] = ci;
                placed = true;
                break;
            }
        }
        if !placed {
            assigned[i] = clusters.len();
            clusters.push(vec![i]);
        }
    }
    let roots = (0..deg)
        .map(|i| Root {
            value: z[i],
            multiplicity: clusters[assigned[i]].len(),
        })
        .collect();
    Ok(Roots {
        roots,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c_close, DEFAULT_TOL};

    #[test]
    fn factored_quadratic() {
        // 3z^2 - 3 = 3(z-1)(z+1)
        let p = ComplexPolynomial::from_real(&[-3.0, 0.0, 3.0]);
        let r = poly_roots(&p, DEFAULT_TOL).unwrap();
        let vals = r.values();
        assert_eq!(vals.len(), 2);
        assert!(c_close(vals[0], C64::new(1.0, 0.0), 1e-10));
        assert!(c_close(vals[1], C64::new(-1.0, 0.0), 1e-10));
        assert!(!r.has_multiple());
    }

    #[test]
    fn cube_roots_of_unity() {
        let p = ComplexPolynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]);
        let r = poly_roots(&p, DEFAULT_TOL).unwrap();
        let vals = r.values();
        assert_eq!(vals.len(), 3);
        for (k, v) in vals.iter().enumerate() {
            assert!(
                v.norm() > 0.999 && v.norm() < 1.001,
                "root {k} off the unit circle: {v}"
            );
            assert!(p.eval(*v).norm() < 1e-9);
        }
        // Sorted by argument: the root at angle 0 comes after the
        // negative-angle root.
        assert!(vals[0].arg() <= vals[1].arg() && vals[1].arg() <= vals[2].arg());
    }

    #[test]
    fn triple_root_flagged_multiple() {
        // F' for the A_3 chart (0,0,0): 4z^3.
        let p = ComplexPolynomial::from_real(&[0.0, 0.0, 0.0, 4.0]);
        let r = poly_roots(&p, DEFAULT_TOL).unwrap();
        assert_eq!(r.roots.len(), 3);
        for root in &r.roots {
            assert!(root.value.norm() < 1e-3);
            assert_eq!(root.multiplicity, 3);
        }
    }

    #[test]
    fn vieta_sum_check() {
        // z^4 + 2z^3 - 5z + 7: sum of roots = -2.
        let p = ComplexPolynomial::from_real(&[7.0, -5.0, 0.0, 2.0, 1.0]);
        let r = poly_roots(&p, DEFAULT_TOL).unwrap();
        let sum: C64 = r.values().iter().sum();
        assert!(c_close(sum, C64::new(-2.0, 0.0), 1e-8));
    }

    #[test]
    fn derivative_degree_drops() {
        let p = ComplexPolynomial::from_real(&[1.0, 2.0, 3.0]);
        let dp = p.derivative();
        assert_eq!(dp.degree(), 1);
        assert!(c_close(dp.eval(C64::new(2.0, 0.0)), C64::new(14.0, 0.0), 1e-12));
        let constant = ComplexPolynomial::from_real(&[5.0]);
        assert!(constant.derivative().is_zero());
    }

    #[test]
    fn constant_rejected() {
        let p = ComplexPolynomial::from_real(&[5.0]);
        assert!(matches!(
            poly_roots(&p, DEFAULT_TOL),
            Err(PolyError::ConstantPolynomial)
        ));
    }

    #[test]
    fn random_monic_polys_recover_residual_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let deg = rng.random_range(2..=7);
            let mut coeffs: Vec<f64> = (0..deg).map(|_| rng.random_range(-4.0..4.0)).collect();
            coeffs.push(1.0);
            let p = ComplexPolynomial::from_real(&coeffs);
            let r = poly_roots(&p, DEFAULT_TOL).unwrap();
            assert_eq!(r.roots.len(), deg);
            assert!(r.max_residual <= DEFAULT_TOL * p.coeff_scale());
            let sum: C64 = r.values().iter().sum();
            let expect = -p.coeff(deg - 1);
            assert!(c_close(sum, expect, 1e-6), "vieta failed: {sum} vs {expect}");
        }
    }
}
