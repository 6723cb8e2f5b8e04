//! Numerics for the `A_n` unfolding `F(z) = z^{n+1} + a₁z^{n−1} + … + a_n`
//! and direct sums of such charts.
//!
//! Everything is driven by the critical data of `F`: the roots ρ_i of
//! `F′`, the canonical coordinates `u^i = F(ρ_i)`, and the metric values
//! `η_i = 1/F″(ρ_i)`. The derivative matrix `η_{jk} = ∂η_j/∂u^k` is
//! assembled by a three-step chain through the roots and the unfolding
//! parameters; its symmetry is the closedness condition that makes the
//! family Frobenius. Special charts with only the top two parameters
//! switched on admit closed forms for the whole (u, η, v) triple, which
//! the numeric chain must reproduce — `verify_special_point` measures
//! exactly that. Direct sums `F_A(z₁) + F_B(z₂)` are handled as genuine
//! two-variable unfoldings with Newton-tracked critical points, so the
//! product formulas for η and its derivatives can be tested against
//! finite differences rather than against themselves.

use thiserror::Error;

use crate::cmatrix::{CMatrix, CMatrixError};
use crate::germ::{GermError, SemisimpleGerm};
use crate::laurent::{laurent_invert, laurent_nth_root};
use crate::poly::{poly_roots, ComplexPolynomial, PolyError};
use crate::scalar::C64;

#[derive(Debug, Error)]
pub enum SaitoError {
    #[error(transparent)]
    Root(#[from] PolyError),
    #[error(transparent)]
    Matrix(#[from] CMatrixError),
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error("chart is not tame: {0}")]
    NonTame(String),
    #[error("bad chart: {0}")]
    BadChart(String),
    #[error("special point data invalid: {0}")]
    BadSpecialPoint(String),
    #[error("no root relabeling matches within tolerance (best deviation {best:.3e})")]
    NoRelabeling { best: f64 },
    #[error("critical-point tracking diverged at point {0}")]
    NewtonDiverged(usize),
    #[error("canonical values collide: {0}")]
    Collision(String),
}

/// The miniversal `A_n` chart `F(z) = z^{n+1} + a₁z^{n−1} + … + a_n`.
#[derive(Debug, Clone)]
pub struct AnChart {
    n: usize,
    a: Vec<C64>,
}

impl AnChart {
    /// `a` lists a₁ … a_n (note the missing z^n slot of the unfolding).
    pub fn new(n: usize, a: Vec<C64>) -> Result<Self, SaitoError> {
        if n < 1 {
            return Err(SaitoError::BadChart("n must be at least 1".into()));
        }
        if a.len() != n {
            return Err(SaitoError::BadChart(format!(
                "expected {n} coefficients, got {}",
                a.len()
            )));
        }
        Ok(AnChart { n, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficients a₁ … a_n.
    pub fn a(&self) -> &[C64] {
        &self.a
    }

    /// F as a dense polynomial.
    pub fn f_poly(&self) -> ComplexPolynomial {
        let n = self.n;
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 2];
        coeffs[n + 1] = C64::new(1.0, 0.0);
        for k in 0..n {
            // z^k carries a_{n−k}.
            coeffs[k] = self.a[n - k - 1];
        }
        ComplexPolynomial::new(coeffs)
    }

    /// Chart displaced by `h`·`dir` in the a-coordinates.
    pub fn displaced(&self, dir: &[C64], h: f64) -> AnChart {
        assert_eq!(dir.len(), self.n);
        let a = self
            .a
            .iter()
            .zip(dir)
            .map(|(ai, di)| ai + di * C64::new(h, 0.0))
            .collect();
        AnChart { n: self.n, a }
    }
}

/// Critical data of a chart: roots of F′ with the induced canonical
/// coordinates and metric values.
#[derive(Debug, Clone)]
pub struct CriticalData {
    pub rho: Vec<C64>,
    pub u: Vec<C64>,
    pub eta: Vec<C64>,
    /// Simple critical points and pairwise distinct critical values.
    pub tame: bool,
}

impl CriticalData {
    pub fn size(&self) -> usize {
        self.rho.len()
    }

    /// g(e, e): the sum of all η_i.
    pub fn sum_eta(&self) -> C64 {
        self.eta.iter().sum()
    }

    /// The residue-pairing trace form `f ↦ Σ_i f(ρ_i)/F″(ρ_i)`.
    pub fn trace_form(&self, f: &ComplexPolynomial) -> C64 {
        self.rho
            .iter()
            .zip(&self.eta)
            .map(|(&r, &e)| f.eval(r) * e)
            .sum()
    }
}

/// Roots, values, and metric data of the chart; deterministically
/// ordered by the root sort of [`poly_roots`].
pub fn critical_data(chart: &AnChart, tol: f64) -> Result<CriticalData, SaitoError> {
    let f = chart.f_poly();
    let fp = f.derivative();
    let f2 = fp.derivative();
    let roots = poly_roots(&fp, tol)?;
    let rho = roots.values();
    let u: Vec<C64> = rho.iter().map(|&r| f.eval(r)).collect();
    let eta: Vec<C64> = rho
        .iter()
        .map(|&r| C64::new(1.0, 0.0) / f2.eval(r))
        .collect();
    let mut tame = !roots.has_multiple();
    if eta.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
        tame = false;
    }
    let uscale = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    'outer: for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            if (u[i] - u[j]).norm() <= tol.max(1e-12) * (1.0 + uscale) {
                tame = false;
                break 'outer;
            }
        }
    }
    Ok(CriticalData { rho, u, eta, tame })
}

/// The matrix `η_{jk} = ∂η_j/∂u^k` in canonical coordinates.
#[derive(Debug, Clone)]
pub struct EtaJacobian {
    pub mat: CMatrix,
}

impl EtaJacobian {
    /// Max |η_{jk} − η_{kj}|; vanishing symmetry is the closedness of
    /// the ε-form, hence the Frobenius property of the family.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.mat.rows();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in (j + 1)..n {
                worst = worst.max((self.mat[(j, k)] - self.mat[(k, j)]).norm());
            }
        }
        worst
    }
}

/// η-derivative matrix via the chain
/// ∂η/∂ρ · ∂ρ/∂a · ∂a/∂u.
///
/// The three factors: from `η_j = 1/((n+1)∏_{i≠j}(ρ_j−ρ_i))`,
/// `∂η_j/∂ρ_m = −η_j/(ρ_m−ρ_j)` off the diagonal and
/// `∂η_j/∂ρ_j = η_j Σ_{i≠j} 1/(ρ_i−ρ_j)`; implicit differentiation of
/// `F′(ρ_m) = 0` gives `∂ρ_m/∂a_l = −(n−l)ρ_m^{n−l−1}η_m`; and
/// `∂u^i/∂a_l = ρ_i^{n−l}` (the envelope identity at a critical point),
/// whose inverse is a Vandermonde solve.
pub fn eta_jacobian(chart: &AnChart, tol: f64) -> Result<EtaJacobian, SaitoError> {
    let cd = critical_data(chart, tol)?;
    eta_jacobian_from_critical(&cd)
}

/// Same as [`eta_jacobian`], reusing already-computed critical data.
pub fn eta_jacobian_from_critical(cd: &CriticalData) -> Result<EtaJacobian, SaitoError> {
    if !cd.tame {
        return Err(SaitoError::NonTame(
            "η-derivatives need simple critical points with distinct values".into(),
        ));
    }
    let n = cd.size();
    let zero = C64::new(0.0, 0.0);

    let mut m1 = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = zero;
        for m in 0..n {
            if m == j {
                continue;
            }
            let d = cd.rho[m] - cd.rho[j];
            m1[(j, m)] = -cd.eta[j] / d;
            diag += C64::new(1.0, 0.0) / d;
        }
        m1[(j, j)] = cd.eta[j] * diag;
    }

    let mut m2 = CMatrix::zeros(n, n);
    for m in 0..n {
        for l0 in 0..n {
            let l = l0 + 1;
            let pow = (n as i32) - (l as i32) - 1;
            let factor = (n - l) as f64;
            if factor == 0.0 {
                continue;
            }
            m2[(m, l0)] = -C64::new(factor, 0.0) * cd.rho[m].powi(pow) * cd.eta[m];
        }
    }

    let mut vand = CMatrix::zeros(n, n);
    for i in 0..n {
        for l0 in 0..n {
            let l = l0 + 1;
            vand[(i, l0)] = cd.rho[i].powi((n - l) as i32);
        }
    }
    let m3 = vand.inverse()?;

    Ok(EtaJacobian {
        mat: m1.matmul(&m2).matmul(&m3),
    })
}

/// Special-coordinate rotation matrix
/// `v_{ij} = ½(u^j−u^i)η_{ij}/η_j`, zero diagonal.
pub fn special_v_matrix(cd: &CriticalData, ej: &EtaJacobian) -> CMatrix {
    let n = cd.size();
    let mut v = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            v[(i, j)] = (cd.u[j] - cd.u[i]) * C64::new(0.5, 0.0) * ej.mat[(i, j)] / cd.eta[j];
        }
    }
    v
}

fn validate_primitive_root(n: usize, zeta: C64) -> Result<Vec<C64>, SaitoError> {
    let mut zpow = Vec::with_capacity(n);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..n {
        zpow.push(p);
        p *= zeta;
    }
    // p is now ζ^n.
    if (p - C64::new(1.0, 0.0)).norm() > 1e-9 {
        return Err(SaitoError::BadSpecialPoint(format!(
            "ζ^{n} = {p} is not 1"
        )));
    }
    for (k, q) in zpow.iter().enumerate().skip(1) {
        if (q - C64::new(1.0, 0.0)).norm() <= 1e-9 {
            return Err(SaitoError::BadSpecialPoint(format!(
                "ζ is not primitive: ζ^{k} = 1"
            )));
        }
    }
    Ok(zpow)
}

/// Closed-form germ at the special chart `(0, …, 0, a_{n−1}, a_n)`:
/// `u^i = a_n + (n/(n+1))ζ^i a_{n−1} b`, `η_i = ζ^i/(n(n+1)b^{n−1})`,
/// `v_{jk} = 1/((n+1)(1−ζ^{k−j}))`, where `b` is the chosen branch with
/// `b^n = −a_{n−1}/(n+1)` and ζ a primitive n-th root of unity.
pub fn special_point_closed_form(
    n: usize,
    a_nm1: C64,
    a_n: C64,
    b: C64,
    zeta: C64,
) -> Result<SemisimpleGerm, SaitoError> {
    if n < 2 {
        return Err(SaitoError::BadSpecialPoint(
            "special charts need n ≥ 2".into(),
        ));
    }
    if a_nm1.norm() == 0.0 {
        return Err(SaitoError::BadSpecialPoint(
            "a_{n−1} = 0 is a non-tame (caustic) point".into(),
        ));
    }
    let target = -a_nm1 / C64::new((n + 1) as f64, 0.0);
    if (b.powi(n as i32) - target).norm() > 1e-9 * (1.0 + target.norm()) {
        return Err(SaitoError::BadSpecialPoint(format!(
            "b^{n} = {} does not match −a_{{n−1}}/(n+1) = {target}",
            b.powi(n as i32)
        )));
    }
    let zpow = validate_primitive_root(n, zeta)?;

    let nf = n as f64;
    let u: Vec<C64> = (0..n)
        .map(|i| a_n + zpow[i] * a_nm1 * b * C64::new(nf / (nf + 1.0), 0.0))
        .collect();
    let eta_denom = C64::new(nf * (nf + 1.0), 0.0) * b.powi(n as i32 - 1);
    let eta: Vec<C64> = (0..n).map(|i| zpow[i] / eta_denom).collect();
    let mut v = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let w = zpow[(k + n - j) % n];
            v[(j, k)] =
                C64::new(1.0, 0.0) / (C64::new(nf + 1.0, 0.0) * (C64::new(1.0, 0.0) - w));
        }
    }
    Ok(SemisimpleGerm::new(u, eta, v)?)
}

/// Closed form for the η-derivative matrix at a special chart:
/// `η_{jk} = 2ζ^{k−j} / ((ζ^{k−j}−1)² n² a_{n−1}²)` off the diagonal.
/// Diagonal entries come from the vanishing row sums (η_j is invariant
/// under a simultaneous shift of all u^k, so Σ_k ∂η_j/∂u^k = 0).
pub fn eta_jacobian_closed_form(
    n: usize,
    a_nm1: C64,
    zeta: C64,
) -> Result<CMatrix, SaitoError> {
    if n < 2 {
        return Err(SaitoError::BadSpecialPoint(
            "special charts need n ≥ 2".into(),
        ));
    }
    let zpow = validate_primitive_root(n, zeta)?;
    let nf = n as f64;
    let denom_scale = C64::new(nf * nf, 0.0) * a_nm1 * a_nm1;
    let mut mat = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut row_sum = C64::new(0.0, 0.0);
        for k in 0..n {
            if j == k {
                continue;
            }
            let w = zpow[(k + n - j) % n];
            let d = w - C64::new(1.0, 0.0);
            let val = C64::new(2.0, 0.0) * w / (d * d * denom_scale);
            mat[(j, k)] = val;
            row_sum += val;
        }
        mat[(j, j)] = -row_sum;
    }
    Ok(mat)
}

/// Deviations between the numeric chain and the closed forms at a
/// special chart, measured under the matched root labeling.
#[derive(Debug, Clone)]
pub struct SpecialPointReport {
    pub u_dev: f64,
    pub eta_dev: f64,
    pub v_dev: f64,
    pub max_dev: f64,
    /// `permutation[i]` is the numeric root index matching closed-form
    /// label i.
    pub permutation: Vec<usize>,
}

/// Run the full numeric pipeline at `(0,…,0,a_{n−1},a_n)` and compare
/// (u, η, v) against the closed forms, using the principal branch
/// `b = (−a_{n−1}/(n+1))^{1/n}` and `ζ = e^{2πi/n}`.
pub fn verify_special_point(
    n: usize,
    a_nm1: C64,
    a_n: C64,
    tol: f64,
) -> Result<SpecialPointReport, SaitoError> {
    if n < 2 {
        return Err(SaitoError::BadSpecialPoint(
            "special charts need n ≥ 2".into(),
        ));
    }
    let mut a = vec![C64::new(0.0, 0.0); n];
    a[n - 2] = a_nm1;
    a[n - 1] = a_n;
    let chart = AnChart::new(n, a)?;
    let cd = critical_data(&chart, tol)?;
    if !cd.tame {
        return Err(SaitoError::NonTame(format!(
            "special chart with a_{{n−1}} = {a_nm1} is not tame"
        )));
    }
    let ej = eta_jacobian_from_critical(&cd)?;
    let v_num = special_v_matrix(&cd, &ej);

    let b = (-a_nm1 / C64::new((n + 1) as f64, 0.0)).powf(1.0 / n as f64);
    let zeta = C64::new(0.0, 2.0 * std::f64::consts::PI / n as f64).exp();
    let closed = special_point_closed_form(n, a_nm1, a_n, b, zeta)?;

    // Match closed-form labels to numeric roots by nearest u, requiring
    // an unambiguous assignment well inside the numeric u-gaps.
    let mut min_gap = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            min_gap = min_gap.min((cd.u[i] - cd.u[j]).norm());
        }
    }
    let thresh = (min_gap / 4.0).max(tol);
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (kbest, dist) = (0..n)
            .map(|k| (k, (closed.u()[i] - cd.u[k]).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        best = best.min(dist);
        if dist > thresh || used[kbest] {
            return Err(SaitoError::NoRelabeling { best });
        }
        perm[i] = kbest;
        used[kbest] = true;
    }

    let mut u_dev = 0.0f64;
    let mut eta_dev = 0.0f64;
    let mut v_dev = 0.0f64;
    for i in 0..n {
        u_dev = u_dev.max((closed.u()[i] - cd.u[perm[i]]).norm());
        eta_dev = eta_dev.max((closed.eta()[i] - cd.eta[perm[i]]).norm());
        for j in 0..n {
            v_dev = v_dev.max((closed.v()[(i, j)] - v_num[(perm[i], perm[j])]).norm());
        }
    }
    Ok(SpecialPointReport {
        u_dev,
        eta_dev,
        v_dev,
        max_dev: u_dev.max(eta_dev).max(v_dev),
        permutation: perm,
    })
}

/// Flat coordinates x₁ … x_n of the chart: the first Laurent coefficients
/// of the compositional inverse of `w = F^{1/(n+1)}`.
///
/// `order` is the series truncation (clamped to at least n).
pub fn flat_coordinates(chart: &AnChart, order: usize) -> Vec<C64> {
    let n = chart.n();
    let ord = order.max(n);
    let w = laurent_nth_root(&chart.f_poly(), ord)
        .expect("chart polynomial is monic of degree ≥ 2");
    let z = laurent_invert(&w, ord);
    (1..=n).map(|i| z.coeff(i)).collect()
}

/// Finite-difference verification of the Euler structure of the family.
#[derive(Debug, Clone)]
pub struct EulerReport {
    /// max_i |E·x_i − ((i+1)/(n+1))·x_i|.
    pub flat_eigen_dev: f64,
    /// |e·η − Σ_i η_i| for the metric potential η = a₁/(n+1).
    pub e_eta_dev: f64,
    /// |E·η − (D−1)·η| with D = (n+3)/(n+1).
    pub euler_eta_dev: f64,
    pub d_big: f64,
    pub max_dev: f64,
}

/// Check, by central differences in the a-coordinates, that the Euler
/// field `E = (1/(n+1)) Σ_l (l+1) a_l ∂/∂a_l` acts on flat coordinates
/// with eigenvalues `(i+1)/(n+1)`, that the unit field `e = ∂/∂a_n`
/// applied to the metric potential `η = a₁/(n+1)` returns `g(e,e) = Ση_i`,
/// and that `E·η = (D−1)η`.
pub fn euler_checks(chart: &AnChart, tol: f64) -> Result<EulerReport, SaitoError> {
    let n = chart.n();
    let nf = (n + 1) as f64;
    let cd = critical_data(chart, tol)?;
    if !cd.tame {
        return Err(SaitoError::NonTame("Euler checks need a tame chart".into()));
    }
    let ascale = chart.a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let h = 1e-5 * (1.0 + ascale);

    // Euler direction in a-coordinates: w_l = ((l+1)/(n+1))·a_l.
    let euler_dir: Vec<C64> = chart
        .a
        .iter()
        .enumerate()
        .map(|(l0, al)| al * C64::new((l0 as f64 + 2.0) / nf, 0.0))
        .collect();
    let e_dir: Vec<C64> = (0..n)
        .map(|l0| {
            if l0 == n - 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();

    let pot = |c: &AnChart| c.a[0] / C64::new(nf, 0.0);
    let two_h = C64::new(2.0 * h, 0.0);

    // (i) flat-coordinate eigenvalues.
    let x0 = flat_coordinates(chart, n);
    let xp = flat_coordinates(&chart.displaced(&euler_dir, h), n);
    let xm = flat_coordinates(&chart.displaced(&euler_dir, -h), n);
    let mut flat_eigen_dev = 0.0f64;
    for i0 in 0..n {
        let deriv = (xp[i0] - xm[i0]) / two_h;
        let eigen = C64::new((i0 as f64 + 2.0) / nf, 0.0);
        flat_eigen_dev = flat_eigen_dev.max((deriv - eigen * x0[i0]).norm());
    }

    // (ii) e·η = g(e,e).
    let e_eta = (pot(&chart.displaced(&e_dir, h)) - pot(&chart.displaced(&e_dir, -h))) / two_h;
    let e_eta_dev = (e_eta - cd.sum_eta()).norm();

    // (iii) E·η = (D−1)·η.
    let d_big = (n as f64 + 3.0) / nf;
    let euler_eta =
        (pot(&chart.displaced(&euler_dir, h)) - pot(&chart.displaced(&euler_dir, -h))) / two_h;
    let euler_eta_dev = (euler_eta - C64::new(d_big - 1.0, 0.0) * pot(chart)).norm();

    Ok(EulerReport {
        flat_eigen_dev,
        e_eta_dev,
        euler_eta_dev,
        d_big,
        max_dev: flat_eigen_dev.max(e_eta_dev).max(euler_eta_dev),
    })
}

/// The two-variable unfolding `F = z₁^{n₁+1} + z₂^{n₂+1} + Σ t_{kl} z₁^k z₂^l`
/// over the full product Milnor basis `0 ≤ k < n₁`, `0 ≤ l < n₂`.
struct ProductUnfolding {
    na: usize,
    nb: usize,
    t: Vec<C64>,
}

impl ProductUnfolding {
    fn from_charts(a: &AnChart, b: &AnChart) -> Self {
        let (na, nb) = (a.n(), b.n());
        let mut t = vec![C64::new(0.0, 0.0); na * nb];
        for i in 1..=na {
            // a_i multiplies z₁^{n₁−i}.
            t[(na - i) * nb] += a.a[i - 1];
        }
        for j in 1..=nb {
            t[nb - j] += b.a[j - 1];
        }
        ProductUnfolding { na, nb, t }
    }

    fn idx(&self, k: usize, l: usize) -> usize {
        k * self.nb + l
    }

    fn eval(&self, t: &[C64], z1: C64, z2: C64) -> C64 {
        let mut f = z1.powi(self.na as i32 + 1) + z2.powi(self.nb as i32 + 1);
        for k in 0..self.na {
            for l in 0..self.nb {
                let c = t[self.idx(k, l)];
                if c.norm() != 0.0 {
                    f += c * z1.powi(k as i32) * z2.powi(l as i32);
                }
            }
        }
        f
    }

    fn grad(&self, t: &[C64], z1: C64, z2: C64) -> (C64, C64) {
        let mut g1 = C64::new(self.na as f64 + 1.0, 0.0) * z1.powi(self.na as i32);
        let mut g2 = C64::new(self.nb as f64 + 1.0, 0.0) * z2.powi(self.nb as i32);
        for k in 0..self.na {
            for l in 0..self.nb {
                let c = t[self.idx(k, l)];
                if c.norm() == 0.0 {
                    continue;
                }
                if k > 0 {
                    g1 += c * C64::new(k as f64, 0.0) * z1.powi(k as i32 - 1) * z2.powi(l as i32);
                }
                if l > 0 {
                    g2 += c * C64::new(l as f64, 0.0) * z1.powi(k as i32) * z2.powi(l as i32 - 1);
                }
            }
        }
        (g1, g2)
    }

    fn hessian(&self, t: &[C64], z1: C64, z2: C64) -> (C64, C64, C64) {
        let na = self.na as f64;
        let nb = self.nb as f64;
        let mut h11 = C64::new((na + 1.0) * na, 0.0) * z1.powi(self.na as i32 - 1);
        let mut h22 = C64::new((nb + 1.0) * nb, 0.0) * z2.powi(self.nb as i32 - 1);
        let mut h12 = C64::new(0.0, 0.0);
        for k in 0..self.na {
            for l in 0..self.nb {
                let c = t[self.idx(k, l)];
                if c.norm() == 0.0 {
                    continue;
                }
                if k > 1 {
                    h11 += c
                        * C64::new((k * (k - 1)) as f64, 0.0)
                        * z1.powi(k as i32 - 2)
                        * z2.powi(l as i32);
                }
                if l > 1 {
                    h22 += c
                        * C64::new((l * (l - 1)) as f64, 0.0)
                        * z1.powi(k as i32)
                        * z2.powi(l as i32 - 2);
                }
                if k > 0 && l > 0 {
                    h12 += c
                        * C64::new((k * l) as f64, 0.0)
                        * z1.powi(k as i32 - 1)
                        * z2.powi(l as i32 - 1);
                }
            }
        }
        (h11, h12, h22)
    }

    /// Newton-refine one critical point from `seed`.
    fn refine(&self, t: &[C64], seed: (C64, C64), which: usize) -> Result<(C64, C64), SaitoError> {
        let (mut z1, mut z2) = seed;
        for _ in 0..60 {
            let (g1, g2) = self.grad(t, z1, z2);
            let (h11, h12, h22) = self.hessian(t, z1, z2);
            let det = h11 * h22 - h12 * h12;
            if det.norm() == 0.0 {
                return Err(SaitoError::NewtonDiverged(which));
            }
            let s1 = (h22 * g1 - h12 * g2) / det;
            let s2 = (h11 * g2 - h12 * g1) / det;
            z1 -= s1;
            z2 -= s2;
            if s1.norm() + s2.norm() <= 1e-14 * (1.0 + z1.norm() + z2.norm()) {
                break;
            }
        }
        let (g1, g2) = self.grad(t, z1, z2);
        let scale = 1.0 + t.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if g1.norm() + g2.norm() > 1e-8 * scale {
            return Err(SaitoError::NewtonDiverged(which));
        }
        Ok((z1, z2))
    }

    fn refine_all(
        &self,
        t: &[C64],
        seeds: &[(C64, C64)],
    ) -> Result<Vec<(C64, C64)>, SaitoError> {
        seeds
            .iter()
            .enumerate()
            .map(|(i, &s)| self.refine(t, s, i))
            .collect()
    }

    /// Critical values and inverse Hessian determinants at the points.
    fn u_eta(&self, t: &[C64], pts: &[(C64, C64)]) -> (Vec<C64>, Vec<C64>) {
        let mut u = Vec::with_capacity(pts.len());
        let mut eta = Vec::with_capacity(pts.len());
        for &(z1, z2) in pts {
            u.push(self.eval(t, z1, z2));
            let (h11, h12, h22) = self.hessian(t, z1, z2);
            eta.push(C64::new(1.0, 0.0) / (h11 * h22 - h12 * h12));
        }
        (u, eta)
    }
}

/// Direct-sum verification data; the `germ` field carries the framework
/// germ computed from the two-variable unfolding itself.
#[derive(Debug, Clone)]
pub struct DirectSumReport {
    /// max |u^{(ij)} − (u_i + u_j)|.
    pub u_dev: f64,
    /// max |η_{(ij)} − η_i η_j|.
    pub eta_dev: f64,
    /// max |η_{IK}(finite differences) − η_{IK}(product formula)|.
    pub eta_jac_dev: f64,
    /// max |η_{IK}| over entries where both index pairs differ.
    pub block_zero_dev: f64,
    pub max_dev: f64,
    pub germ: SemisimpleGerm,
}

/// Verify the direct-sum formulas on `F_A(z₁) + F_B(z₂)`.
///
/// The product critical data (values, Hessians) is computed on the full
/// two-variable unfolding; `η_{IK}` is then measured by central
/// differences along the canonical directions obtained by inverting the
/// envelope Jacobian `∂u^{(ij)}/∂t_{kl} = ρ_{A,i}^k ρ_{B,j}^l`, and
/// compared against the product formula
/// `η_{IK} = δ_{jl} η^{(A)}_{ik} η^{(B)}_l + δ_{ik} η^{(A)}_k η^{(B)}_{jl}`.
pub fn direct_sum_verify(
    chart_a: &AnChart,
    chart_b: &AnChart,
    tol: f64,
) -> Result<DirectSumReport, SaitoError> {
    let cda = critical_data(chart_a, tol)?;
    let cdb = critical_data(chart_b, tol)?;
    if !cda.tame || !cdb.tame {
        return Err(SaitoError::NonTame(
            "direct sums need both factors tame".into(),
        ));
    }
    let (na, nb) = (chart_a.n(), chart_b.n());
    let mu = na * nb;

    let mut u_sum = Vec::with_capacity(mu);
    let mut eta_prod = Vec::with_capacity(mu);
    for i in 0..na {
        for j in 0..nb {
            u_sum.push(cda.u[i] + cdb.u[j]);
            eta_prod.push(cda.eta[i] * cdb.eta[j]);
        }
    }
    let uscale = u_sum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for p in 0..mu {
        for q in (p + 1)..mu {
            let dist = (u_sum[p] - u_sum[q]).norm();
            if dist <= tol.max(1e-12) * (1.0 + uscale) {
                return Err(SaitoError::Collision(format!(
                    "u^{p} and u^{q} coincide (distance {dist:.3e})"
                )));
            }
        }
    }

    let unf = ProductUnfolding::from_charts(chart_a, chart_b);
    let seeds: Vec<(C64, C64)> = (0..na)
        .flat_map(|i| (0..nb).map(move |j| (i, j)))
        .map(|(i, j)| (cda.rho[i], cdb.rho[j]))
        .collect();
    let base_pts = unf.refine_all(&unf.t, &seeds)?;
    let (u_direct, eta_direct) = unf.u_eta(&unf.t, &base_pts);

    let mut u_dev = 0.0f64;
    let mut eta_dev = 0.0f64;
    for p in 0..mu {
        u_dev = u_dev.max((u_direct[p] - u_sum[p]).norm());
        eta_dev = eta_dev.max((eta_direct[p] - eta_prod[p]).norm());
    }

    // Envelope Jacobian du^{(ij)}/dt_{kl} and its inverse.
    let mut jac = CMatrix::zeros(mu, mu);
    for i in 0..na {
        for j in 0..nb {
            let row = i * nb + j;
            for k in 0..na {
                for l in 0..nb {
                    jac[(row, unf.idx(k, l))] =
                        cda.rho[i].powi(k as i32) * cdb.rho[j].powi(l as i32);
                }
            }
        }
    }
    let jinv = jac.inverse()?;

    let h = 1e-5 * (1.0 + unf.t.iter().map(|c| c.norm()).fold(0.0, f64::max));
    let mut eta_jac_fd = CMatrix::zeros(mu, mu);
    for kcol in 0..mu {
        let mut tp = unf.t.clone();
        let mut tm = unf.t.clone();
        for r in 0..mu {
            let step = jinv[(r, kcol)] * C64::new(h, 0.0);
            tp[r] += step;
            tm[r] -= step;
        }
        let (_, ep) = unf.u_eta(&tp, &unf.refine_all(&tp, &base_pts)?);
        let (_, em) = unf.u_eta(&tm, &unf.refine_all(&tm, &base_pts)?);
        for row in 0..mu {
            eta_jac_fd[(row, kcol)] = (ep[row] - em[row]) / C64::new(2.0 * h, 0.0);
        }
    }

    let eja = eta_jacobian_from_critical(&cda)?;
    let ejb = eta_jacobian_from_critical(&cdb)?;
    let mut eta_jac_dev = 0.0f64;
    let mut block_zero_dev = 0.0f64;
    for i in 0..na {
        for j in 0..nb {
            let row = i * nb + j;
            for k in 0..na {
                for l in 0..nb {
                    let col = k * nb + l;
                    let mut formula = C64::new(0.0, 0.0);
                    if j == l {
                        formula += eja.mat[(i, k)] * cdb.eta[l];
                    }
                    if i == k {
                        formula += cda.eta[k] * ejb.mat[(j, l)];
                    }
                    let fd = eta_jac_fd[(row, col)];
                    eta_jac_dev = eta_jac_dev.max((fd - formula).norm());
                    if i != k && j != l {
                        block_zero_dev = block_zero_dev.max(fd.norm());
                    }
                }
            }
        }
    }

    let mut v = CMatrix::zeros(mu, mu);
    for p in 0..mu {
        for q in 0..mu {
            if p == q {
                continue;
            }
            v[(p, q)] = (u_direct[q] - u_direct[p]) * C64::new(0.5, 0.0) * eta_jac_fd[(p, q)]
                / eta_direct[q];
        }
    }
    let germ = SemisimpleGerm::new(u_direct, eta_direct, v)?;

    Ok(DirectSumReport {
        u_dev,
        eta_dev,
        eta_jac_dev,
        block_zero_dev,
        max_dev: u_dev.max(eta_dev).max(eta_jac_dev).max(block_zero_dev),
        germ,
    })
}
