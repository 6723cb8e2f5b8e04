//! Master-equation solutions and the Frobenius structure they induce.
//!
//! Starting from a dGBV algebra whose δΔ-conditions hold, this module
//! builds the formal base K = k[[x_i]] on a homology basis with the unit
//! class first, solves the master equation δΓ + ½[Γ∙Γ] = 0 degree by
//! degree with a normalized solution (Γ₁ = Σ x_i c_i, higher terms in
//! Im Δ), and derives the Frobenius data: the ∘-product by reduction
//! modulo Im δ_Γ, the metric g_{ij} = ∫ c_i c_j, and the potential
//! Φ = ∫(Γ³/6 − ½ δB·ΔB). Verification routines re-check every claimed
//! identity from scratch: the master residual, the cubic directional
//! identity X³Φ = ∫(X̄Γ)³, associativity (WDVV) for the potential, the
//! Euler grading, and the supersymmetry-mod-exact flatness identity.
//!
//! All arithmetic is exact over ℚ; degree-by-degree linear solves use
//! fixed pivoting with free variables pinned to zero, so results are
//! reproducible across runs.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dgbv::{bracket, conditions_check, CheckReport, DGBVAlgebra, DgbvError, OddOperator, SuperAlgebra};
use crate::qmatrix::{span_basis, vector_in_span, QMatrix};
use crate::scalar::{rat, rat_to_string, Rat};
use crate::series::{
    expo_mul, monomials_up_to, Expo, GradedSeries, GradedVariable, Parity, VarRing,
};

/// Default truncation order for master-equation solves.
pub const DEFAULT_ORDER: usize = 6;

#[derive(Debug, Error)]
pub enum McError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("lead homology class is not the unit")]
    NonUnitLead,
    #[error("obstruction at order {degree}, monomial {monomial}: right-hand side is not δΔ-exact")]
    Obstruction { degree: usize, monomial: String },
    #[error("reduction to homology failed at monomial {0}")]
    Reduction(String),
    #[error("metric is degenerate: rank {rank} < {dim}")]
    Degenerate { rank: usize, dim: usize },
    #[error("internal invariant violated: {0}")]
    Invalid(String),
    #[error(transparent)]
    Dgbv(#[from] DgbvError),
}

fn vec_is_zero(v: &[Rat]) -> bool {
    v.iter().all(Rat::is_zero)
}

fn vec_add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

fn vec_neg(a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| -x.clone()).collect()
}

fn vec_scale(a: &[Rat], c: &Rat) -> Vec<Rat> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

fn expo_name(ring: &VarRing, e: &Expo) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.0.iter().enumerate() {
        if k == 1 {
            parts.push(ring.var(i).name.clone());
        } else if k > 1 {
            parts.push(format!("{}^{}", ring.var(i).name, k));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Weight of the support of `v`; errors when the support mixes weights
/// or is empty.
fn support_weight(alg: &SuperAlgebra, v: &[Rat]) -> Result<Rat, McError> {
    let ws = alg
        .weights()
        .ok_or_else(|| McError::Precondition("algebra carries no weights".into()))?;
    let mut w: Option<Rat> = None;
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        match &w {
            None => w = Some(ws[i].clone()),
            Some(x) if *x == ws[i] => {}
            Some(x) => {
                return Err(McError::Precondition(format!(
                    "support mixes weights {} and {}",
                    rat_to_string(x),
                    rat_to_string(&ws[i])
                )))
            }
        }
    }
    w.ok_or_else(|| McError::Precondition("zero vector has no weight".into()))
}

/// Element of K ⊗ A: a truncated series in the base coordinates whose
/// coefficients are algebra elements. Each stored term means m ⊗ a with
/// the monomial m written to the left; all products, operators and
/// derivatives carry the Koszul signs of that convention.
#[derive(Debug, Clone, PartialEq)]
pub struct KaSeries {
    ring: Arc<VarRing>,
    dim: usize,
    trunc: usize,
    terms: BTreeMap<Expo, Vec<Rat>>,
}

impl KaSeries {
    pub fn zero(ring: Arc<VarRing>, dim: usize, trunc: usize) -> Self {
        KaSeries {
            ring,
            dim,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(ring: Arc<VarRing>, dim: usize, trunc: usize, e: Expo, a: &[Rat]) -> Self {
        let mut s = Self::zero(ring, dim, trunc);
        s.add_term(e, a);
        s
    }

    /// Constant element 1 ⊗ a.
    pub fn constant(ring: Arc<VarRing>, dim: usize, trunc: usize, a: &[Rat]) -> Self {
        let n = ring.len();
        Self::monomial(ring, dim, trunc, Expo::zero(n), a)
    }

    pub fn ring(&self) -> &Arc<VarRing> {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &Vec<Rat>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Expo) -> Vec<Rat> {
        self.terms
            .get(e)
            .cloned()
            .unwrap_or_else(|| vec![Rat::zero(); self.dim])
    }

    /// Add `a` to the coefficient of `e`, dropping terms beyond the
    /// truncation order and terms that square an odd variable.
    pub fn add_term(&mut self, e: Expo, a: &[Rat]) {
        assert_eq!(a.len(), self.dim, "coefficient dimension mismatch");
        if vec_is_zero(a) || e.total() > self.trunc {
            return;
        }
        for (i, &k) in e.0.iter().enumerate() {
            if k >= 2 && self.ring.parity(i) == Parity::Odd {
                return;
            }
        }
        let entry = self
            .terms
            .entry(e.clone())
            .or_insert_with(|| vec![Rat::zero(); self.dim]);
        *entry = vec_add(entry, a);
        if vec_is_zero(entry) {
            self.terms.remove(&e);
        }
    }

    fn assert_compatible(&self, other: &Self) {
        assert!(
            *self.ring == *other.ring && self.trunc == other.trunc && self.dim == other.dim,
            "K⊗A ring/truncation/dimension mismatch"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (e, a) in &other.terms {
            out.add_term(e.clone(), a);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.dim, self.trunc);
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), vec_neg(a));
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.dim, self.trunc);
        if c.is_zero() {
            return out;
        }
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), vec_scale(a, c));
        }
        out
    }

    pub fn homogeneous_part(&self, n: usize) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.dim, self.trunc);
        for (e, a) in &self.terms {
            if e.total() == n {
                out.terms.insert(e.clone(), a.clone());
            }
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|e| e.total()).max().unwrap_or(0)
    }

    pub fn with_trunc(&self, trunc: usize) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.dim, trunc);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a);
        }
        out
    }

    /// Product in K ⊗ A:
    /// (m₁⊗a₁)(m₂⊗a₂) = σ(m₁,m₂)·(−1)^{ã₁ μ̃₂} (m₁m₂) ⊗ a₁a₂,
    /// where σ is the Koszul sign of merging the monomials and μ̃₂ the
    /// parity of m₂ (the coefficient a₁ moves past it).
    pub fn mul(&self, other: &Self, alg: &SuperAlgebra) -> Self {
        self.assert_compatible(other);
        assert_eq!(alg.dim(), self.dim, "algebra dimension mismatch");
        let mut out = Self::zero(self.ring.clone(), self.dim, self.trunc);
        for (ea, va) in &self.terms {
            let (va_even, va_odd) = alg.parity_split(va);
            for (eb, vb) in &other.terms {
                if ea.total() + eb.total() > self.trunc {
                    continue;
                }
                let Some((e, merge_neg)) = expo_mul(&self.ring, ea, eb) else {
                    continue;
                };
                let mu_b_odd = self.ring.monomial_parity(eb) == Parity::Odd;
                if !vec_is_zero(&va_even) {
                    let p = alg.mul(&va_even, vb);
                    out.add_term(e.clone(), &if merge_neg { vec_neg(&p) } else { p });
                }
                if !vec_is_zero(&va_odd) {
                    let p = alg.mul(&va_odd, vb);
                    let neg = merge_neg ^ mu_b_odd;
                    out.add_term(e, &if neg { vec_neg(&p) } else { p });
                }
            }
        }
        out
    }

    /// Apply an odd algebra operator D coefficientwise:
    /// D(m ⊗ a) = (−1)^{μ̃} m ⊗ Da.
    pub fn apply_odd(&self, op: &OddOperator) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.dim, self.trunc);
        for (e, a) in &self.terms {
            let img = op.apply(a);
            let neg = self.ring.monomial_parity(e) == Parity::Odd;
            out.add_term(e.clone(), &if neg { vec_neg(&img) } else { img });
        }
        out
    }

    /// Left partial derivative in the base coordinate x_i; the algebra
    /// part is untouched (it sits to the right of the monomial).
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.dim, self.trunc);
        for (e, a) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.0[i] = k - 1;
            let coeff = match self.ring.parity(i) {
                Parity::Even => vec_scale(a, &Rat::from_integer((k as i64).into())),
                Parity::Odd => {
                    let mut crossings = 0u32;
                    for j in 0..i {
                        if self.ring.parity(j) == Parity::Odd {
                            crossings += e.0[j] as u32;
                        }
                    }
                    if crossings % 2 == 1 {
                        vec_neg(a)
                    } else {
                        a.clone()
                    }
                }
            };
            out.add_term(e2, &coeff);
        }
        out
    }

    /// Integrate the algebra part: ∫(m ⊗ a) = (−1)^{p̃(∫) μ̃} (∫a) m.
    pub fn integrate(&self, d: &DGBVAlgebra, integral_parity: Parity) -> GradedSeries<Rat> {
        let mut out = GradedSeries::zero(self.ring.clone(), self.trunc);
        for (e, a) in &self.terms {
            let mut c = d.integrate(a);
            if integral_parity == Parity::Odd && self.ring.monomial_parity(e) == Parity::Odd {
                c = -c;
            }
            out.add_term(e.clone(), c);
        }
        out
    }

    /// True when every term m ⊗ a is even overall: the coefficient is
    /// parity-homogeneous of the same parity as its monomial.
    pub fn is_even_element(&self, alg: &SuperAlgebra) -> bool {
        self.terms.iter().all(|(e, a)| {
            let (even, odd) = alg.parity_split(a);
            match self.ring.monomial_parity(e) {
                Parity::Even => vec_is_zero(&odd) && !vec_is_zero(&even) || vec_is_zero(a),
                Parity::Odd => vec_is_zero(&even),
            }
        })
    }

    /// True when every term has total weight (monomial plus coefficient
    /// support) equal to `target`. Errors out as `false` when weights
    /// are missing or a coefficient mixes weights.
    pub fn has_uniform_weight(&self, alg: &SuperAlgebra, target: &Rat) -> bool {
        self.terms.iter().all(|(e, a)| {
            let Some(mw) = self.ring.monomial_weight(e) else {
                return false;
            };
            match support_weight(alg, a) {
                Ok(cw) => mw + cw == *target,
                Err(_) => false,
            }
        })
    }
}

/// Odd bracket on K ⊗ A, reduced to the algebra bracket on coefficients:
/// [m₁⊗a₁ ∙ m₂⊗a₂] = σ(m₁,m₂)·(−1)^{(ã₁+1) μ̃₂} (m₁m₂) ⊗ [a₁∙a₂].
pub fn ka_bracket(d: &DGBVAlgebra, u: &KaSeries, v: &KaSeries) -> KaSeries {
    u.assert_compatible(v);
    let alg = &d.algebra;
    let mut out = KaSeries::zero(u.ring.clone(), u.dim, u.trunc);
    for (ea, va) in &u.terms {
        let (va_even, va_odd) = alg.parity_split(va);
        for (eb, vb) in &v.terms {
            if ea.total() + eb.total() > u.trunc {
                continue;
            }
            let Some((e, merge_neg)) = expo_mul(&u.ring, ea, eb) else {
                continue;
            };
            let mu_b_odd = u.ring.monomial_parity(eb) == Parity::Odd;
            for (part, abit) in [(&va_even, 0u8), (&va_odd, 1u8)] {
                if vec_is_zero(part) {
                    continue;
                }
                let br = bracket(alg, &d.laplacian, part, vb);
                // (ã₁+1)·μ̃₂ crossing of the parity-(ã₁+1) operation.
                let neg = merge_neg ^ (((abit + 1) % 2 == 1) && mu_b_odd);
                out.add_term(e.clone(), &if neg { vec_neg(&br) } else { br });
            }
        }
    }
    out
}

/// Formal base of the construction: coordinates dual to a homology
/// basis with the unit class first, plus the truncation order.
#[derive(Debug, Clone)]
pub struct FormalBase {
    ring: Arc<VarRing>,
    classes: Vec<Vec<Rat>>,
    rep_matrix: QMatrix,
    order: usize,
}

impl FormalBase {
    /// Build the base from the canonical homology representatives of the
    /// instance. Requires both δΔ-conditions; the unit class must come
    /// first (it always does when the unit represents a nonzero class).
    pub fn new(d: &DGBVAlgebra, order: usize) -> Result<Self, McError> {
        assert!(order >= 1, "truncation order must be at least 1");
        let report = conditions_check(d)?;
        if !(report.condition_a && report.condition_b) {
            return Err(McError::Precondition(
                "both δΔ-conditions must hold to solve the master equation".into(),
            ));
        }
        let classes = report.representatives;
        if classes.is_empty() {
            return Err(McError::Precondition("homology is zero".into()));
        }
        if classes[0] != d.algebra.unit_vec() {
            return Err(McError::NonUnitLead);
        }
        let have_weights = d.algebra.weights().is_some();
        let two = Rat::from_integer(2.into());
        let mut vars = Vec::new();
        for (i, c) in classes.iter().enumerate() {
            let parity = d.algebra.homogeneous_parity(c).ok_or_else(|| {
                McError::Precondition(format!("homology representative {i} mixes parities"))
            })?;
            let weight = if have_weights {
                Some(two.clone() - support_weight(&d.algebra, c)?)
            } else {
                None
            };
            vars.push(GradedVariable {
                name: format!("x{i}"),
                parity,
                weight,
            });
        }
        let dim = d.dim();
        let rep_matrix = QMatrix::from_cols(&classes, dim);
        Ok(FormalBase {
            ring: Arc::new(VarRing::new(vars)),
            classes,
            rep_matrix,
            order,
        })
    }

    pub fn standard(d: &DGBVAlgebra) -> Result<Self, McError> {
        Self::new(d, DEFAULT_ORDER)
    }

    pub fn ring(&self) -> &Arc<VarRing> {
        &self.ring
    }

    /// Number of homology classes (= number of coordinates).
    pub fn rank(&self) -> usize {
        self.classes.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn class(&self, i: usize) -> &[Rat] {
        &self.classes[i]
    }

    pub fn classes(&self) -> &[Vec<Rat>] {
        &self.classes
    }

    /// Matrix whose columns are the homology representatives.
    pub fn rep_matrix(&self) -> &QMatrix {
        &self.rep_matrix
    }

    /// The constant H-valued series e_i (the coordinate field X_i).
    pub fn basis_field(&self, i: usize) -> KaSeries {
        let mut a = vec![Rat::zero(); self.rank()];
        a[i] = Rat::one();
        KaSeries::constant(self.ring.clone(), self.rank(), self.order, &a)
    }

}

/// Normalized master-equation solution: Γ = Γ₁ + … + Γ_N with
/// Γ₁ = Σ x_i c_i, Γ_n ∈ K ⊗ Im Δ for n ≥ 2, and Γ = Γ₁ + ΔB.
#[derive(Debug, Clone)]
pub struct GammaSolution {
    pub base: FormalBase,
    /// Full solution Σ_n Γ_n, truncated at the base order.
    pub gamma: KaSeries,
    /// Γ_n per x-degree; index 0 is zero.
    pub per_degree: Vec<KaSeries>,
    /// B with ΔB = Γ − Γ₁ and no terms of degree ≤ 1.
    pub b_field: KaSeries,
}

/// Solve the master equation degree by degree. At each order the
/// equation δΓ_{n+1} = −½ Σ_{i+j=n+1} [Γ_i ∙ Γ_j] is solved one
/// monomial at a time through the composite δΔ, which lands Γ_{n+1} in
/// Im Δ; an unsolvable right-hand side is reported as an obstruction
/// (it cannot occur when the δΔ-conditions hold).
pub fn solve_master(d: &DGBVAlgebra, base: &FormalBase) -> Result<GammaSolution, McError> {
    let n_ord = base.order;
    let dim = d.dim();
    let ring = base.ring.clone();
    let dd = d.differential.matrix().matmul(d.laplacian.matrix());

    let mut per_degree = vec![KaSeries::zero(ring.clone(), dim, n_ord); n_ord + 1];
    let mut gamma1 = KaSeries::zero(ring.clone(), dim, n_ord);
    for (i, c) in base.classes.iter().enumerate() {
        gamma1.add_term(Expo::unit(ring.len(), i), c);
    }
    per_degree[1] = gamma1.clone();
    let mut b_field = KaSeries::zero(ring.clone(), dim, n_ord);

    let half = rat(1, 2);
    for n in 1..n_ord {
        // Right-hand side at degree n+1: −½ Σ_{i+j=n+1} [Γ_i ∙ Γ_j].
        let mut rhs = KaSeries::zero(ring.clone(), dim, n_ord);
        for i in 1..=n {
            let j = n + 1 - i;
            if j < 1 || j > n {
                continue;
            }
            rhs = rhs.add(&ka_bracket(d, &per_degree[i], &per_degree[j]));
        }
        let rhs = rhs.scale(&half).neg();
        let mut next = KaSeries::zero(ring.clone(), dim, n_ord);
        for (m, r_m) in rhs.terms() {
            debug_assert_eq!(m.total(), n + 1);
            let signed = if ring.monomial_parity(m) == Parity::Odd {
                vec_neg(r_m)
            } else {
                r_m.clone()
            };
            let w = dd.solve(&signed).ok_or_else(|| McError::Obstruction {
                degree: n + 1,
                monomial: expo_name(&ring, m),
            })?;
            let g_m = d.laplacian.apply(&w);
            next.add_term(m.clone(), &g_m);
            let b_m = if ring.monomial_parity(m) == Parity::Odd {
                vec_neg(&w)
            } else {
                w
            };
            b_field.add_term(m.clone(), &b_m);
        }
        per_degree[n + 1] = next;
    }

    let mut gamma = KaSeries::zero(ring.clone(), dim, n_ord);
    for part in &per_degree {
        gamma = gamma.add(part);
    }

    let sol = GammaSolution {
        base: base.clone(),
        gamma,
        per_degree,
        b_field,
    };
    // Independent residual evaluation; a failure here is a bug, not
    // a property of the input.
    let resid = master_residual(d, &sol.gamma);
    if !resid.is_zero() {
        return Err(McError::Invalid(
            "master residual nonzero after solve".into(),
        ));
    }
    let delta_b = sol.b_field.apply_odd(&d.laplacian);
    if delta_b != sol.gamma.sub(&sol.per_degree[1]) {
        return Err(McError::Invalid("ΔB does not reproduce Γ − Γ₁".into()));
    }
    Ok(sol)
}

/// The master residual δΓ + ½[Γ∙Γ], evaluated from scratch.
pub fn master_residual(d: &DGBVAlgebra, gamma: &KaSeries) -> KaSeries {
    let half = rat(1, 2);
    gamma
        .apply_odd(&d.differential)
        .add(&ka_bracket(d, gamma, gamma).scale(&half))
}

impl GammaSolution {
    /// Re-verify every invariant of a normalized solution from scratch:
    /// the residual, ΔΓ = 0, the Im Δ normalization of Γ_{n≥2}, their
    /// independence of x₀, ∂Γ/∂x₀ = 1, evenness, the weight grading,
    /// and ΔB = Γ − Γ₁ with B supported in degrees ≥ 2.
    pub fn verify(&self, d: &DGBVAlgebra) -> CheckReport {
        let mut rep = CheckReport::new();
        let push = |rep: &mut CheckReport, ok: bool, msg: String| {
            rep.checks += 1;
            if !ok {
                rep.violations.push(msg);
            }
        };
        let ring = &self.base.ring;
        let dim = d.dim();

        let resid = master_residual(d, &self.gamma);
        push(&mut rep, resid.is_zero(), format!(
            "master residual has {} nonzero terms",
            resid.terms.len()
        ));

        push(&mut rep, self.gamma.apply_odd(&d.laplacian).is_zero(),
            "ΔΓ does not vanish".into());

        let lap_cols: Vec<Vec<Rat>> = (0..dim).map(|j| d.laplacian.col(j)).collect();
        let im_lap = span_basis(&lap_cols, dim);
        for (n, part) in self.per_degree.iter().enumerate().skip(2) {
            for (e, a) in part.terms() {
                push(&mut rep, vector_in_span(a, &im_lap, dim), format!(
                    "Γ_{n} coefficient at {} is not in Im Δ",
                    expo_name(ring, e)
                ));
                push(&mut rep, e.0[0] == 0, format!(
                    "Γ_{n} term {} depends on x0",
                    expo_name(ring, e)
                ));
            }
        }

        let unit = KaSeries::constant(ring.clone(), dim, self.gamma.trunc, &d.algebra.unit_vec());
        push(&mut rep, self.gamma.partial(0) == unit, "∂Γ/∂x0 ≠ 1".into());

        let mut gamma1 = KaSeries::zero(ring.clone(), dim, self.gamma.trunc);
        for (i, c) in self.base.classes.iter().enumerate() {
            gamma1.add_term(Expo::unit(ring.len(), i), c);
        }
        push(&mut rep, self.per_degree[1] == gamma1, "Γ₁ ≠ Σ x_i c_i".into());

        push(&mut rep, self.gamma.is_even_element(&d.algebra), "Γ is not even".into());

        if d.algebra.weights().is_some() {
            let two = Rat::from_integer(2.into());
            push(&mut rep, self.gamma.has_uniform_weight(&d.algebra, &two),
                "Γ is not of uniform weight 2".into());
        }

        let delta_b = self.b_field.apply_odd(&d.laplacian);
        push(&mut rep, delta_b == self.gamma.sub(&self.per_degree[1]),
            "ΔB ≠ Γ − Γ₁".into());
        push(
            &mut rep,
            self.b_field.terms().all(|(e, _)| e.total() >= 2),
            "B has terms of degree ≤ 1".into(),
        );
        rep
    }
}

/// Directional derivative X̄Γ of Γ along an H-valued series direction:
/// the coefficient functions multiply the coordinate partials from the
/// left.
fn dir_derivative(d: &DGBVAlgebra, sol: &GammaSolution, h: &KaSeries) -> KaSeries {
    assert_eq!(h.dim, sol.base.rank(), "direction must be H-valued");
    let dim = d.dim();
    let ring = &sol.base.ring;
    let partials: Vec<KaSeries> = (0..sol.base.rank())
        .map(|i| sol.gamma.partial(i))
        .collect();
    let mut out = KaSeries::zero(ring.clone(), dim, sol.gamma.trunc);
    for (m, z) in h.terms() {
        for (i, zi) in z.iter().enumerate() {
            if zi.is_zero() {
                continue;
            }
            let scalar = KaSeries::monomial(
                ring.clone(),
                dim,
                sol.gamma.trunc,
                m.clone(),
                &vec_scale(&d.algebra.unit_vec(), zi),
            );
            out = out.add(&scalar.mul(&partials[i], &d.algebra));
        }
    }
    out
}

/// The deformed differential δ_Γ = δ + [Γ ∙ −] applied to `w`.
fn deformed_differential(d: &DGBVAlgebra, sol: &GammaSolution, w: &KaSeries) -> KaSeries {
    w.apply_odd(&d.differential).add(&ka_bracket(d, &sol.gamma, w))
}

/// Decompose `u` as Z̄Γ + δ_Γ W degree by degree and return the H-class
/// series Z truncated to `out_order`. The per-monomial systems are
/// [representatives | ±δ]; solvability is exactly the homology
/// surjectivity the δΔ-conditions guarantee.
fn reduce_to_homology(
    d: &DGBVAlgebra,
    sol: &GammaSolution,
    u: &KaSeries,
    out_order: usize,
) -> Result<KaSeries, McError> {
    let dim = d.dim();
    let r = sol.base.rank();
    let ring = &sol.base.ring;
    let smat = d.differential.matrix();
    let hcat = |sign_neg: bool| -> QMatrix {
        let mut m = QMatrix::zeros(dim, r + dim);
        for i in 0..dim {
            for j in 0..r {
                m[(i, j)] = sol.base.rep_matrix[(i, j)].clone();
            }
            for j in 0..dim {
                let v = smat[(i, j)].clone();
                m[(i, r + j)] = if sign_neg { -v } else { v };
            }
        }
        m
    };
    let sys_even = hcat(false);
    let sys_odd = hcat(true);

    let mut z = KaSeries::zero(ring.clone(), r, u.trunc);
    let mut w = KaSeries::zero(ring.clone(), dim, u.trunc);
    for deg in 0..=out_order {
        let approx = dir_derivative(d, sol, &z).add(&deformed_differential(d, sol, &w));
        let resid = u.sub(&approx).homogeneous_part(deg);
        for (m, rm) in resid.terms() {
            let sys = if ring.monomial_parity(m) == Parity::Odd {
                &sys_odd
            } else {
                &sys_even
            };
            let s = sys
                .solve(rm)
                .ok_or_else(|| McError::Reduction(expo_name(ring, m)))?;
            z.add_term(m.clone(), &s[0..r]);
            w.add_term(m.clone(), &s[r..r + dim]);
        }
    }
    // Independent re-check of the decomposition through the order.
    let approx = dir_derivative(d, sol, &z).add(&deformed_differential(d, sol, &w));
    let resid = u.sub(&approx);
    for (m, _) in resid.terms() {
        if m.total() <= out_order {
            return Err(McError::Invalid(format!(
                "reduction residual survives at {}",
                expo_name(ring, m)
            )));
        }
    }
    Ok(z.with_trunc(out_order))
}

/// ∘-product of two H-valued series: lift both through X̄Γ, multiply in
/// K ⊗ A, reduce modulo Im δ_Γ. Results carry truncation order N−1.
pub fn circ_product(
    d: &DGBVAlgebra,
    sol: &GammaSolution,
    x: &KaSeries,
    y: &KaSeries,
) -> Result<KaSeries, McError> {
    let xg = dir_derivative(d, sol, x);
    let yg = dir_derivative(d, sol, y);
    let p = xg.mul(&yg, &d.algebra);
    reduce_to_homology(d, sol, &p, sol.base.order.saturating_sub(1))
}

/// ∘-product of two coordinate fields X_i ∘ X_j.
pub fn circ_basis(
    d: &DGBVAlgebra,
    sol: &GammaSolution,
    i: usize,
    j: usize,
) -> Result<KaSeries, McError> {
    circ_product(d, sol, &sol.base.basis_field(i), &sol.base.basis_field(j))
}

/// Metric g_{ij} = ∫ c_i c_j on the homology basis. Hard-errors when
/// the pairing is degenerate, odd, or not supersymmetric.
pub fn metric(d: &DGBVAlgebra, base: &FormalBase) -> Result<QMatrix, McError> {
    let r = base.rank();
    let mut g = QMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            g[(i, j)] = d.integrate(&d.algebra.mul(base.class(i), base.class(j)));
        }
    }
    for i in 0..r {
        for j in 0..r {
            if g[(i, j)].is_zero() {
                continue;
            }
            let pi = base.ring.parity(i);
            let pj = base.ring.parity(j);
            if pi != pj {
                return Err(McError::Invalid(format!(
                    "metric pairs classes of different parity at ({i},{j})"
                )));
            }
            let expect = if pi == Parity::Odd && pj == Parity::Odd {
                -g[(i, j)].clone()
            } else {
                g[(i, j)].clone()
            };
            if g[(j, i)] != expect {
                return Err(McError::Invalid(format!(
                    "metric is not supersymmetric at ({i},{j})"
                )));
            }
        }
    }
    let rank = g.rank();
    if rank < r {
        return Err(McError::Degenerate { rank, dim: r });
    }
    Ok(g)
}

/// Potential Φ = ∫(Γ³/6 − ½ δB·ΔB), truncated to the base order with
/// all terms of degree ≤ 2 set to zero.
pub fn potential(d: &DGBVAlgebra, sol: &GammaSolution) -> Result<GradedSeries<Rat>, McError> {
    let ip = d.integral_parity()?;
    let alg = &d.algebra;
    let gamma = &sol.gamma;
    let cube = gamma.mul(gamma, alg).mul(gamma, alg);
    let t1 = cube.scale(&rat(1, 6));
    let db = sol.b_field.apply_odd(&d.differential);
    let lb = sol.b_field.apply_odd(&d.laplacian);
    let t2 = db.mul(&lb, alg).scale(&rat(1, 2));
    let phi = t1.sub(&t2).integrate(d, ip);
    Ok(phi.drop_through_degree(2))
}

/// Third partial Φ_{abc} = ∂_a ∂_b ∂_c Φ (the rightmost derivative acts
/// first), with all Koszul signs from the series machinery.
pub fn third_partial(phi: &GradedSeries<Rat>, a: usize, b: usize, c: usize) -> GradedSeries<Rat> {
    phi.partial(c).partial(b).partial(a)
}

/// Verify X³Φ = ∫(X̄Γ)³ for seeded random rational even directions,
/// comparing series through order N−3.
pub fn cubic_directional_check(
    d: &DGBVAlgebra,
    sol: &GammaSolution,
    phi: &GradedSeries<Rat>,
    count: usize,
    seed: u64,
) -> Result<CheckReport, McError> {
    let ip = d.integral_parity()?;
    let base = &sol.base;
    let even_vars: Vec<usize> = (0..base.rank())
        .filter(|&i| base.ring.parity(i) == Parity::Even)
        .collect();
    if even_vars.is_empty() {
        return Err(McError::Precondition(
            "no even coordinates to test directions in".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let compare = base.order.saturating_sub(3);
    let mut rep = CheckReport::new();
    for trial in 0..count {
        let mut dir = vec![Rat::zero(); base.rank()];
        loop {
            for &i in &even_vars {
                dir[i] = rat(rng.random_range(-4..=4), rng.random_range(1..=3));
            }
            if !vec_is_zero(&dir) {
                break;
            }
        }
        // Left side: three directional derivatives of Φ.
        let mut lhs = phi.clone();
        for _ in 0..3 {
            let mut next = GradedSeries::zero(base.ring.clone(), phi.trunc());
            for (i, vi) in dir.iter().enumerate() {
                if !vi.is_zero() {
                    next = next.add(&lhs.partial(i).scale(vi));
                }
            }
            lhs = next;
        }
        // Right side: ∫ (X̄Γ)³ computed independently.
        let h = KaSeries::constant(base.ring.clone(), base.rank(), sol.gamma.trunc(), &dir);
        let xg = dir_derivative(d, sol, &h);
        let rhs = xg.mul(&xg, &d.algebra).mul(&xg, &d.algebra).integrate(d, ip);
        let ok = lhs.with_trunc(compare) == rhs.with_trunc(compare);
        rep.checks += 1;
        if !ok {
            rep.violations
                .push(format!("X³Φ ≠ ∫(X̄Γ)³ for direction #{trial}"));
        }
    }
    Ok(rep)
}

/// Verify that the structure constants A_{ijk}(x) = g(X_i ∘ X_j, X_k)
/// agree with the third partials of Φ through order N−3.
pub fn potentiality_check(
    d: &DGBVAlgebra,
    sol: &GammaSolution,
    phi: &GradedSeries<Rat>,
    g: &QMatrix,
) -> Result<CheckReport, McError> {
    let base = &sol.base;
    let r = base.rank();
    let compare = base.order.saturating_sub(3);
    let mut rep = CheckReport::new();
    for i in 0..r {
        for j in 0..r {
            let cij = circ_basis(d, sol, i, j)?;
            for k in 0..r {
                // g(Z, X_k) = Σ_m m · (ζ_m)ᵀ g e_k.
                let mut paired = GradedSeries::zero(base.ring.clone(), cij.trunc());
                for (m, z) in cij.terms() {
                    let mut c = Rat::zero();
                    for (a, za) in z.iter().enumerate() {
                        c += za.clone() * g[(a, k)].clone();
                    }
                    paired.add_term(m.clone(), c);
                }
                let expect = third_partial(phi, i, j, k);
                let ok = paired.with_trunc(compare) == expect.with_trunc(compare);
                rep.checks += 1;
                if !ok {
                    rep.violations
                        .push(format!("A_{{{i}{j}{k}}}(x) ≠ ∂³Φ at ({i},{j},{k})"));
                }
            }
        }
    }
    Ok(rep)
}

/// All WDVV residual series of a potential with metric `g`:
/// R_{abcd} = Σ_e Φ_{abe} g^{ef} Φ_{fcd} − (−1)^{ã(b̃+c̃)} Σ_e Φ_{bce} g^{ef} Φ_{fad}
/// truncated to the given series order, indexed by (a,b,c,d) in
/// lexicographic order. Associativity means every residual vanishes.
pub fn wdvv_residual_series(
    phi: &GradedSeries<Rat>,
    g: &QMatrix,
    order: usize,
) -> Result<Vec<((usize, usize, usize, usize), GradedSeries<Rat>)>, McError> {
    let ring = phi.ring().clone();
    let r = ring.len();
    assert_eq!(g.rows(), r, "metric size mismatch");
    let g_inv = g.inverse().ok_or(McError::Degenerate {
        rank: g.rank(),
        dim: r,
    })?;
    // Third partials truncated to the comparison order.
    let mut thirds = vec![vec![vec![GradedSeries::zero(ring.clone(), order); r]; r]; r];
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                thirds[a][b][c] = third_partial(phi, a, b, c).with_trunc(order);
            }
        }
    }
    // T_{ab}^f = Σ_e Φ_{abe} g^{ef}.
    let mut t = vec![vec![vec![GradedSeries::zero(ring.clone(), order); r]; r]; r];
    for a in 0..r {
        for b in 0..r {
            for f in 0..r {
                let mut acc = GradedSeries::zero(ring.clone(), order);
                for e in 0..r {
                    let coef = g_inv[(e, f)].clone();
                    if !coef.is_zero() {
                        acc = acc.add(&thirds[a][b][e].scale(&coef));
                    }
                }
                t[a][b][f] = acc;
            }
        }
    }
    let mut out = Vec::with_capacity(r * r * r * r);
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                for dd in 0..r {
                    let mut lhs = GradedSeries::zero(ring.clone(), order);
                    let mut rhs = GradedSeries::zero(ring.clone(), order);
                    for f in 0..r {
                        lhs = lhs.add(&t[a][b][f].mul(&thirds[f][c][dd]));
                        rhs = rhs.add(&t[b][c][f].mul(&thirds[f][a][dd]));
                    }
                    let sign_neg = ring.parity(a) == Parity::Odd
                        && (ring.parity(b) == Parity::Odd) != (ring.parity(c) == Parity::Odd);
                    let resid = if sign_neg { lhs.add(&rhs) } else { lhs.sub(&rhs) };
                    out.push(((a, b, c, dd), resid));
                }
            }
        }
    }
    Ok(out)
}

/// Associativity (WDVV) residual check on a potential with metric `g`:
/// Σ_e Φ_{abe} g^{ef} Φ_{fcd} = (−1)^{ã(b̃+c̃)} Σ_e Φ_{bce} g^{ef} Φ_{fad}
/// coefficientwise through the given series order. Standalone: usable on
/// any externally supplied potential over the same coordinate ring.
pub fn wdvv_check(
    phi: &GradedSeries<Rat>,
    g: &QMatrix,
    order: usize,
) -> Result<CheckReport, McError> {
    let residuals = wdvv_residual_series(phi, g, order)?;
    let mut rep = CheckReport::new();
    for ((a, b, c, dd), resid) in residuals {
        rep.checks += 1;
        if !resid.is_zero() {
            rep.violations.push(format!(
                "associativity fails at ({a},{b},{c},{dd}): residual {}",
                resid.render()
            ));
        }
    }
    Ok(rep)
}

/// Euler-grading report: the conformal weight D, the charges d_i, and
/// the grading checks on g, Φ and the order-zero product structure.
#[derive(Debug, Clone)]
pub struct EulerReport {
    /// False when the instance carries no weights; all checks skipped.
    pub applicable: bool,
    pub d_charges: Vec<Rat>,
    pub conformal_weight: Option<Rat>,
    pub report: CheckReport,
}

/// Check the Euler structure of a weighted instance: d₀ = 1, the pairing
/// rule |x_i| + |x_j| = 2D on nonzero metric entries, the declared
/// integral weight 4 − 2D, every Φ-monomial an E-eigenvector with
/// eigenvalue D + 1, and the order-zero product grading
/// d_i + d_j − d_k = 1. Skipped (not failed) without weights.
pub fn euler_check(
    d: &DGBVAlgebra,
    base: &FormalBase,
    phi: &GradedSeries<Rat>,
    g: &QMatrix,
) -> EulerReport {
    let r = base.rank();
    let have_weights = (0..r).all(|i| base.ring.var(i).weight.is_some());
    if !have_weights {
        return EulerReport {
            applicable: false,
            d_charges: Vec::new(),
            conformal_weight: None,
            report: CheckReport::new(),
        };
    }
    let half = rat(1, 2);
    let d_charges: Vec<Rat> = (0..r)
        .map(|i| base.ring.var(i).weight.clone().unwrap() * half.clone())
        .collect();
    let mut rep = CheckReport::new();
    let push = |rep: &mut CheckReport, ok: bool, msg: String| {
        rep.checks += 1;
        if !ok {
            rep.violations.push(msg);
        }
    };

    push(&mut rep, d_charges[0] == Rat::one(), format!(
        "d0 = {} rather than 1",
        rat_to_string(&d_charges[0])
    ));

    // Conformal weight from the metric support: |x_i| + |x_j| = 2D.
    let mut big_d: Option<Rat> = None;
    for i in 0..r {
        for j in 0..r {
            if g[(i, j)].is_zero() {
                continue;
            }
            let s = (d_charges[i].clone() + d_charges[j].clone()) * rat(1, 1);
            match &big_d {
                None => big_d = Some(s),
                Some(x) => push(&mut rep, *x == s, format!(
                    "metric pairing at ({i},{j}) breaks the 2D rule"
                )),
            }
        }
    }
    let big_d = big_d.unwrap_or_else(Rat::zero);

    if let Some(declared) = &d.integral_weight {
        let expect = Rat::from_integer(4.into()) - rat(2, 1) * big_d.clone();
        push(&mut rep, *declared == expect, format!(
            "declared integral weight {} ≠ {}",
            rat_to_string(declared),
            rat_to_string(&expect)
        ));
    }

    // Φ-monomials are E-eigenvectors with eigenvalue D + 1.
    let eigen = big_d.clone() + Rat::one();
    for (e, _) in phi.terms() {
        let mut s = Rat::zero();
        for (i, &k) in e.0.iter().enumerate() {
            s += d_charges[i].clone() * Rat::from_integer((k as i64).into());
        }
        push(&mut rep, s == eigen, format!(
            "Φ-monomial {} has E-eigenvalue {} ≠ {}",
            expo_name(&base.ring, e),
            rat_to_string(&s),
            rat_to_string(&eigen)
        ));
    }

    // Order-zero structure constants obey d_i + d_j − d_k = 1.
    if let Some(g_inv) = g.inverse() {
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let mut a0 = Rat::zero();
                    for l in 0..r {
                        a0 += third_partial(phi, i, j, l).constant_term() * g_inv[(l, k)].clone();
                    }
                    if a0.is_zero() {
                        continue;
                    }
                    let s = d_charges[i].clone() + d_charges[j].clone() - d_charges[k].clone();
                    push(&mut rep, s == Rat::one(), format!(
                        "product grading fails at ({i},{j},{k})"
                    ));
                }
            }
        }
    }

    // The Euler field E = ½ Σ |x_i| x_i X_i has no constant term by
    // construction; recorded so the report covers the flat-part rule.
    push(&mut rep, true, String::new());

    EulerReport {
        applicable: true,
        d_charges,
        conformal_weight: Some(big_d),
        report: rep,
    }
}

/// Flatness identity: E(X,Y;Z) = X̄(ȲΓ·Z̄Γ) + X̄Γ·Ȳ(Z̄Γ) is
/// supersymmetric in X,Y modulo Im δ_Γ. Checked on coordinate triples
/// through the given order by one exact joint linear solve per triple.
pub fn flatness_check(
    d: &DGBVAlgebra,
    sol: &GammaSolution,
    order: usize,
) -> Result<CheckReport, McError> {
    let base = &sol.base;
    let ring = &base.ring;
    let r = base.rank();
    let dim = d.dim();
    let mons = monomials_up_to(ring, order);
    let mon_index: BTreeMap<Expo, usize> =
        mons.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let nrows = mons.len() * dim;
    let flatten = |u: &KaSeries| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); nrows];
        for (e, a) in u.terms() {
            if let Some(&mi) = mon_index.get(e) {
                for (j, c) in a.iter().enumerate() {
                    v[mi * dim + j] = c.clone();
                }
            }
        }
        v
    };
    // Columns of δ_Γ on the truncated monomial basis of K ⊗ A.
    let mut cols = Vec::with_capacity(nrows);
    for m in &mons {
        for j in 0..dim {
            let mut a = vec![Rat::zero(); dim];
            a[j] = Rat::one();
            let single = KaSeries::monomial(ring.clone(), dim, sol.gamma.trunc(), m.clone(), &a);
            cols.push(flatten(&deformed_differential(d, sol, &single)));
        }
    }
    let m_exact = QMatrix::from_cols(&cols, nrows);

    let lift = |a: usize| sol.gamma.partial(a);
    let mut rep = CheckReport::new();
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                let e_ab = lift(b)
                    .mul(&lift(c), &d.algebra)
                    .partial(a)
                    .add(&lift(a).mul(&sol.gamma.partial(c).partial(b), &d.algebra));
                let e_ba = lift(a)
                    .mul(&lift(c), &d.algebra)
                    .partial(b)
                    .add(&lift(b).mul(&sol.gamma.partial(c).partial(a), &d.algebra));
                let sign_neg = ring.parity(a) == Parity::Odd && ring.parity(b) == Parity::Odd;
                let diff = if sign_neg {
                    e_ab.add(&e_ba)
                } else {
                    e_ab.sub(&e_ba)
                };
                let ok = m_exact.solve(&flatten(&diff)).is_some();
                rep.checks += 1;
                if !ok {
                    rep.violations.push(format!(
                        "flatness asymmetry at ({a},{b};{c}) is not δ_Γ-exact"
                    ));
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::rat_int;

    fn ri(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat_int(x)).collect()
    }

    /// Mixed-parity test ring over the ε–ξ algebra: one even and one odd
    /// coordinate, enough to exercise every sign path.
    fn mixed_setup() -> (DGBVAlgebra, Arc<VarRing>) {
        let d = catalog::eps_xi_paired();
        let ring = Arc::new(VarRing::new(vec![
            GradedVariable {
                name: "s".into(),
                parity: Parity::Even,
                weight: None,
            },
            GradedVariable {
                name: "t".into(),
                parity: Parity::Odd,
                weight: None,
            },
        ]));
        (d, ring)
    }

    fn random_ka(
        ring: &Arc<VarRing>,
        dim: usize,
        trunc: usize,
        rng: &mut ChaCha8Rng,
    ) -> KaSeries {
        let mut s = KaSeries::zero(ring.clone(), dim, trunc);
        for _ in 0..5 {
            let e: Vec<u8> = (0..ring.len())
                .map(|i| {
                    if ring.parity(i) == Parity::Odd {
                        rng.random_range(0..=1)
                    } else {
                        rng.random_range(0..=2)
                    }
                })
                .collect();
            let a: Vec<Rat> = (0..dim).map(|_| rat_int(rng.random_range(-3..=3))).collect();
            s.add_term(Expo(e), &a);
        }
        s
    }

    /// Split into terms of homogeneous total parity (monomial + coefficient).
    fn total_parity_parts(alg: &SuperAlgebra, u: &KaSeries) -> Vec<(KaSeries, u8)> {
        let mut parts = Vec::new();
        for (e, a) in u.terms() {
            let (ae, ao) = alg.parity_split(a);
            let mu = if u.ring().monomial_parity(e) == Parity::Odd {
                1u8
            } else {
                0
            };
            for (vec, abit) in [(ae, 0u8), (ao, 1u8)] {
                if !vec.iter().all(Rat::is_zero) {
                    let s = KaSeries::monomial(
                        u.ring().clone(),
                        u.dim(),
                        u.trunc(),
                        e.clone(),
                        &vec,
                    );
                    parts.push((s, (mu + abit) % 2));
                }
            }
        }
        parts
    }

    #[test]
    fn ka_product_laws() {
        let (d, ring) = mixed_setup();
        let alg = &d.algebra;
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..25 {
            let u = random_ka(&ring, 4, 4, &mut rng);
            let v = random_ka(&ring, 4, 4, &mut rng);
            let w = random_ka(&ring, 4, 4, &mut rng);
            assert_eq!(
                u.mul(&v, alg).mul(&w, alg),
                u.mul(&v.mul(&w, alg), alg),
                "associativity"
            );
            assert_eq!(
                u.mul(&v.add(&w), alg),
                u.mul(&v, alg).add(&u.mul(&w, alg)),
                "distributivity"
            );
            // Supercommutativity on total-parity-homogeneous parts.
            for (up, pu) in total_parity_parts(alg, &u) {
                for (vp, pv) in total_parity_parts(alg, &v) {
                    let uv = up.mul(&vp, alg);
                    let vu = vp.mul(&up, alg);
                    if pu == 1 && pv == 1 {
                        assert!(uv.add(&vu).is_zero(), "odd-odd anticommute");
                    } else {
                        assert_eq!(uv, vu, "commute");
                    }
                }
            }
        }
        // Unit element.
        let one = KaSeries::constant(ring.clone(), 4, 4, &alg.unit_vec());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_ka(&ring, 4, 4, &mut rng);
        assert_eq!(one.mul(&u, alg), u);
        assert_eq!(u.mul(&one, alg), u);
    }

    #[test]
    fn ka_partial_is_a_signed_derivation() {
        let (d, ring) = mixed_setup();
        let alg = &d.algebra;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..25 {
            let u = random_ka(&ring, 4, 4, &mut rng);
            let v = random_ka(&ring, 4, 4, &mut rng);
            for i in 0..ring.len() {
                let lhs = u.mul(&v, alg).partial(i);
                let mut rhs = u.partial(i).mul(&v, alg);
                for (up, pu) in total_parity_parts(alg, &u) {
                    let t = up.mul(&v.partial(i), alg);
                    let neg = ring.parity(i) == Parity::Odd && pu == 1;
                    rhs = rhs.add(&if neg { t.neg() } else { t });
                }
                // ∂ commutes with truncation only below the top order.
                let cap = u.trunc() - 1;
                assert_eq!(
                    lhs.with_trunc(cap),
                    rhs.with_trunc(cap),
                    "Leibniz for ∂/∂{}",
                    ring.var(i).name
                );
            }
        }
    }

    #[test]
    fn ka_bracket_matches_definitional_expansion() {
        let (d, ring) = mixed_setup();
        let alg = &d.algebra;
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..30 {
            let u = random_ka(&ring, 4, 4, &mut rng);
            let v = random_ka(&ring, 4, 4, &mut rng);
            let fast = ka_bracket(&d, &u, &v);
            // (−1)^ũ Δ(uv) − (−1)^ũ (Δu)v − uΔv on homogeneous parts.
            let mut slow = KaSeries::zero(ring.clone(), 4, 4);
            for (up, pu) in total_parity_parts(alg, &u) {
                let t1 = up.mul(&v, alg).apply_odd(&d.laplacian);
                let t2 = up.apply_odd(&d.laplacian).mul(&v, alg);
                let t3 = up.mul(&v.apply_odd(&d.laplacian), alg);
                let signed = if pu == 1 {
                    t1.neg().add(&t2)
                } else {
                    t1.sub(&t2)
                };
                slow = slow.add(&signed).sub(&t3);
            }
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn formal_base_on_catalog_instances() {
        let d = catalog::p2_trivial();
        let base = FormalBase::standard(&d).unwrap();
        assert_eq!(base.rank(), 3);
        assert_eq!(base.class(0), &ri(&[1, 0, 0])[..]);
        for i in 0..3 {
            assert_eq!(base.ring().parity(i), Parity::Even);
        }
        let w: Vec<Rat> = (0..3)
            .map(|i| base.ring().var(i).weight.clone().unwrap())
            .collect();
        assert_eq!(w, ri(&[2, 0, -2]));

        let e = catalog::exterior_square();
        let base = FormalBase::standard(&e).unwrap();
        assert_eq!(base.rank(), 4);
        assert_eq!(base.class(0), &e.algebra.unit_vec()[..]);
        let parities: Vec<Parity> = (0..4).map(|i| base.ring().parity(i)).collect();
        assert_eq!(
            parities,
            vec![Parity::Even, Parity::Odd, Parity::Odd, Parity::Even]
        );
        let w: Vec<Rat> = (0..4)
            .map(|i| base.ring().var(i).weight.clone().unwrap())
            .collect();
        assert_eq!(w, ri(&[2, 1, 1, 0]));
    }

    #[test]
    fn formal_base_rejects_failing_conditions() {
        for d in [catalog::eps_xi_deltazero(), catalog::eps_xi_delta(), catalog::eps_xi_paired()] {
            match FormalBase::standard(&d) {
                Err(McError::Precondition(_)) => {}
                other => panic!("expected precondition failure, got {other:?}"),
            }
        }
        // A tensor with a failing factor also fails.
        let t = crate::dgbv::tensor(&catalog::p2_trivial(), &catalog::eps_xi_paired()).unwrap();
        assert!(matches!(
            FormalBase::standard(&t),
            Err(McError::Precondition(_))
        ));
    }

    #[test]
    fn solve_master_trivial_instances() {
        for d in [catalog::p2_trivial(), catalog::exterior_square()] {
            let base = FormalBase::standard(&d).unwrap();
            let sol = solve_master(&d, &base).unwrap();
            for part in &sol.per_degree[2..] {
                assert!(part.is_zero(), "trivial instance must have Γ = Γ₁");
            }
            assert!(sol.b_field.is_zero());
            let rep = sol.verify(&d);
            assert!(rep.pass(), "verify violations: {:?}", rep.violations);
            assert!(rep.checks >= 8);
        }
    }

    #[test]
    fn solve_master_on_tensor_instance() {
        let t = crate::dgbv::tensor(&catalog::p2_trivial(), &catalog::exterior_square()).unwrap();
        let base = FormalBase::new(&t, 4).unwrap();
        assert_eq!(base.rank(), 12);
        let sol = solve_master(&t, &base).unwrap();
        assert!(sol.b_field.is_zero());
        let rep = sol.verify(&t);
        assert!(rep.pass(), "verify violations: {:?}", rep.violations);
    }

    #[test]
    fn metric_values_and_failure_modes() {
        let d = catalog::p2_trivial();
        let base = FormalBase::standard(&d).unwrap();
        let g = metric(&d, &base).unwrap();
        let expect = QMatrix::from_rows(&[ri(&[0, 0, 1]), ri(&[0, 1, 0]), ri(&[1, 0, 0])]);
        assert_eq!(g, expect);

        let e = catalog::exterior_square();
        let base = FormalBase::standard(&e).unwrap();
        let g = metric(&e, &base).unwrap();
        let expect = QMatrix::from_rows(&[
            ri(&[0, 0, 0, 1]),
            ri(&[0, 0, 1, 0]),
            ri(&[0, -1, 0, 0]),
            ri(&[1, 0, 0, 0]),
        ]);
        assert_eq!(g, expect);

        // Zero integral ⇒ degenerate pairing, hard error.
        let mut broken = catalog::p2_trivial();
        broken.integral = vec![Rat::zero(); 3];
        let base = FormalBase::standard(&broken).unwrap();
        assert!(matches!(
            metric(&broken, &base),
            Err(McError::Degenerate { rank: 0, dim: 3 })
        ));
    }

    #[test]
    fn metric_on_tensor_matches_koszul_product_formula() {
        let a = catalog::p2_trivial();
        let b = catalog::exterior_square();
        let t = crate::dgbv::tensor(&a, &b).unwrap();
        let base_t = FormalBase::new(&t, 3).unwrap();
        let g_t = metric(&t, &base_t).unwrap();
        let base_a = FormalBase::standard(&a).unwrap();
        let base_b = FormalBase::standard(&b).unwrap();
        let g_a = metric(&a, &base_a).unwrap();
        let g_b = metric(&b, &base_b).unwrap();
        let db = b.dim();
        // The tensor catalog orders its basis (i,k) ↦ i·dim_b + k, and the
        // homology of a trivial tensor is the whole algebra in basis
        // order, so the index bookkeeping below is exact.
        for i in 0..a.dim() {
            for k in 0..db {
                for j in 0..a.dim() {
                    for l in 0..db {
                        // ∫_T (c_i⊗c_k)(c_j⊗c_l) =
                        //   (−1)^{k̃ j̃ + p̃(∫_b)(ĩ+j̃)} ∫_a c_i c_j · ∫_b c_k c_l.
                        let mut s = g_a[(i, j)].clone() * g_b[(k, l)].clone();
                        let kj = b.algebra.parity(k) == Parity::Odd
                            && a.algebra.parity(j) == Parity::Odd;
                        let ib = b.integral_parity().unwrap() == Parity::Odd
                            && (a.algebra.parity(i) == Parity::Odd)
                                != (a.algebra.parity(j) == Parity::Odd);
                        if kj != ib {
                            s = -s;
                        }
                        assert_eq!(g_t[(i * db + k, j * db + l)], s, "({i},{k})·({j},{l})");
                    }
                }
            }
        }
    }

    #[test]
    fn potential_on_p2_matches_closed_form() {
        let d = catalog::p2_trivial();
        let base = FormalBase::standard(&d).unwrap();
        let sol = solve_master(&d, &base).unwrap();
        let phi = potential(&d, &sol).unwrap();
        let mut expect = GradedSeries::zero(base.ring().clone(), base.order());
        expect.add_term(Expo(vec![2, 0, 1]), rat(1, 2));
        expect.add_term(Expo(vec![1, 2, 0]), rat(1, 2));
        assert_eq!(phi, expect, "Φ = x0²x2/2 + x0x1²/2");
    }

    #[test]
    fn potential_on_exterior_square_matches_closed_form() {
        let d = catalog::exterior_square();
        let base = FormalBase::standard(&d).unwrap();
        let sol = solve_master(&d, &base).unwrap();
        let phi = potential(&d, &sol).unwrap();
        let mut expect = GradedSeries::zero(base.ring().clone(), base.order());
        expect.add_term(Expo(vec![2, 0, 0, 1]), rat(1, 2));
        expect.add_term(Expo(vec![1, 1, 1, 0]), rat(-1, 1));
        assert_eq!(phi, expect, "Φ = x0²x3/2 − x0x1x2");
    }

    #[test]
    fn third_partials_at_zero_are_triple_integrals() {
        for d in [catalog::p2_trivial(), catalog::exterior_square()] {
            let base = FormalBase::standard(&d).unwrap();
            let sol = solve_master(&d, &base).unwrap();
            let phi = potential(&d, &sol).unwrap();
            let r = base.rank();
            for i in 0..r {
                for j in 0..r {
                    for k in 0..r {
                        let lhs = third_partial(&phi, i, j, k).constant_term();
                        let prod = d.algebra.mul(
                            &d.algebra.mul(base.class(i), base.class(j)),
                            base.class(k),
                        );
                        assert_eq!(lhs, d.integrate(&prod), "triple ({i},{j},{k})");
                    }
                }
            }
        }
    }

    #[test]
    fn cubic_directional_identity_holds() {
        for d in [catalog::p2_trivial(), catalog::exterior_square()] {
            let base = FormalBase::standard(&d).unwrap();
            let sol = solve_master(&d, &base).unwrap();
            let phi = potential(&d, &sol).unwrap();
            let rep = cubic_directional_check(&d, &sol, &phi, 20, 2024).unwrap();
            assert_eq!(rep.checks, 20);
            assert!(rep.pass(), "violations: {:?}", rep.violations);
        }
    }

    #[test]
    fn circ_unit_cup_and_supercommutativity() {
        let d = catalog::p2_trivial();
        let base = FormalBase::standard(&d).unwrap();
        let sol = solve_master(&d, &base).unwrap();
        // X₀ is the identity.
        for j in 0..3 {
            let z = circ_basis(&d, &sol, 0, j).unwrap();
            assert_eq!(z, base.basis_field(j).with_trunc(z.trunc()));
        }
        // h ∘ h = h² and h ∘ h² = 0 at x = 0 (cup product of the algebra).
        let z = circ_basis(&d, &sol, 1, 1).unwrap();
        assert_eq!(z, base.basis_field(2).with_trunc(z.trunc()));
        let z = circ_basis(&d, &sol, 1, 2).unwrap();
        assert!(z.is_zero());

        // Supercommutativity with signs on the exterior square.
        let e = catalog::exterior_square();
        let base = FormalBase::standard(&e).unwrap();
        let sol = solve_master(&e, &base).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let ij = circ_basis(&e, &sol, i, j).unwrap();
                let ji = circ_basis(&e, &sol, j, i).unwrap();
                let both_odd = base.ring().parity(i) == Parity::Odd
                    && base.ring().parity(j) == Parity::Odd;
                if both_odd {
                    assert!(ij.add(&ji).is_zero(), "anticommute ({i},{j})");
                } else {
                    assert_eq!(ij, ji, "commute ({i},{j})");
                }
            }
        }
        // θ ∘ η = θη.
        let z = circ_basis(&e, &sol, 1, 2).unwrap();
        assert_eq!(z, base.basis_field(3).with_trunc(z.trunc()));
    }

    #[test]
    fn wdvv_green_on_catalog_potentials_and_red_on_corruption() {
        for d in [catalog::p2_trivial(), catalog::exterior_square()] {
            let base = FormalBase::standard(&d).unwrap();
            let sol = solve_master(&d, &base).unwrap();
            let phi = potential(&d, &sol).unwrap();
            let g = metric(&d, &base).unwrap();
            let rep = wdvv_check(&phi, &g, base.order()).unwrap();
            assert!(rep.pass(), "violations: {:?}", rep.violations);
            assert_eq!(rep.checks, base.rank().pow(4));
        }
        // Fault injection: an extra x1²x2/2 term breaks associativity
        // ((X1∘X1)∘X2 picks up X2 while X1∘(X1∘X2) picks up X0 + X2).
        let d = catalog::p2_trivial();
        let base = FormalBase::standard(&d).unwrap();
        let sol = solve_master(&d, &base).unwrap();
        let mut phi = potential(&d, &sol).unwrap();
        phi.add_term(Expo(vec![0, 2, 1]), rat(1, 2));
        let g = metric(&d, &base).unwrap();
        let rep = wdvv_check(&phi, &g, base.order()).unwrap();
        assert!(!rep.pass(), "corrupted potential must fail");
    }

    #[test]
    fn structure_constants_match_third_partials() {
        for d in [catalog::p2_trivial(), catalog::exterior_square()] {
            let base = FormalBase::standard(&d).unwrap();
            let sol = solve_master(&d, &base).unwrap();
            let phi = potential(&d, &sol).unwrap();
            let g = metric(&d, &base).unwrap();
            let rep = potentiality_check(&d, &sol, &phi, &g).unwrap();
            assert!(rep.pass(), "violations: {:?}", rep.violations);
            assert_eq!(rep.checks, base.rank().pow(3));
        }
    }

    #[test]
    fn euler_grading_on_weighted_instances() {
        let d = catalog::p2_trivial();
        let base = FormalBase::standard(&d).unwrap();
        let sol = solve_master(&d, &base).unwrap();
        let phi = potential(&d, &sol).unwrap();
        let g = metric(&d, &base).unwrap();
        let er = euler_check(&d, &base, &phi, &g);
        assert!(er.applicable);
        assert_eq!(er.d_charges, ri(&[1, 0, -1]));
        assert_eq!(er.conformal_weight, Some(Rat::zero()));
        assert!(er.report.pass(), "violations: {:?}", er.report.violations);

        let e = catalog::exterior_square();
        let base = FormalBase::standard(&e).unwrap();
        let sol = solve_master(&e, &base).unwrap();
        let phi = potential(&e, &sol).unwrap();
        let g = metric(&e, &base).unwrap();
        let er = euler_check(&e, &base, &phi, &g);
        assert!(er.applicable);
        assert_eq!(er.d_charges, vec![rat_int(1), rat(1, 2), rat(1, 2), Rat::zero()]);
        assert_eq!(er.conformal_weight, Some(Rat::one()));
        assert!(er.report.pass(), "violations: {:?}", er.report.violations);
    }

    #[test]
    fn euler_skipped_without_weights() {
        // Rebuild the projective-plane algebra without weights.
        let d = catalog::p2_trivial();
        let alg = &d.algebra;
        let table: Vec<Vec<Vec<Rat>>> = (0..3)
            .map(|i| (0..3).map(|j| alg.basis_product(i, j).to_vec()).collect())
            .collect();
        let stripped = SuperAlgebra::new(
            alg.labels().to_vec(),
            (0..3).map(|i| alg.parity(i)).collect(),
            None,
            alg.unit_index(),
            table,
        )
        .unwrap();
        let d2 = DGBVAlgebra::new(
            stripped,
            OddOperator::zero(3),
            OddOperator::zero(3),
            d.integral.clone(),
            None,
        )
        .unwrap();
        let base = FormalBase::standard(&d2).unwrap();
        let sol = solve_master(&d2, &base).unwrap();
        let phi = potential(&d2, &sol).unwrap();
        let g = metric(&d2, &base).unwrap();
        let er = euler_check(&d2, &base, &phi, &g);
        assert!(!er.applicable);
        assert_eq!(er.report.checks, 0);
    }

    #[test]
    fn flatness_identity_supersymmetric_mod_exact() {
        for d in [catalog::p2_trivial(), catalog::exterior_square()] {
            let base = FormalBase::standard(&d).unwrap();
            let sol = solve_master(&d, &base).unwrap();
            let rep = flatness_check(&d, &sol, 3).unwrap();
            assert!(rep.pass(), "violations: {:?}", rep.violations);
            assert_eq!(rep.checks, base.rank().pow(3));
        }
    }
}
