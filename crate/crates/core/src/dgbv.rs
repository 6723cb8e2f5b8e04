//! Gerstenhaber–Batalin–Vilkovisky structures on finite bases.
//!
//! A [`SuperAlgebra`] is a ℤ₂-graded commutative associative unital algebra
//! presented by rational structure constants.  An odd operator Δ with
//! Δ1 = 0 and Δ² = 0 is *second order* when every deformed product
//!
//! ```text
//! ∂_a b = (-1)^ã Δ(ab) - (-1)^ã (Δa)b - a(Δb)
//! ```
//!
//! is a derivation of parity ã+1; the pair (A, Δ) is then a GBV algebra
//! and [a∙b] := ∂_a b its odd bracket.  A dGBV algebra adds an odd
//! derivation δ with δ² = 0 and δΔ + Δδ = 0, plus a linear functional ∫
//! adjoint to both operators.  Everything runs over ℚ and every check is
//! exact: the report functions return itemised violations, not booleans,
//! so a failing instance documents itself.

use num::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::qmatrix::{span_basis, span_dim, span_eq, span_intersection, span_sum, vector_in_span, QMatrix};
use crate::scalar::{rat_int, Rat};
use crate::series::Parity;

#[derive(Debug, Error)]
pub enum DgbvError {
    #[error("malformed data: {0}")]
    Shape(String),
    #[error("algebra axioms violated: {}", .0.join("; "))]
    Axioms(Vec<String>),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Finite-dimensional supercommutative algebra with explicit basis.
///
/// `table[i][j]` holds the coefficients of `e_i · e_j` over the basis.
/// The constructor validates the whole axiom set and reports *all*
/// violations at once, so a hand-typed table fails loudly.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperAlgebra {
    dim: usize,
    labels: Vec<String>,
    parity: Vec<Parity>,
    weight: Option<Vec<Rat>>,
    unit: usize,
    table: Vec<Vec<Vec<Rat>>>,
}

impl SuperAlgebra {
    pub fn new(
        labels: Vec<String>,
        parity: Vec<Parity>,
        weight: Option<Vec<Rat>>,
        unit: usize,
        table: Vec<Vec<Vec<Rat>>>,
    ) -> Result<Self, DgbvError> {
        let dim = labels.len();
        if dim == 0 {
            return Err(DgbvError::Shape("empty basis".into()));
        }
        if parity.len() != dim {
            return Err(DgbvError::Shape("parity list length mismatch".into()));
        }
        if let Some(w) = &weight {
            if w.len() != dim {
                return Err(DgbvError::Shape("weight list length mismatch".into()));
            }
        }
        if unit >= dim {
            return Err(DgbvError::Shape("unit index out of range".into()));
        }
        if table.len() != dim
            || table.iter().any(|row| row.len() != dim)
            || table
                .iter()
                .any(|row| row.iter().any(|entry| entry.len() != dim))
        {
            return Err(DgbvError::Shape("structure table is not dim×dim×dim".into()));
        }
        let alg = SuperAlgebra {
            dim,
            labels,
            parity,
            weight,
            unit,
            table,
        };
        let mut bad = Vec::new();
        if alg.parity[unit] != Parity::Even {
            bad.push("unit must be even".into());
        }
        if let Some(w) = &alg.weight {
            if !w[unit].is_zero() {
                bad.push("unit must have weight 0".into());
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let p = alg.parity[i].plus(alg.parity[j]);
                for (k, c) in alg.table[i][j].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if alg.parity[k] != p {
                        bad.push(format!(
                            "parity additivity fails in {}·{} at {}",
                            alg.labels[i], alg.labels[j], alg.labels[k]
                        ));
                    }
                    if let Some(w) = &alg.weight {
                        if w[k] != w[i].clone() + w[j].clone() {
                            bad.push(format!(
                                "weight additivity fails in {}·{} at {}",
                                alg.labels[i], alg.labels[j], alg.labels[k]
                            ));
                        }
                    }
                }
            }
        }
        for j in 0..dim {
            if alg.table[unit][j] != alg.basis_vec(j) || alg.table[j][unit] != alg.basis_vec(j) {
                bad.push(format!("unit law fails at {}", alg.labels[j]));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let sign = alg.parity[i] == Parity::Odd && alg.parity[j] == Parity::Odd;
                let mut flipped = alg.table[j][i].clone();
                if sign {
                    for c in &mut flipped {
                        *c = -c.clone();
                    }
                }
                if alg.table[i][j] != flipped {
                    bad.push(format!(
                        "supercommutativity fails at {}·{}",
                        alg.labels[i], alg.labels[j]
                    ));
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let left = alg.mul(&alg.table[i][j], &alg.basis_vec(k));
                    let right = alg.mul(&alg.basis_vec(i), &alg.table[j][k]);
                    if left != right {
                        bad.push(format!(
                            "associativity fails at ({},{},{})",
                            alg.labels[i], alg.labels[j], alg.labels[k]
                        ));
                    }
                }
            }
        }
        if bad.is_empty() {
            Ok(alg)
        } else {
            Err(DgbvError::Axioms(bad))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parity[i]
    }

    pub fn weights(&self) -> Option<&[Rat]> {
        self.weight.as_deref()
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn unit_vec(&self) -> Vec<Rat> {
        self.basis_vec(self.unit)
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.dim];
        v[i] = Rat::one();
        v
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &[Rat] {
        &self.table[i][j]
    }

    pub fn mul(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let c = ai.clone() * bj.clone();
                for (k, t) in self.table[i][j].iter().enumerate() {
                    if !t.is_zero() {
                        out[k] += c.clone() * t.clone();
                    }
                }
            }
        }
        out
    }

    /// Parity of a homogeneous element; `None` when the support mixes
    /// parities.  Zero counts as even.
    pub fn homogeneous_parity(&self, v: &[Rat]) -> Option<Parity> {
        let mut p = None;
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match p {
                None => p = Some(self.parity[i]),
                Some(q) if q == self.parity[i] => {}
                _ => return None,
            }
        }
        Some(p.unwrap_or(Parity::Even))
    }

    /// Even/odd components of an element.
    pub fn parity_split(&self, v: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
        let mut even = vec![Rat::zero(); self.dim];
        let mut odd = vec![Rat::zero(); self.dim];
        for (i, c) in v.iter().enumerate() {
            match self.parity[i] {
                Parity::Even => even[i] = c.clone(),
                Parity::Odd => odd[i] = c.clone(),
            }
        }
        (even, odd)
    }

    /// Human-readable rendering of an element, for violation reports.
    pub fn describe(&self, v: &[Rat]) -> String {
        let mut parts = Vec::new();
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let lbl = &self.labels[i];
            if c.is_one() {
                parts.push(lbl.clone());
            } else if (-c.clone()).is_one() {
                parts.push(format!("-{lbl}"));
            } else {
                parts.push(format!("{c}·{lbl}"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Odd linear operator stored column-wise: column `j` is the image of
/// basis element `j`.  The optional weight shift is the amount the
/// operator adds to the grading (−1 for a BV Laplacian, +1 for a
/// differential).
#[derive(Debug, Clone, PartialEq)]
pub struct OddOperator {
    mat: QMatrix,
    weight_shift: Option<Rat>,
}

impl OddOperator {
    pub fn from_columns(cols: &[Vec<Rat>]) -> Result<Self, DgbvError> {
        let dim = cols.len();
        if cols.iter().any(|c| c.len() != dim) {
            return Err(DgbvError::Shape("operator columns must be square".into()));
        }
        Ok(OddOperator {
            mat: QMatrix::from_cols(cols, dim),
            weight_shift: None,
        })
    }

    pub fn zero(dim: usize) -> Self {
        OddOperator {
            mat: QMatrix::zeros(dim, dim),
            weight_shift: None,
        }
    }

    pub fn with_weight_shift(mut self, shift: Rat) -> Self {
        self.weight_shift = Some(shift);
        self
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.mat
    }

    pub fn weight_shift(&self) -> Option<&Rat> {
        self.weight_shift.as_ref()
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        self.mat.matvec(v)
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        self.mat.col(j)
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }
}

/// dGBV data: algebra, BV Laplacian Δ, differential δ, integral.
///
/// Construction validates shapes only; the semantic axioms live in
/// [`check_dgbv`], [`integral_check`] and friends so that deliberately
/// broken instances can still be built and reported on.
#[derive(Debug, Clone)]
pub struct DGBVAlgebra {
    pub algebra: SuperAlgebra,
    pub laplacian: OddOperator,
    pub differential: OddOperator,
    pub integral: Vec<Rat>,
    pub integral_weight: Option<Rat>,
}

impl DGBVAlgebra {
    pub fn new(
        algebra: SuperAlgebra,
        laplacian: OddOperator,
        differential: OddOperator,
        integral: Vec<Rat>,
        integral_weight: Option<Rat>,
    ) -> Result<Self, DgbvError> {
        let dim = algebra.dim();
        if laplacian.dim() != dim || differential.dim() != dim {
            return Err(DgbvError::Shape("operator dimension mismatch".into()));
        }
        if integral.len() != dim {
            return Err(DgbvError::Shape("integral length mismatch".into()));
        }
        Ok(DGBVAlgebra {
            algebra,
            laplacian,
            differential,
            integral,
            integral_weight,
        })
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn integrate(&self, v: &[Rat]) -> Rat {
        self.integral
            .iter()
            .zip(v)
            .map(|(c, x)| c.clone() * x.clone())
            .fold(Rat::zero(), |acc, t| acc + t)
    }

    /// Parity of the integral as a functional (parity of its support).
    pub fn integral_parity(&self) -> Result<Parity, DgbvError> {
        self.algebra
            .homogeneous_parity(&self.integral)
            .ok_or_else(|| DgbvError::Precondition("integral support mixes parities".into()))
    }
}

/// Itemised result of a verification pass.
#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub checks: usize,
    pub violations: Vec<String>,
}

impl CheckReport {
    pub fn new() -> Self {
        CheckReport::default()
    }

    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks += other.checks;
        self.violations.extend(other.violations);
    }

    fn record(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(msg());
        }
    }
}

fn vec_is_zero(v: &[Rat]) -> bool {
    v.iter().all(Rat::is_zero)
}

fn vec_add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

fn vec_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

fn vec_scale(a: &[Rat], c: &Rat) -> Vec<Rat> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

fn parity_sign(bit: u8) -> Rat {
    if bit % 2 == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// Deformed product ∂_a b = (-1)^ã Δ(ab) - (-1)^ã (Δa)b - a(Δb),
/// extended linearly over the parity components of `a`.
pub fn bracket(alg: &SuperAlgebra, lap: &OddOperator, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let (even, odd) = alg.parity_split(a);
    let mut out = vec![Rat::zero(); alg.dim()];
    for (part, sign) in [(even, Rat::one()), (odd, -Rat::one())] {
        if vec_is_zero(&part) {
            continue;
        }
        let ab = alg.mul(&part, b);
        let da = lap.apply(&part);
        let db = lap.apply(b);
        let t1 = vec_scale(&lap.apply(&ab), &sign);
        let t2 = vec_scale(&alg.mul(&da, b), &sign);
        let t3 = alg.mul(&part, &db);
        out = vec_add(&out, &vec_sub(&vec_sub(&t1, &t2), &t3));
    }
    out
}

/// Matrices of ∂_{e_i} for every basis element.
pub fn partial_matrices(alg: &SuperAlgebra, lap: &OddOperator) -> Vec<QMatrix> {
    (0..alg.dim())
        .map(|i| {
            let cols: Vec<Vec<Rat>> = (0..alg.dim())
                .map(|j| bracket(alg, lap, &alg.basis_vec(i), &alg.basis_vec(j)))
                .collect();
            QMatrix::from_cols(&cols, alg.dim())
        })
        .collect()
}

/// ∂_x for an arbitrary element, as Σ x_i ∂_{e_i}.
fn partial_of(partials: &[QMatrix], x: &[Rat], dim: usize) -> QMatrix {
    let mut out = QMatrix::zeros(dim, dim);
    for (i, c) in x.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for r in 0..dim {
            for s in 0..dim {
                let t = c.clone() * partials[i][(r, s)].clone();
                out[(r, s)] += t;
            }
        }
    }
    out
}

fn operator_shape_checks(
    alg: &SuperAlgebra,
    op: &OddOperator,
    name: &str,
    rep: &mut CheckReport,
) {
    for j in 0..alg.dim() {
        let img = op.col(j);
        rep.record(
            alg.homogeneous_parity(&img)
                .map(|p| vec_is_zero(&img) || p == alg.parity(j).plus(Parity::Odd))
                .unwrap_or(false),
            || format!("{name} is not parity-odd on {}", alg.label(j)),
        );
        if let (Some(w), Some(shift)) = (alg.weights(), op.weight_shift()) {
            let want = w[j].clone() + shift.clone();
            let ok = img
                .iter()
                .enumerate()
                .all(|(i, c)| c.is_zero() || w[i] == want);
            rep.record(ok, || {
                format!("{name} does not shift weight by {shift} on {}", alg.label(j))
            });
        }
    }
    rep.record(vec_is_zero(&op.apply(&alg.unit_vec())), || {
        format!("{name} does not annihilate the unit")
    });
    rep.record(op.matrix().matmul(op.matrix()).is_zero(), || {
        format!("{name} does not square to zero")
    });
}

/// Verify that (A, Δ) is a GBV algebra: Δ odd, Δ1 = 0, Δ² = 0, and every
/// ∂_a a derivation of parity ã+1.
pub fn check_gbv(alg: &SuperAlgebra, lap: &OddOperator) -> CheckReport {
    let mut rep = CheckReport::new();
    if lap.dim() != alg.dim() {
        rep.record(false, || "Laplacian dimension mismatch".into());
        return rep;
    }
    operator_shape_checks(alg, lap, "Δ", &mut rep);
    let partials = partial_matrices(alg, lap);
    let n = alg.dim();
    for i in 0..n {
        let sign_bit = alg.parity(i).bit() + 1;
        for j in 0..n {
            let sign = parity_sign(sign_bit * alg.parity(j).bit());
            for k in 0..n {
                let lhs = partials[i].matvec(alg.basis_product(j, k));
                let left = alg.mul(&partials[i].col(j), &alg.basis_vec(k));
                let right = vec_scale(&alg.mul(&alg.basis_vec(j), &partials[i].col(k)), &sign);
                rep.record(lhs == vec_add(&left, &right), || {
                    format!(
                        "∂_{} fails the derivation rule on {}·{}",
                        alg.label(i),
                        alg.label(j),
                        alg.label(k)
                    )
                });
            }
        }
    }
    rep
}

/// Verify the full dGBV axioms: GBV for Δ, plus δ an odd derivation with
/// δ² = 0 anticommuting with Δ.
pub fn check_dgbv(d: &DGBVAlgebra) -> CheckReport {
    let alg = &d.algebra;
    let mut rep = check_gbv(alg, &d.laplacian);
    operator_shape_checks(alg, &d.differential, "δ", &mut rep);
    let n = alg.dim();
    for j in 0..n {
        let sign = parity_sign(alg.parity(j).bit());
        for k in 0..n {
            let lhs = d.differential.apply(alg.basis_product(j, k));
            let left = alg.mul(&d.differential.col(j), &alg.basis_vec(k));
            let right = vec_scale(&alg.mul(&alg.basis_vec(j), &d.differential.col(k)), &sign);
            rep.record(lhs == vec_add(&left, &right), || {
                format!(
                    "δ fails the derivation rule on {}·{}",
                    alg.label(j),
                    alg.label(k)
                )
            });
        }
    }
    let anti = d
        .laplacian
        .matrix()
        .matmul(d.differential.matrix())
        .add(&d.differential.matrix().matmul(d.laplacian.matrix()));
    rep.record(anti.is_zero(), || "δΔ + Δδ ≠ 0".into());
    rep
}

fn random_homogeneous(
    alg: &SuperAlgebra,
    rng: &mut ChaCha8Rng,
    parity: Parity,
) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); alg.dim()];
    let mut any = false;
    for i in 0..alg.dim() {
        if alg.parity(i) != parity {
            continue;
        }
        let c: i64 = rng.random_range(-3..=3);
        if c != 0 {
            any = true;
        }
        v[i] = rat_int(c);
    }
    if !any {
        if let Some(i) = (0..alg.dim()).find(|&i| alg.parity(i) == parity) {
            v[i] = Rat::one();
        }
    }
    v
}

/// Exhaustive-plus-sampled verification of the bracket calculus: operator
/// commutation relations, bracket antisymmetry, the Jacobi identity, the
/// odd Leibniz rule for the bracket, and compatibility of δ with the
/// bracket.  Basis tuples are checked exhaustively up to a size cap, then
/// `samples` random homogeneous triples are drawn from `seed`.
pub fn identity_suite(d: &DGBVAlgebra, samples: usize, seed: u64) -> CheckReport {
    let alg = &d.algebra;
    let n = alg.dim();
    let mut rep = CheckReport::new();
    let partials = partial_matrices(alg, &d.laplacian);
    let lapm = d.laplacian.matrix();
    let difm = d.differential.matrix();

    // [Δ, ∂_a] = ∂_{Δa} and [δ, ∂_a] = ∂_{δa} on basis elements.
    for i in 0..n {
        let sgn = parity_sign(alg.parity(i).bit() + 1);
        for (op, opname) in [(lapm, "Δ"), (difm, "δ")] {
            let lhs = op
                .matmul(&partials[i])
                .sub(&scale_mat(&partials[i].matmul(op), &sgn));
            let rhs = partial_of(&partials, &op.col(i), n);
            rep.record(lhs == rhs, || {
                format!("[{opname}, ∂_{}] ≠ ∂_{{{opname}{}}}", alg.label(i), alg.label(i))
            });
        }
    }

    // [∂_a, ∂_b] = ∂_{[a∙b]} on basis pairs.
    for i in 0..n {
        for j in 0..n {
            let sgn = parity_sign((alg.parity(i).bit() + 1) * (alg.parity(j).bit() + 1));
            let lhs = partials[i]
                .matmul(&partials[j])
                .sub(&scale_mat(&partials[j].matmul(&partials[i]), &sgn));
            let rhs = partial_of(&partials, &partials[i].col(j), n);
            rep.record(lhs == rhs, || {
                format!("[∂_{}, ∂_{}] is not ∂ of the bracket", alg.label(i), alg.label(j))
            });
        }
    }

    // Antisymmetry and δ-Leibniz on basis pairs.
    for i in 0..n {
        for j in 0..n {
            let sgn = parity_sign((alg.parity(i).bit() + 1) * (alg.parity(j).bit() + 1));
            let anti = vec_add(&partials[i].col(j), &vec_scale(&partials[j].col(i), &sgn));
            rep.record(vec_is_zero(&anti), || {
                format!("bracket antisymmetry fails at ({}, {})", alg.label(i), alg.label(j))
            });
            let lhs = d.differential.apply(&partials[i].col(j));
            let t1 = partial_of(&partials, &d.differential.col(i), n).matvec(&alg.basis_vec(j));
            let t2 = vec_scale(
                &partials[i].matvec(&d.differential.col(j)),
                &parity_sign(alg.parity(i).bit() + 1),
            );
            rep.record(lhs == vec_add(&t1, &t2), || {
                format!("δ is not a bracket derivation at ({}, {})", alg.label(i), alg.label(j))
            });
        }
    }

    // Jacobi and the bracket Leibniz rule on basis triples (capped).
    let cap = 4096usize;
    let mut triple_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let triples: Vec<(usize, usize, usize)> = if n * n * n <= cap {
        (0..n)
            .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
            .collect()
    } else {
        (0..cap)
            .map(|_| {
                (
                    triple_rng.random_range(0..n),
                    triple_rng.random_range(0..n),
                    triple_rng.random_range(0..n),
                )
            })
            .collect()
    };
    for &(i, j, k) in &triples {
        let sgn = parity_sign((alg.parity(i).bit() + 1) * (alg.parity(j).bit() + 1));
        let jac_l = partials[i].matvec(&partials[j].col(k));
        let x = partials[i].col(j);
        let jac_r1 = partial_of(&partials, &x, n).matvec(&alg.basis_vec(k));
        let jac_r2 = vec_scale(&partials[j].matvec(&partials[i].col(k)), &sgn);
        rep.record(jac_l == vec_add(&jac_r1, &jac_r2), || {
            format!(
                "Jacobi fails at ({}, {}, {})",
                alg.label(i),
                alg.label(j),
                alg.label(k)
            )
        });
        let leib_sgn = parity_sign((alg.parity(i).bit() + 1) * alg.parity(j).bit());
        let lhs = partials[i].matvec(alg.basis_product(j, k));
        let r1 = alg.mul(&partials[i].col(j), &alg.basis_vec(k));
        let r2 = vec_scale(&alg.mul(&alg.basis_vec(j), &partials[i].col(k)), &leib_sgn);
        rep.record(lhs == vec_add(&r1, &r2), || {
            format!(
                "bracket Leibniz rule fails at ({}, {}, {})",
                alg.label(i),
                alg.label(j),
                alg.label(k)
            )
        });
    }

    // Random homogeneous triples exercise the linear extensions.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..samples {
        let pa = if rng.random_bool(0.5) { Parity::Even } else { Parity::Odd };
        let pb = if rng.random_bool(0.5) { Parity::Even } else { Parity::Odd };
        let pc = if rng.random_bool(0.5) { Parity::Even } else { Parity::Odd };
        let a = random_homogeneous(alg, &mut rng, pa);
        let b = random_homogeneous(alg, &mut rng, pb);
        let c = random_homogeneous(alg, &mut rng, pc);
        let pa = alg.homogeneous_parity(&a).unwrap();
        let pb = alg.homogeneous_parity(&b).unwrap();
        let br = |x: &[Rat], y: &[Rat]| bracket(alg, &d.laplacian, x, y);

        let sgn = parity_sign((pa.bit() + 1) * (pb.bit() + 1));
        rep.record(
            vec_is_zero(&vec_add(&br(&a, &b), &vec_scale(&br(&b, &a), &sgn))),
            || format!("bracket antisymmetry fails on sample {s}"),
        );
        let jac_l = br(&a, &br(&b, &c));
        let jac_r = vec_add(&br(&br(&a, &b), &c), &vec_scale(&br(&b, &br(&a, &c)), &sgn));
        rep.record(jac_l == jac_r, || format!("Jacobi fails on sample {s}"));
        let leib_sgn = parity_sign((pa.bit() + 1) * pb.bit());
        let lhs = br(&a, &alg.mul(&b, &c));
        let rhs = vec_add(
            &alg.mul(&br(&a, &b), &c),
            &vec_scale(&alg.mul(&b, &br(&a, &c)), &leib_sgn),
        );
        rep.record(lhs == rhs, || format!("bracket Leibniz rule fails on sample {s}"));
        let dl = d.differential.apply(&br(&a, &b));
        let dr = vec_add(
            &br(&d.differential.apply(&a), &b),
            &vec_scale(&br(&a, &d.differential.apply(&b)), &parity_sign(pa.bit() + 1)),
        );
        rep.record(dl == dr, || format!("δ bracket derivation fails on sample {s}"));
    }
    rep
}

fn scale_mat(m: &QMatrix, c: &Rat) -> QMatrix {
    let mut out = m.clone();
    for i in 0..out.rows() {
        for j in 0..out.cols() {
            let t = out[(i, j)].clone() * c.clone();
            out[(i, j)] = t;
        }
    }
    out
}

/// The differential δ + ∂_a twisted by an even element, with its
/// Maurer–Cartan diagnostics.
#[derive(Debug, Clone)]
pub struct ShiftedDifferential {
    pub op: QMatrix,
    /// δa + ½[a∙a]; zero exactly when the shift satisfies the master
    /// equation.
    pub residual: Vec<Rat>,
    pub flat: bool,
    pub nilpotent: bool,
    /// (δ + ∂_a)² = ∂ of the residual — a consequence of the axioms that
    /// is recomputed here as a consistency witness.
    pub square_is_partial_of_residual: bool,
    pub anticommutes_with_laplacian: bool,
    pub laplacian_of_shift_vanishes: bool,
}

/// Build δ_a = δ + ∂_a for an even homogeneous shift `a`.
pub fn shifted_differential(d: &DGBVAlgebra, a: &[Rat]) -> Result<ShiftedDifferential, DgbvError> {
    let alg = &d.algebra;
    if a.len() != alg.dim() {
        return Err(DgbvError::Shape("shift element has wrong length".into()));
    }
    if alg.homogeneous_parity(a) != Some(Parity::Even) {
        return Err(DgbvError::Precondition(
            "shift element must be even and parity-homogeneous".into(),
        ));
    }
    let partials = partial_matrices(alg, &d.laplacian);
    let pa = partial_of(&partials, a, alg.dim());
    let op = d.differential.matrix().add(&pa);
    let half = Rat::new(1.into(), 2.into());
    let residual = vec_add(
        &d.differential.apply(a),
        &vec_scale(&bracket(alg, &d.laplacian, a, a), &half),
    );
    let square = op.matmul(&op);
    let nilpotent = square.is_zero();
    let flat = vec_is_zero(&residual);
    let square_is_partial_of_residual = square == partial_of(&partials, &residual, alg.dim());
    let lap = d.laplacian.matrix();
    let anti = lap.matmul(&op).add(&op.matmul(lap));
    Ok(ShiftedDifferential {
        op,
        flat,
        nilpotent,
        square_is_partial_of_residual,
        anticommutes_with_laplacian: anti.is_zero(),
        laplacian_of_shift_vanishes: vec_is_zero(&d.laplacian.apply(a)),
        residual,
    })
}

/// Subspace lattice report for the δΔ-conditions.
///
/// The three conditions compare Im δΔ against
///   (A)  Im δ ∩ Ker Δ,
///   (B)  Im Δ ∩ Ker δ,
///   (C)  (Ker δ ∩ Ker Δ) ∩ (Im δ + Im Δ);
/// each right-hand side always contains Im δΔ, so a condition holds
/// exactly when the spans coincide.  All bases are canonical reduced
/// echelon bases, so they can be compared across runs.
#[derive(Debug, Clone)]
pub struct ConditionsReport {
    pub im_dd: Vec<Vec<Rat>>,
    pub side_a: Vec<Vec<Rat>>,
    pub side_b: Vec<Vec<Rat>>,
    pub side_c: Vec<Vec<Rat>>,
    pub condition_a: bool,
    pub condition_b: bool,
    pub condition_c: bool,
    /// Dimensions of (Ker δ ∩ Ker Δ)/Im δΔ, H(Ker Δ, δ), H(Ker δ, Δ).
    pub homology_dims: (usize, usize, usize),
    /// Representatives of (Ker δ ∩ Ker Δ)/Im δΔ; the unit comes first
    /// whenever it represents a nonzero class.
    pub representatives: Vec<Vec<Rat>>,
}

/// Compute the δΔ-condition report.  Requires δ² = Δ² = 0 and
/// δΔ + Δδ = 0; those guarantee all the containments used here.
pub fn conditions_check(d: &DGBVAlgebra) -> Result<ConditionsReport, DgbvError> {
    let n = d.dim();
    let lap = d.laplacian.matrix();
    let dif = d.differential.matrix();
    if !lap.matmul(lap).is_zero() || !dif.matmul(dif).is_zero() {
        return Err(DgbvError::Precondition("operators must square to zero".into()));
    }
    if !lap.matmul(dif).add(&dif.matmul(lap)).is_zero() {
        return Err(DgbvError::Precondition("operators must anticommute".into()));
    }
    let cols = |m: &QMatrix| -> Vec<Vec<Rat>> { (0..n).map(|j| m.col(j)).collect() };
    let dd = dif.matmul(lap);
    let im_dd = span_basis(&cols(&dd), n);
    let im_d = span_basis(&cols(dif), n);
    let im_l = span_basis(&cols(lap), n);
    let ker_l = lap.kernel();
    let ker_d = dif.kernel();
    let side_a = span_intersection(&im_d, &ker_l, n);
    let side_b = span_intersection(&im_l, &ker_d, n);
    let joint = span_intersection(&ker_d, &ker_l, n);
    let side_c = span_intersection(&joint, &span_sum(&im_d, &im_l, n), n);
    let condition_a = span_eq(&im_dd, &side_a, n);
    let condition_b = span_eq(&im_dd, &side_b, n);
    let condition_c = span_eq(&im_dd, &side_c, n);

    let dif_of_ker_l: Vec<Vec<Rat>> = ker_l.iter().map(|v| dif.matvec(v)).collect();
    let lap_of_ker_d: Vec<Vec<Rat>> = ker_d.iter().map(|v| lap.matvec(v)).collect();
    let joint_dim = joint.len();
    let homology_dims = (
        joint_dim - im_dd.len(),
        joint_dim - span_dim(&dif_of_ker_l, n),
        joint_dim - span_dim(&lap_of_ker_d, n),
    );

    let mut acc = im_dd.clone();
    let mut representatives = Vec::new();
    let unit = d.algebra.unit_vec();
    if vector_in_span(&unit, &joint, n) && !vector_in_span(&unit, &acc, n) {
        acc.push(unit.clone());
        representatives.push(unit);
    }
    for v in &joint {
        if !vector_in_span(v, &acc, n) {
            acc.push(v.clone());
            representatives.push(v.clone());
        }
    }
    Ok(ConditionsReport {
        im_dd,
        side_a,
        side_b,
        side_c,
        condition_a,
        condition_b,
        condition_c,
        homology_dims,
        representatives,
    })
}

/// Verify the integral: nonzero, parity-homogeneous support, adjointness
/// signs for δ and Δ, vanishing of ∫[a∙b] when either argument is
/// Δ-closed, and weight homogeneity of the support.
pub fn integral_check(d: &DGBVAlgebra) -> CheckReport {
    let alg = &d.algebra;
    let n = alg.dim();
    let mut rep = CheckReport::new();
    rep.record(!vec_is_zero(&d.integral), || "integral is zero".into());
    rep.record(alg.homogeneous_parity(&d.integral).is_some(), || {
        "integral support mixes parities".into()
    });
    if let Some(w) = alg.weights() {
        let mut support_w: Option<Rat> = None;
        let mut homogeneous = true;
        for (i, c) in d.integral.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match &support_w {
                None => support_w = Some(w[i].clone()),
                Some(sw) if *sw == w[i] => {}
                _ => homogeneous = false,
            }
        }
        rep.record(homogeneous, || "integral support mixes weights".into());
        if let (Some(sw), Some(declared)) = (&support_w, &d.integral_weight) {
            rep.record(sw == declared, || {
                format!("integral weight {declared} does not match support weight {sw}")
            });
        }
    }
    for i in 0..n {
        let sa = parity_sign(alg.parity(i).bit());
        for j in 0..n {
            let ei = alg.basis_vec(i);
            let ej = alg.basis_vec(j);
            let lhs = d.integrate(&alg.mul(&d.differential.col(i), &ej));
            let rhs = -sa.clone() * d.integrate(&alg.mul(&ei, &d.differential.col(j)));
            rep.record(lhs == rhs, || {
                format!(
                    "δ adjointness fails at ({}, {})",
                    alg.label(i),
                    alg.label(j)
                )
            });
            let lhs = d.integrate(&alg.mul(&d.laplacian.col(i), &ej));
            let rhs = sa.clone() * d.integrate(&alg.mul(&ei, &d.laplacian.col(j)));
            rep.record(lhs == rhs, || {
                format!(
                    "Δ adjointness fails at ({}, {})",
                    alg.label(i),
                    alg.label(j)
                )
            });
        }
    }
    for i in 0..n {
        for j in 0..n {
            let closed_i = vec_is_zero(&d.laplacian.col(i));
            let closed_j = vec_is_zero(&d.laplacian.col(j));
            if closed_i || closed_j {
                let br = bracket(alg, &d.laplacian, &alg.basis_vec(i), &alg.basis_vec(j));
                rep.record(d.integrate(&br).is_zero(), || {
                    format!(
                        "∫[{}∙{}] ≠ 0 with a Δ-closed argument",
                        alg.label(i),
                        alg.label(j)
                    )
                });
            }
        }
    }
    rep
}

/// Tensor product of dGBV algebras with Koszul signs throughout:
/// products pick up (-1)^{ã₂ b̃₁}, the operators act as Δ₁⊗1 + 1⊗Δ₂
/// (the second summand with the sign of the first factor), and the
/// integral of a decomposable is (-1)^{p̃(∫₂)·ã₁} ∫a₁·∫a₂.
pub fn tensor(d1: &DGBVAlgebra, d2: &DGBVAlgebra) -> Result<DGBVAlgebra, DgbvError> {
    let a1 = &d1.algebra;
    let a2 = &d2.algebra;
    let n1 = a1.dim();
    let n2 = a2.dim();
    let dim = n1 * n2;
    let idx = |i: usize, j: usize| i * n2 + j;
    let mut labels = Vec::with_capacity(dim);
    let mut parity = Vec::with_capacity(dim);
    let weights = match (a1.weights(), a2.weights()) {
        (Some(w1), Some(w2)) => {
            let mut w = Vec::with_capacity(dim);
            for i in 0..n1 {
                for j in 0..n2 {
                    w.push(w1[i].clone() + w2[j].clone());
                }
            }
            Some(w)
        }
        _ => None,
    };
    for i in 0..n1 {
        for j in 0..n2 {
            labels.push(format!("{}⊗{}", a1.label(i), a2.label(j)));
            parity.push(a1.parity(i).plus(a2.parity(j)));
        }
    }
    let mut table = vec![vec![vec![Rat::zero(); dim]; dim]; dim];
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..n1 {
                for l in 0..n2 {
                    let sign = parity_sign(a2.parity(j).bit() * a1.parity(k).bit());
                    let p1 = a1.basis_product(i, k);
                    let p2 = a2.basis_product(j, l);
                    let row = idx(i, j);
                    let col = idx(k, l);
                    for (p, c1) in p1.iter().enumerate() {
                        if c1.is_zero() {
                            continue;
                        }
                        for (q, c2) in p2.iter().enumerate() {
                            if c2.is_zero() {
                                continue;
                            }
                            table[row][col][idx(p, q)] =
                                sign.clone() * c1.clone() * c2.clone();
                        }
                    }
                }
            }
        }
    }
    let algebra = SuperAlgebra::new(
        labels,
        parity,
        weights,
        idx(a1.unit_index(), a2.unit_index()),
        table,
    )?;
    let build_op = |op1: &OddOperator, op2: &OddOperator| -> Result<OddOperator, DgbvError> {
        let mut cols = vec![vec![Rat::zero(); dim]; dim];
        for i in 0..n1 {
            for j in 0..n2 {
                let col = &mut cols[idx(i, j)];
                for (p, c) in op1.col(i).iter().enumerate() {
                    if !c.is_zero() {
                        col[idx(p, j)] += c.clone();
                    }
                }
                let sign = parity_sign(a1.parity(i).bit());
                for (q, c) in op2.col(j).iter().enumerate() {
                    if !c.is_zero() {
                        col[idx(i, q)] += sign.clone() * c.clone();
                    }
                }
            }
        }
        let mut op = OddOperator::from_columns(&cols)?;
        if let (Some(s1), Some(s2)) = (op1.weight_shift(), op2.weight_shift()) {
            if s1 == s2 {
                op = op.with_weight_shift(s1.clone());
            }
        }
        Ok(op)
    };
    let laplacian = build_op(&d1.laplacian, &d2.laplacian)?;
    let differential = build_op(&d1.differential, &d2.differential)?;
    let p2 = d2.integral_parity()?;
    let mut integral = vec![Rat::zero(); dim];
    for i in 0..n1 {
        for j in 0..n2 {
            let sign = parity_sign(p2.bit() * a1.parity(i).bit());
            integral[idx(i, j)] = sign * d1.integral[i].clone() * d2.integral[j].clone();
        }
    }
    let integral_weight = match (&d1.integral_weight, &d2.integral_weight) {
        (Some(w1), Some(w2)) => Some(w1.clone() + w2.clone()),
        _ => None,
    };
    DGBVAlgebra::new(algebra, laplacian, differential, integral, integral_weight)
}

/// Bracket of decomposables predicted from the factor brackets:
/// [a₁⊗a₂ ∙ b₁⊗b₂] =
///   (-1)^{ã₂(b̃₁+1)} [a₁∙b₁]⊗a₂b₂ + (-1)^{b̃₁(ã₂+1)} a₁b₁⊗[a₂∙b₂].
/// Used to cross-check the tensor Laplacian against the factors.
pub fn tensor_bracket_formula(
    d1: &DGBVAlgebra,
    d2: &DGBVAlgebra,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Vec<Rat> {
    let a1 = &d1.algebra;
    let a2 = &d2.algebra;
    let n2 = a2.dim();
    let dim = a1.dim() * n2;
    let idx = |p: usize, q: usize| p * n2 + q;
    let br1 = bracket(a1, &d1.laplacian, &a1.basis_vec(i), &a1.basis_vec(k));
    let br2 = bracket(a2, &d2.laplacian, &a2.basis_vec(j), &a2.basis_vec(l));
    let m1 = a1.basis_product(i, k);
    let m2 = a2.basis_product(j, l);
    let s1 = parity_sign(a2.parity(j).bit() * (a1.parity(k).bit() + 1));
    let s2 = parity_sign(a1.parity(k).bit() * (a2.parity(j).bit() + 1));
    let mut out = vec![Rat::zero(); dim];
    for (p, c1) in br1.iter().enumerate() {
        if c1.is_zero() {
            continue;
        }
        for (q, c2) in m2.iter().enumerate() {
            if !c2.is_zero() {
                out[idx(p, q)] += s1.clone() * c1.clone() * c2.clone();
            }
        }
    }
    for (p, c1) in m1.iter().enumerate() {
        if c1.is_zero() {
            continue;
        }
        for (q, c2) in br2.iter().enumerate() {
            if !c2.is_zero() {
                out[idx(p, q)] += s2.clone() * c1.clone() * c2.clone();
            }
        }
    }
    out
}
