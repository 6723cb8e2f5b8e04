//! Exact linear algebra over the rationals.
//!
//! The homological side of the toolkit (operator identities, the
//! conditions on Im/Ker lattices, master-equation solves) needs answers
//! that are exact and reproducible, so everything here runs on
//! [`Rat`] with fixed first-nonzero pivoting. Subspaces are handled as
//! spanning lists of vectors; the canonical reduced-row-echelon basis
//! makes equality testing a plain comparison.

use num::{One, Zero};
use std::ops::{Index, IndexMut};

use crate::scalar::Rat;

/// Dense rational matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<Rat>], dim: usize) -> Self {
        let mut m = QMatrix::zeros(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn matvec(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self[(i, j)].clone() * x[j].clone())
                    .fold(Rat::zero(), |acc, t| acc + t)
            })
            .collect()
    }

    pub fn matmul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a.clone() * other[(k, j)].clone();
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b.clone();
        }
        out
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn neg(&self) -> QMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = -a.clone();
        }
        out
    }

    /// Exact inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols, "inverse needs a square matrix");
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(r, &c)| c != r) {
            return None;
        }
        let mut inv = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    /// Pivot choice is the first nonzero entry in column order, so the
    /// result is canonical for the row space.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(r * self.cols + j, p * self.cols + j);
                }
            }
            let inv = {
                let v = self[(r, c)].clone();
                Rat::one() / v
            };
            for j in 0..self.cols {
                let t = self[(r, j)].clone() * inv.clone();
                self[(r, j)] = t;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in 0..self.cols {
                    let t = self[(r, j)].clone() * f.clone();
                    self[(i, j)] -= t;
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// One solution of `self · x = b`, or `None` if inconsistent. Free
    /// variables are set to zero, so the answer is deterministic and of
    /// small support.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &c in &pivots {
                s[c] = true;
            }
            s
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -m[(r, free)].clone();
            }
            basis.push(v);
        }
        basis
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Canonical basis of the span of `vectors` (nonzero RREF rows).
/// Identical subspaces yield identical bases, whatever the spanning
/// sets looked like.
pub fn span_basis(vectors: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    assert!(vectors.iter().all(|v| v.len() == dim));
    let mut m = QMatrix::from_rows(vectors);
    let pivots = m.rref();
    (0..pivots.len()).map(|r| m.row(r)).collect()
}

pub fn span_dim(vectors: &[Vec<Rat>], dim: usize) -> usize {
    span_basis(vectors, dim).len()
}

pub fn span_eq(a: &[Vec<Rat>], b: &[Vec<Rat>], dim: usize) -> bool {
    span_basis(a, dim) == span_basis(b, dim)
}

pub fn vector_in_span(v: &[Rat], span: &[Vec<Rat>], dim: usize) -> bool {
    let mut with = span.to_vec();
    with.push(v.to_vec());
    span_dim(&with, dim) == span_dim(span, dim)
}

/// Canonical basis of `span(a) + span(b)`.
pub fn span_sum(a: &[Vec<Rat>], b: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    let mut all = a.to_vec();
    all.extend_from_slice(b);
    span_basis(&all, dim)
}

/// Canonical basis of `span(a) ∩ span(b)`: solve `A x = B y` through
/// the kernel of the block matrix `[A | −B]`.
pub fn span_intersection(a: &[Vec<Rat>], b: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let ka = a.len();
    let mut block = QMatrix::zeros(dim, ka + b.len());
    for (j, v) in a.iter().enumerate() {
        for i in 0..dim {
            block[(i, j)] = v[i].clone();
        }
    }
    for (j, v) in b.iter().enumerate() {
        for i in 0..dim {
            block[(i, ka + j)] = -v[i].clone();
        }
    }
    let amat = QMatrix::from_cols(a, dim);
    let vectors: Vec<Vec<Rat>> = block
        .kernel()
        .into_iter()
        .map(|k| amat.matvec(&k[..ka]))
        .collect();
    span_basis(&vectors, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn rref_known_rank_two() {
        let mut m = QMatrix::from_rows(&[v(&[1, 2, 3]), v(&[2, 4, 6]), v(&[1, 0, 1])]);
        let pivots = m.rref();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(m.row(0), v(&[1, 0, 1]));
        assert_eq!(m.row(1), v(&[0, 1, 1]));
        assert_eq!(m.row(2), v(&[0, 0, 0]));
    }

    #[test]
    fn solve_unique_and_underdetermined() {
        let m = QMatrix::from_rows(&[v(&[2, 1]), v(&[1, 3])]);
        let x = m.solve(&v(&[5, 10])).unwrap();
        assert_eq!(x, vec![rat_int(1), rat_int(3)]);

        // One equation, two unknowns: free variable pinned to zero.
        let m = QMatrix::from_rows(&[v(&[2, 4])]);
        let x = m.solve(&v(&[6])).unwrap();
        assert_eq!(x, vec![rat_int(3), rat_int(0)]);

        let m = QMatrix::from_rows(&[v(&[1, 1]), v(&[1, 1])]);
        assert!(m.solve(&v(&[1, 2])).is_none());
    }

    #[test]
    fn solve_verified_on_seeded_systems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = rng.random_range(2..5usize);
            let rows: Vec<Vec<Rat>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| rat(rng.random_range(-6..7), rng.random_range(1..4)))
                        .collect()
                })
                .collect();
            let m = QMatrix::from_rows(&rows);
            let b: Vec<Rat> = (0..n).map(|_| rat_int(rng.random_range(-5..6))).collect();
            if let Some(x) = m.solve(&b) {
                assert_eq!(m.matvec(&x), b);
            } else {
                assert!(m.rank() < n);
            }
        }
    }

    #[test]
    fn inverse_roundtrip_and_singular() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut inverted = 0;
        for _ in 0..12 {
            let n = rng.random_range(2..5usize);
            let rows: Vec<Vec<Rat>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| rat(rng.random_range(-5..6), rng.random_range(1..4)))
                        .collect()
                })
                .collect();
            let m = QMatrix::from_rows(&rows);
            match m.inverse() {
                Some(inv) => {
                    assert_eq!(m.matmul(&inv), QMatrix::identity(n));
                    assert_eq!(inv.matmul(&m), QMatrix::identity(n));
                    inverted += 1;
                }
                None => assert!(m.rank() < n),
            }
        }
        assert!(inverted > 0);
        let singular = QMatrix::from_rows(&[v(&[1, 2]), v(&[2, 4])]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn kernel_annihilates() {
        let m = QMatrix::from_rows(&[v(&[1, 2, 3]), v(&[2, 4, 6])]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for vec in &k {
            assert!(m.matvec(vec).iter().all(Rat::is_zero));
        }
        assert!(QMatrix::identity(3).kernel().is_empty());
    }

    #[test]
    fn span_operations() {
        // Two planes in Q³ meeting in a line.
        let p1 = vec![v(&[1, 0, 0]), v(&[0, 1, 0])];
        let p2 = vec![v(&[0, 1, 0]), v(&[0, 0, 1])];
        let meet = span_intersection(&p1, &p2, 3);
        assert_eq!(meet, vec![v(&[0, 1, 0])]);
        let sum = span_sum(&p1, &p2, 3);
        assert_eq!(sum.len(), 3);

        // Same plane, different spanning sets.
        let q1 = vec![v(&[1, 1, 0]), v(&[1, -1, 0])];
        assert!(span_eq(&p1, &q1, 3));
        assert!(!span_eq(&p1, &p2, 3));

        assert!(vector_in_span(&v(&[3, -2, 0]), &p1, 3));
        assert!(!vector_in_span(&v(&[0, 0, 1]), &p1, 3));
    }

    #[test]
    fn intersection_inside_both_factors() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..8 {
            let dim = 4;
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<Rat>> {
                (0..rng.random_range(1..4usize))
                    .map(|_| (0..dim).map(|_| rat_int(rng.random_range(-3..4))).collect())
                    .collect()
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            for w in span_intersection(&a, &b, dim) {
                assert!(vector_in_span(&w, &a, dim));
                assert!(vector_in_span(&w, &b, dim));
            }
            // Modular law sanity: dim(a∩b) = dim a + dim b − dim(a+b).
            assert_eq!(
                span_intersection(&a, &b, dim).len(),
                span_dim(&a, dim) + span_dim(&b, dim) - span_sum(&a, &b, dim).len()
            );
        }
    }
}
