//! Computational toolkit for three constructions of Frobenius manifolds:
//! the Saito theory of `A_n` singularities and their direct sums, dGBV
//! algebras with the master-equation construction, and quantum-cohomology
//! type potentials recovered from WDVV.
//!
//! The crate splits into small layers:
//!
//! - foundations: [`scalar`], [`series`] (ℤ₂-graded truncated power
//!   series), [`poly`] (complex root finding), [`laurent`] (expansions at
//!   `z = ∞`), [`cmatrix`] / [`qmatrix`] (dense linear algebra over `C64`
//!   and exact rationals);
//! - Saito side: [`saito`] (critical data, η-chain, flat coordinates,
//!   direct sums), [`germ`] (semisimple germs and their tensor product),
//!   [`spectrum`] (exact d-spectra and Betti numbers);
//! - dGBV side: [`dgbv`] (graded algebras, axiom checkers, tensor),
//!   [`algfile`] (the algebra-spec text format), [`catalog`] (bundled
//!   instances), [`mc`] (master equation, ∘-product, potential),
//!   [`wdvv`] (associativity checks), [`qc`] (qc-type potentials and the
//!   `P²` generator).

pub mod algfile;
pub mod catalog;
pub mod cmatrix;
pub mod dgbv;
pub mod germ;
pub mod laurent;
pub mod mc;
pub mod poly;
pub mod qc;
pub mod qmatrix;
pub mod saito;
pub mod scalar;
pub mod series;
pub mod spectrum;
