//! Shipped dGBV instances.
//!
//! The algebra-spec files in the repository's `catalog/` directory are
//! the single source for these; this module embeds and parses them, and
//! offers the tensor squares used throughout the test suites.  Two
//! instances are everywhere-trivial (`p2-trivial`, `exterior-square`),
//! two are the documented negative instances for the δΔ-conditions,
//! and `eps-xi-paired` carries both operators at once.

use crate::algfile::algebra_from_text;
use crate::dgbv::{tensor, DGBVAlgebra};

pub const P2_TRIVIAL: &str = include_str!("../../../catalog/p2-trivial.alg");
pub const EXTERIOR_SQUARE: &str = include_str!("../../../catalog/exterior-square.alg");
pub const EPS_XI_DELTAZERO: &str = include_str!("../../../catalog/eps-xi-deltazero.alg");
pub const EPS_XI_DELTA: &str = include_str!("../../../catalog/eps-xi-delta.alg");
pub const EPS_XI_PAIRED: &str = include_str!("../../../catalog/eps-xi-paired.alg");

fn load(text: &str) -> DGBVAlgebra {
    algebra_from_text(text).expect("shipped catalog instance must parse")
}

/// ℚ[h]/(h³), both operators zero.
pub fn p2_trivial() -> DGBVAlgebra {
    load(P2_TRIVIAL)
}

/// Λ(θ)⊗Λ(η), both operators zero.
pub fn exterior_square() -> DGBVAlgebra {
    load(EXTERIOR_SQUARE)
}

/// Second-order Δ with δ = 0; fails condition (B).
pub fn eps_xi_deltazero() -> DGBVAlgebra {
    load(EPS_XI_DELTAZERO)
}

/// Derivation δ with Δ = 0; fails condition (A).
pub fn eps_xi_delta() -> DGBVAlgebra {
    load(EPS_XI_DELTA)
}

/// Both operators nonzero; fails (A) and (B).
pub fn eps_xi_paired() -> DGBVAlgebra {
    load(EPS_XI_PAIRED)
}

/// All shipped instances with their file-stem names.
pub fn all() -> Vec<(&'static str, DGBVAlgebra)> {
    vec![
        ("p2-trivial", p2_trivial()),
        ("exterior-square", exterior_square()),
        ("eps-xi-deltazero", eps_xi_deltazero()),
        ("eps-xi-delta", eps_xi_delta()),
        ("eps-xi-paired", eps_xi_paired()),
    ]
}

/// Look up a shipped instance by file-stem name.
pub fn by_name(name: &str) -> Option<DGBVAlgebra> {
    match name {
        "p2-trivial" => Some(p2_trivial()),
        "exterior-square" => Some(exterior_square()),
        "eps-xi-deltazero" => Some(eps_xi_deltazero()),
        "eps-xi-delta" => Some(eps_xi_delta()),
        "eps-xi-paired" => Some(eps_xi_paired()),
        _ => None,
    }
}

/// Tensor squares and mixed products of the shipped instances; these are
/// derived values, not files, so they stay in code.
pub fn tensor_products() -> Vec<(String, DGBVAlgebra)> {
    let base = all();
    let mut out = Vec::new();
    for (n1, d1) in &base {
        for (n2, d2) in &base {
            if let Ok(t) = tensor(d1, d2) {
                out.push((format!("{n1}⊗{n2}"), t));
            }
        }
    }
    out
}
