//! Tame semisimple germs in special coordinates.
//!
//! A germ is stored as the base-point triple (u, η, v): canonical
//! coordinate values, idempotent metric values, and the rotation
//! coefficients `v_{ij} = ½(u^j−u^i)η_{ij}/η_j` with zero diagonal. These
//! numbers determine the germ, so the tensor product and isomorphism
//! comparison act on them directly.

use thiserror::Error;

use crate::cmatrix::CMatrix;
use crate::scalar::{f64_to_string, C64};

/// Largest germ size accepted by the permutation search in
/// [`compare_germs`]; keeps worst-case backtracking desk-scale.
pub const MAX_COMPARE_SIZE: usize = 12;

#[derive(Debug, Error)]
pub enum GermError {
    #[error("germ data inconsistent: {0}")]
    Shape(String),
    #[error("η value at index {0} is zero")]
    ZeroEta(usize),
    #[error("canonical values collide: |u[{i}] − u[{j}]| = {dist:.3e}")]
    Collision { i: usize, j: usize, dist: f64 },
    #[error("germ size {0} exceeds comparison cap {MAX_COMPARE_SIZE}")]
    TooLarge(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Special-coordinate data of a tame semisimple pointed germ.
#[derive(Debug, Clone)]
pub struct SemisimpleGerm {
    u: Vec<C64>,
    eta: Vec<C64>,
    v: CMatrix,
}

impl SemisimpleGerm {
    /// Build from raw triples; validates shapes, nonzero η, and zero
    /// v-diagonal. Tameness (pairwise distinct u) is the caller's
    /// concern and can be checked with [`SemisimpleGerm::min_u_gap`].
    pub fn new(u: Vec<C64>, eta: Vec<C64>, v: CMatrix) -> Result<Self, GermError> {
        let mu = u.len();
        if eta.len() != mu || v.rows() != mu || v.cols() != mu {
            return Err(GermError::Shape(format!(
                "sizes u={} eta={} v={}x{}",
                mu,
                eta.len(),
                v.rows(),
                v.cols()
            )));
        }
        for (i, e) in eta.iter().enumerate() {
            if e.norm() == 0.0 {
                return Err(GermError::ZeroEta(i));
            }
        }
        for i in 0..mu {
            if v[(i, i)].norm() != 0.0 {
                return Err(GermError::Shape(format!("v[{i}][{i}] must be zero")));
            }
        }
        Ok(SemisimpleGerm { u, eta, v })
    }

    /// The tensor identity: a single point with `u = c`, `η = 1`.
    ///
    /// Tensoring with it shifts every canonical value by `c` and leaves
    /// η and v untouched. (The A₁ *chart* germ from critical data instead
    /// carries η = 1/2 and so rescales the metric.)
    pub fn identity_point(c: C64) -> Self {
        SemisimpleGerm {
            u: vec![c],
            eta: vec![C64::new(1.0, 0.0)],
            v: CMatrix::zeros(1, 1),
        }
    }

    pub fn size(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &[C64] {
        &self.u
    }

    pub fn eta(&self) -> &[C64] {
        &self.eta
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    /// Smallest pairwise distance among the u-values (∞ for size 1).
    pub fn min_u_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for i in 0..self.size() {
            for j in (i + 1)..self.size() {
                gap = gap.min((self.u[i] - self.u[j]).norm());
            }
        }
        gap
    }

    /// Max violation of `η_j v_{ij} + η_i v_{ji} = 0` over index pairs.
    pub fn reciprocity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.size() {
            for j in 0..self.size() {
                if i == j {
                    continue;
                }
                let r = self.eta[j] * self.v[(i, j)] + self.eta[i] * self.v[(j, i)];
                worst = worst.max(r.norm());
            }
        }
        worst
    }

    /// Relabel indices: entry `i` of the result is entry `perm[i]` of
    /// `self`.
    pub fn relabeled(&self, perm: &[usize]) -> SemisimpleGerm {
        let mu = self.size();
        assert_eq!(perm.len(), mu);
        let u = perm.iter().map(|&p| self.u[p]).collect();
        let eta = perm.iter().map(|&p| self.eta[p]).collect();
        let mut v = CMatrix::zeros(mu, mu);
        for i in 0..mu {
            for j in 0..mu {
                v[(i, j)] = self.v[(perm[i], perm[j])];
            }
        }
        SemisimpleGerm { u, eta, v }
    }
}

/// Tensor product of germs: indices are pairs `(i, j)` in row-major
/// order, `u_{ij} = u′_i + u″_j`, `η_{ij} = η′_i η″_j`, and
/// `v_{(ij)(kl)} = δ_{jl} v′_{ik} + δ_{ik} v″_{jl}`.
///
/// Errors when two summed u-values come within `tol·(1 + scale)` of each
/// other — the product point is then not tame and the special
/// coordinates stop being well-defined.
pub fn tensor(ga: &SemisimpleGerm, gb: &SemisimpleGerm, tol: f64) -> Result<SemisimpleGerm, GermError> {
    let (ma, mb) = (ga.size(), gb.size());
    let mu = ma * mb;
    let mut u = Vec::with_capacity(mu);
    let mut eta = Vec::with_capacity(mu);
    for i in 0..ma {
        for j in 0..mb {
            u.push(ga.u[i] + gb.u[j]);
            eta.push(ga.eta[i] * gb.eta[j]);
        }
    }
    let scale = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..mu {
        for j in (i + 1)..mu {
            let dist = (u[i] - u[j]).norm();
            if dist <= tol * (1.0 + scale) {
                return Err(GermError::Collision { i, j, dist });
            }
        }
    }
    let mut v = CMatrix::zeros(mu, mu);
    for i in 0..ma {
        for j in 0..mb {
            let row = i * mb + j;
            for k in 0..ma {
                for l in 0..mb {
                    let col = k * mb + l;
                    let mut val = C64::new(0.0, 0.0);
                    if j == l {
                        val += ga.v[(i, k)];
                    }
                    if i == k {
                        val += gb.v[(j, l)];
                    }
                    if row != col {
                        v[(row, col)] = val;
                    }
                }
            }
        }
    }
    SemisimpleGerm::new(u, eta, v)
}

///// The germ at a quantum-cohomology point of `P^{n−1}`:
/// `u^i = x₀ + n ζ^i e^{x₁/n}`, `η_i = (ζ^i/n) e^{−x₁(n−1)/n}`,
/// `v_{jk} = 1/(1 − ζ^{k−j})` with ζ = e^{2πi/n}.
pub fn germ_from_projective(n: usize, x0: C64, x1: C64) -> Result<SemisimpleGerm, GermError> {
    if n < 2 {
        return Err(GermError::Shape("projective germ needs n ≥ 2".into()));
    }
    let zpow: Vec<C64> = (0..n)
        .map(|i| C64::new(0.0, 2.0 * std::f64::consts::PI * i as f64 / n as f64).exp())
        .collect();
    let nf = C64::new(n as f64, 0.0);
    let radial = (x1 / nf).exp();
    let eta_scale = (-x1 * C64::new((n as f64 - 1.0) / n as f64, 0.0)).exp();
    let u: Vec<C64> = (0..n).map(|i| x0 + nf * zpow[i] * radial).collect();
    let eta: Vec<C64> = (0..n).map(|i| zpow[i] / nf * eta_scale).collect();
    let mut v = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let w = zpow[(k + n - j) % n];
            v[(j, k)] = C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - w);
        }
    }
    SemisimpleGerm::new(u, eta, v)
}

/// The germ at a special `A_n` chart `(0, …, 0, a_{n−1}, a_n)` with a
/// chosen branch `b` of `(−a_{n−1}/(n+1))^{1/n}` and primitive root ζ;
/// delegates to the closed forms in [`crate::saito`].
pub fn germ_from_an(
    n: usize,
    a_nm1: C64,
    a_n: C64,
    b: C64,
    zeta: C64,
) -> Result<SemisimpleGerm, crate::saito::SaitoError> {
    crate::saito::special_point_closed_form(n, a_nm1, a_n, b, zeta)
}

/// Result of a germ comparison.
#[derive(Debug, Clone)]
pub struct GermMatch {
    pub isomorphic: bool,
    /// Relabeling of `g2` matching `g1` (entry i of g1 ↔ entry perm[i]
    /// of g2), when found.
    pub permutation: Option<Vec<usize>>,
    /// Max entrywise deviation under the best labeling tried.
    pub max_dev: f64,
}

/// Search label permutations of `g2` for a match of (u, η, v) with `g1`
/// within absolute tolerance `tol`.
///
/// Candidates are pruned by u-proximity before backtracking, so the
/// search only branches where u-values genuinely tie.
pub fn compare_germs(
    g1: &SemisimpleGerm,
    g2: &SemisimpleGerm,
    tol: f64,
) -> Result<GermMatch, GermError> {
    let mu = g1.size();
    if g2.size() != mu {
        return Ok(GermMatch {
            isomorphic: false,
            permutation: None,
            max_dev: f64::INFINITY,
        });
    }
    if mu > MAX_COMPARE_SIZE {
        return Err(GermError::TooLarge(mu));
    }
    // For each g1 index, g2 indices whose u is within tol.
    let candidates: Vec<Vec<usize>> = (0..mu)
        .map(|i| {
            (0..mu)
                .filter(|&j| (g1.u[i] - g2.u[j]).norm() <= tol)
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        // No u-match at all: report the closest-u deviation for context.
        let mut best = f64::INFINITY;
        for i in 0..mu {
            for j in 0..mu {
                best = best.min((g1.u[i] - g2.u[j]).norm());
            }
        }
        return Ok(GermMatch {
            isomorphic: false,
            permutation: None,
            max_dev: best,
        });
    }

    let mut perm = vec![usize::MAX; mu];
    let mut used = vec![false; mu];
    let mut best_dev = f64::INFINITY;
    let mut best_perm = None;

    fn assign(
        pos: usize,
        g1: &SemisimpleGerm,
        g2: &SemisimpleGerm,
        candidates: &[Vec<usize>],
        tol: f64,
        perm: &mut [usize],
        used: &mut [bool],
        best_dev: &mut f64,
        best_perm: &mut Option<Vec<usize>>,
    ) {
        let mu = perm.len();
        if pos == mu {
            // Complete assignment: measure the full deviation.
            let mut dev = 0.0f64;
            for i in 0..mu {
                dev = dev.max((g1.u[i] - g2.u[perm[i]]).norm());
                dev = dev.max((g1.eta[i] - g2.eta[perm[i]]).norm());
            }
            for i in 0..mu {
                for j in 0..mu {
                    dev = dev.max((g1.v[(i, j)] - g2.v[(perm[i], perm[j])]).norm());
                }
            }
            if dev < *best_dev {
                *best_dev = dev;
                *best_perm = Some(perm.to_vec());
            }
            return;
        }
        for &j in &candidates[pos] {
            if used[j] {
                continue;
            }
            if (g1.eta[pos] - g2.eta[j]).norm() > tol {
                continue;
            }
            // v-rows against already-assigned indices must agree too.
            let mut ok = true;
            for prev in 0..pos {
                if (g1.v[(pos, prev)] - g2.v[(j, perm[prev])]).norm() > tol
                    || (g1.v[(prev, pos)] - g2.v[(perm[prev], j)]).norm() > tol
                {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            perm[pos] = j;
            used[j] = true;
            assign(pos + 1, g1, g2, candidates, tol, perm, used, best_dev, best_perm);
            used[j] = false;
            perm[pos] = usize::MAX;
        }
    }

    assign(
        0,
        g1,
        g2,
        &candidates,
        tol,
        &mut perm,
        &mut used,
        &mut best_dev,
        &mut best_perm,
    );

    match best_perm {
        Some(p) if best_dev <= tol => Ok(GermMatch {
            isomorphic: true,
            permutation: Some(p),
            max_dev: best_dev,
        }),
        Some(_) => Ok(GermMatch {
            isomorphic: false,
            permutation: None,
            max_dev: best_dev,
        }),
        None => Ok(GermMatch {
            isomorphic: false,
            permutation: None,
            max_dev: f64::INFINITY,
        }),
    }
}

/// Render a germ in the line-based text format (17 significant digits,
/// which round-trips every double exactly).
pub fn germ_to_text(g: &SemisimpleGerm) -> String {
    let mut out = String::new();
    out.push_str("germ 1\n");
    out.push_str(&format!("mu {}\n", g.size()));
    for (i, z) in g.u.iter().enumerate() {
        out.push_str(&format!(
            "u {} {} {}\n",
            i,
            f64_to_string(z.re),
            f64_to_string(z.im)
        ));
    }
    for (i, z) in g.eta.iter().enumerate() {
        out.push_str(&format!(
            "eta {} {} {}\n",
            i,
            f64_to_string(z.re),
            f64_to_string(z.im)
        ));
    }
    for i in 0..g.size() {
        for j in 0..g.size() {
            if i == j {
                continue;
            }
            let z = g.v[(i, j)];
            out.push_str(&format!(
                "v {} {} {} {}\n",
                i,
                j,
                f64_to_string(z.re),
                f64_to_string(z.im)
            ));
        }
    }
    out
}

/// Parse the text format produced by [`germ_to_text`].
pub fn germ_from_text(text: &str) -> Result<SemisimpleGerm, GermError> {
    let mut mu: Option<usize> = None;
    let mut u: Vec<Option<C64>> = Vec::new();
    let mut eta: Vec<Option<C64>> = Vec::new();
    let mut v: Option<CMatrix> = None;
    let mut saw_header = false;

    let parse_f = |s: &str, line: usize| -> Result<f64, GermError> {
        s.parse::<f64>().map_err(|e| GermError::Parse {
            line,
            msg: format!("bad float {s:?}: {e}"),
        })
    };
    let parse_idx = |s: &str, line: usize, mu: usize| -> Result<usize, GermError> {
        let i: usize = s.parse().map_err(|e| GermError::Parse {
            line,
            msg: format!("bad index {s:?}: {e}"),
        })?;
        if i >= mu {
            return Err(GermError::Parse {
                line,
                msg: format!("index {i} out of range for mu {mu}"),
            });
        }
        Ok(i)
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match fields[0] {
            "germ" => {
                if fields.len() != 2 || fields[1] != "1" {
                    return Err(GermError::Parse {
                        line,
                        msg: format!("unsupported germ format version: {trimmed:?}"),
                    });
                }
                saw_header = true;
            }
            "mu" => {
                let m: usize = fields
                    .get(1)
                    .ok_or(GermError::Parse {
                        line,
                        msg: "mu needs a value".into(),
                    })?
                    .parse()
                    .map_err(|e| GermError::Parse {
                        line,
                        msg: format!("bad mu: {e}"),
                    })?;
                if m == 0 {
                    return Err(GermError::Parse {
                        line,
                        msg: "mu must be positive".into(),
                    });
                }
                mu = Some(m);
                u = vec![None; m];
                eta = vec![None; m];
                v = Some(CMatrix::zeros(m, m));
            }
            "u" | "eta" => {
                let m = mu.ok_or(GermError::Parse {
                    line,
                    msg: "mu must come before entries".into(),
                })?;
                if fields.len() != 4 {
                    return Err(GermError::Parse {
                        line,
                        msg: format!("expected `{} i re im`", fields[0]),
                    });
                }
                let i = parse_idx(fields[1], line, m)?;
                let z = C64::new(parse_f(fields[2], line)?, parse_f(fields[3], line)?);
                let slot = if fields[0] == "u" { &mut u } else { &mut eta };
                if slot[i].is_some() {
                    return Err(GermError::Parse {
                        line,
                        msg: format!("duplicate {} entry {i}", fields[0]),
                    });
                }
                slot[i] = Some(z);
            }
            "v" => {
                let m = mu.ok_or(GermError::Parse {
                    line,
                    msg: "mu must come before entries".into(),
                })?;
                if fields.len() != 5 {
                    return Err(GermError::Parse {
                        line,
                        msg: "expected `v i j re im`".into(),
                    });
                }
                let i = parse_idx(fields[1], line, m)?;
                let j = parse_idx(fields[2], line, m)?;
                if i == j {
                    return Err(GermError::Parse {
                        line,
                        msg: "v diagonal entries are implicit zeros".into(),
                    });
                }
                let z = C64::new(parse_f(fields[3], line)?, parse_f(fields[4], line)?);
                v.as_mut().unwrap()[(i, j)] = z;
            }
            other => {
                return Err(GermError::Parse {
                    line,
                    msg: format!("unknown record {other:?}"),
                });
            }
        }
    }
    if !saw_header {
        return Err(GermError::Parse {
            line: 0,
            msg: "missing `germ 1` header".into(),
        });
    }
    if mu.is_none() {
        return Err(GermError::Parse {
            line: 0,
            msg: "missing mu".into(),
        });
    }
    let u: Vec<C64> = u
        .into_iter()
        .enumerate()
        .map(|(i, z)| {
            z.ok_or(GermError::Parse {
                line: 0,
                msg: format!("missing u entry {i}"),
            })
        })
        .collect::<Result<_, _>>()?;
    let eta: Vec<C64> = eta
        .into_iter()
        .enumerate()
        .map(|(i, z)| {
            z.ok_or(GermError::Parse {
                line: 0,
                msg: format!("missing eta entry {i}"),
            })
        })
        .collect::<Result<_, _>>()?;
    SemisimpleGerm::new(u, eta, v.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c_close;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// The A₂(−3, 0) germ written from its closed-form values.
    fn a2_small() -> SemisimpleGerm {
        let mut v = CMatrix::zeros(2, 2);
        v[(0, 1)] = c(1.0 / 6.0, 0.0);
        v[(1, 0)] = c(1.0 / 6.0, 0.0);
        SemisimpleGerm::new(
            vec![c(-2.0, 0.0), c(2.0, 0.0)],
            vec![c(1.0 / 6.0, 0.0), c(-1.0 / 6.0, 0.0)],
            v,
        )
        .unwrap()
    }

    /// The A₂(−12, 0) germ.
    fn a2_large() -> SemisimpleGerm {
        let mut v = CMatrix::zeros(2, 2);
        v[(0, 1)] = c(1.0 / 6.0, 0.0);
        v[(1, 0)] = c(1.0 / 6.0, 0.0);
        SemisimpleGerm::new(
            vec![c(-16.0, 0.0), c(16.0, 0.0)],
            vec![c(1.0 / 12.0, 0.0), c(-1.0 / 12.0, 0.0)],
            v,
        )
        .unwrap()
    }

    #[test]
    fn reciprocity_of_handbuilt_germs() {
        assert!(a2_small().reciprocity_residual() < 1e-15);
        assert!(a2_large().reciprocity_residual() < 1e-15);
    }

    #[test]
    fn tensor_of_a2_pair() {
        let g = tensor(&a2_small(), &a2_large(), 1e-9).unwrap();
        assert_eq!(g.size(), 4);
        // Row-major pairs: (0,0),(0,1),(1,0),(1,1).
        let expect_u = [c(-18.0, 0.0), c(14.0, 0.0), c(-14.0, 0.0), c(18.0, 0.0)];
        let expect_eta = [
            c(1.0 / 72.0, 0.0),
            c(-1.0 / 72.0, 0.0),
            c(-1.0 / 72.0, 0.0),
            c(1.0 / 72.0, 0.0),
        ];
        for i in 0..4 {
            assert!(c_close(g.u()[i], expect_u[i], 1e-12));
            assert!(c_close(g.eta()[i], expect_eta[i], 1e-12));
        }
        // Kronecker structure: (0,0)→(1,1) differs in both factors → 0.
        assert_eq!(g.v()[(0, 3)], c(0.0, 0.0));
        assert_eq!(g.v()[(1, 2)], c(0.0, 0.0));
        // (0,0)→(0,1): same first factor, second-factor v.
        assert!(c_close(g.v()[(0, 1)], c(1.0 / 6.0, 0.0), 1e-12));
        // (0,0)→(1,0): first-factor v.
        assert!(c_close(g.v()[(0, 2)], c(1.0 / 6.0, 0.0), 1e-12));
        assert!(g.reciprocity_residual() < 1e-14);
    }

    #[test]
    fn identity_point_is_tensor_identity() {
        let g = a2_small();
        let t = tensor(&g, &SemisimpleGerm::identity_point(c(0.25, 0.0)), 1e-9).unwrap();
        for i in 0..2 {
            assert!(c_close(t.u()[i], g.u()[i] + c(0.25, 0.0), 1e-12));
            assert!(c_close(t.eta()[i], g.eta()[i], 1e-12));
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!(c_close(t.v()[(i, j)], g.v()[(i, j)], 1e-12));
            }
        }
    }

    #[test]
    fn tensor_collision_detected() {
        // Equal u-values in both factors force colliding sums.
        let g = a2_small();
        assert!(matches!(
            tensor(&g, &g, 1e-9),
            Err(GermError::Collision { .. })
        ));
    }

    #[test]
    fn projective_p1_values() {
        let g = germ_from_projective(2, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(c_close(g.u()[0], c(2.0, 0.0), 1e-12));
        assert!(c_close(g.u()[1], c(-2.0, 0.0), 1e-12));
        assert!(c_close(g.eta()[0], c(0.5, 0.0), 1e-12));
        assert!(c_close(g.eta()[1], c(-0.5, 0.0), 1e-12));
        assert!(c_close(g.v()[(0, 1)], c(0.5, 0.0), 1e-12));
        assert!(g.reciprocity_residual() < 1e-14);
    }

    #[test]
    fn projective_x0_shift_only_moves_u() {
        let base = germ_from_projective(3, c(0.0, 0.0), c(0.3, -0.1)).unwrap();
        let moved = germ_from_projective(3, c(2.0, 1.0), c(0.3, -0.1)).unwrap();
        for i in 0..3 {
            assert!(c_close(moved.u()[i], base.u()[i] + c(2.0, 1.0), 1e-12));
            assert!(c_close(moved.eta()[i], base.eta()[i], 1e-12));
        }
        assert!(base.reciprocity_residual() < 1e-14);
    }

    #[test]
    fn compare_matches_shuffled_labels() {
        let g = tensor(&a2_small(), &a2_large(), 1e-9).unwrap();
        let shuffled = g.relabeled(&[2, 0, 3, 1]);
        let m = compare_germs(&g, &shuffled, 1e-9).unwrap();
        assert!(m.isomorphic);
        let p = m.permutation.unwrap();
        // entry i of g equals entry p[i] of shuffled.
        for i in 0..4 {
            assert!(c_close(g.u()[i], shuffled.u()[p[i]], 1e-12));
        }
    }

    #[test]
    fn compare_rejects_different_multisets() {
        let m = compare_germs(&a2_small(), &a2_large(), 1e-9).unwrap();
        assert!(!m.isomorphic);
        assert!(m.permutation.is_none());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let g = tensor(
            &germ_from_projective(3, c(0.125, -0.5), c(0.75, 0.25)).unwrap(),
            &SemisimpleGerm::identity_point(c(10.0, -3.0)),
            1e-9,
        )
        .unwrap();
        let text = germ_to_text(&g);
        let back = germ_from_text(&text).unwrap();
        assert_eq!(g.u(), back.u());
        assert_eq!(g.eta(), back.eta());
        for i in 0..g.size() {
            for j in 0..g.size() {
                assert_eq!(g.v()[(i, j)], back.v()[(i, j)]);
            }
        }
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(germ_from_text("mu 2\n").is_err());
        assert!(germ_from_text("germ 1\nmu 1\nu 0 0.0 0.0\n").is_err()); // missing eta
        assert!(germ_from_text("germ 2\nmu 1\n").is_err());
        assert!(
            germ_from_text("germ 1\nmu 1\nu 0 0 0\neta 0 1 0\nv 0 0 1 0\n").is_err()
        );
    }
}
