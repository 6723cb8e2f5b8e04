//! Text format for dGBV algebra instances.
//!
//! A file carries one instance: basis header (dimension, labels,
//! parities, optional weights, unit index), sparse structure constants,
//! sparse Δ and δ matrices, and the integral vector.  Lines starting
//! with `#` are comments; rationals use the exact `p/q` form.  Rendering
//! is canonical (sorted indices, reduced rationals), so parse∘render is
//! the identity on values and render∘parse is the identity on canonical
//! text.
//!
//! ```text
//! algebra 1
//! dim 4
//! label 0 1
//! parity 0 even
//! weight 0 0
//! unit 0
//! mul 1 2 3 1          # e1·e2 = e3
//! laplacian 0 2 1      # Δe2 ⊇ 1·e0
//! laplacian_shift -1
//! differential 1 2 1   # δe2 ⊇ 1·e1
//! differential_shift 1
//! integral 3 1
//! integral_weight 2
//! ```

use thiserror::Error;

use crate::dgbv::{DGBVAlgebra, DgbvError, OddOperator, SuperAlgebra};
use crate::scalar::{rat_from_string, rat_to_string, Rat};
use crate::series::Parity;
use num::Zero;

#[derive(Debug, Error)]
pub enum AlgFileError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("inconsistent algebra data: {0}")]
    Invalid(#[from] DgbvError),
}

fn perr(line: usize, msg: impl Into<String>) -> AlgFileError {
    AlgFileError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parse a dGBV instance from algebra-spec text.
pub fn algebra_from_text(text: &str) -> Result<DGBVAlgebra, AlgFileError> {
    let mut dim: Option<usize> = None;
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut parity: Vec<Option<Parity>> = Vec::new();
    let mut weight: Vec<Option<Rat>> = Vec::new();
    let mut unit: Option<usize> = None;
    let mut table: Vec<Vec<Vec<Rat>>> = Vec::new();
    let mut lap_cols: Vec<Vec<Rat>> = Vec::new();
    let mut dif_cols: Vec<Vec<Rat>> = Vec::new();
    let mut lap_shift: Option<Rat> = None;
    let mut dif_shift: Option<Rat> = None;
    let mut integral: Vec<Rat> = Vec::new();
    let mut integral_weight: Option<Rat> = None;
    let mut seen_header = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let keyword = fields[0];
        if !seen_header {
            if keyword != "algebra" || fields.len() != 2 || fields[1] != "1" {
                return Err(perr(line, "file must start with `algebra 1`"));
            }
            seen_header = true;
            continue;
        }
        let want_dim = |n: Option<usize>| n.ok_or_else(|| perr(line, "`dim` must come first"));
        let index = |s: &str, n: usize| -> Result<usize, AlgFileError> {
            let i: usize = s
                .parse()
                .map_err(|_| perr(line, format!("bad index `{s}`")))?;
            if i >= n {
                return Err(perr(line, format!("index {i} out of range (dim {n})")));
            }
            Ok(i)
        };
        let rational = |s: &str| -> Result<Rat, AlgFileError> {
            rat_from_string(s).ok_or_else(|| perr(line, format!("bad rational `{s}`")))
        };
        match keyword {
            "algebra" => return Err(perr(line, "duplicate header")),
            "dim" => {
                if dim.is_some() {
                    return Err(perr(line, "duplicate `dim`"));
                }
                if fields.len() != 2 {
                    return Err(perr(line, "usage: dim N"));
                }
                let n: usize = fields[1]
                    .parse()
                    .map_err(|_| perr(line, "bad dimension"))?;
                if n == 0 {
                    return Err(perr(line, "dimension must be positive"));
                }
                dim = Some(n);
                labels = vec![None; n];
                parity = vec![None; n];
                weight = vec![None; n];
                table = vec![vec![vec![Rat::zero(); n]; n]; n];
                lap_cols = vec![vec![Rat::zero(); n]; n];
                dif_cols = vec![vec![Rat::zero(); n]; n];
                integral = vec![Rat::zero(); n];
            }
            "label" => {
                let n = want_dim(dim)?;
                if fields.len() != 3 {
                    return Err(perr(line, "usage: label i NAME"));
                }
                let i = index(fields[1], n)?;
                if labels[i].is_some() {
                    return Err(perr(line, format!("duplicate label for {i}")));
                }
                labels[i] = Some(fields[2].to_string());
            }
            "parity" => {
                let n = want_dim(dim)?;
                if fields.len() != 3 {
                    return Err(perr(line, "usage: parity i even|odd"));
                }
                let i = index(fields[1], n)?;
                let p = match fields[2] {
                    "even" => Parity::Even,
                    "odd" => Parity::Odd,
                    other => return Err(perr(line, format!("bad parity `{other}`"))),
                };
                if parity[i].is_some() {
                    return Err(perr(line, format!("duplicate parity for {i}")));
                }
                parity[i] = Some(p);
            }
            "weight" => {
                let n = want_dim(dim)?;
                if fields.len() != 3 {
                    return Err(perr(line, "usage: weight i p/q"));
                }
                let i = index(fields[1], n)?;
                if weight[i].is_some() {
                    return Err(perr(line, format!("duplicate weight for {i}")));
                }
                weight[i] = Some(rational(fields[2])?);
            }
            "unit" => {
                let n = want_dim(dim)?;
                if fields.len() != 2 {
                    return Err(perr(line, "usage: unit i"));
                }
                if unit.is_some() {
                    return Err(perr(line, "duplicate `unit`"));
                }
                unit = Some(index(fields[1], n)?);
            }
            "mul" => {
                let n = want_dim(dim)?;
                if fields.len() != 5 {
                    return Err(perr(line, "usage: mul i j k p/q"));
                }
                let i = index(fields[1], n)?;
                let j = index(fields[2], n)?;
                let k = index(fields[3], n)?;
                table[i][j][k] = rational(fields[4])?;
            }
            "laplacian" | "differential" => {
                let n = want_dim(dim)?;
                if fields.len() != 4 {
                    return Err(perr(line, format!("usage: {keyword} row col p/q")));
                }
                let r = index(fields[1], n)?;
                let c = index(fields[2], n)?;
                let v = rational(fields[3])?;
                if keyword == "laplacian" {
                    lap_cols[c][r] = v;
                } else {
                    dif_cols[c][r] = v;
                }
            }
            "laplacian_shift" | "differential_shift" => {
                if fields.len() != 2 {
                    return Err(perr(line, format!("usage: {keyword} p/q")));
                }
                let v = rational(fields[1])?;
                if keyword == "laplacian_shift" {
                    lap_shift = Some(v);
                } else {
                    dif_shift = Some(v);
                }
            }
            "integral" => {
                let n = want_dim(dim)?;
                if fields.len() != 3 {
                    return Err(perr(line, "usage: integral i p/q"));
                }
                let i = index(fields[1], n)?;
                integral[i] = rational(fields[2])?;
            }
            "integral_weight" => {
                if fields.len() != 2 {
                    return Err(perr(line, "usage: integral_weight p/q"));
                }
                integral_weight = Some(rational(fields[1])?);
            }
            other => return Err(perr(line, format!("unknown keyword `{other}`"))),
        }
    }

    if !seen_header {
        return Err(perr(0, "empty file"));
    }
    let n = dim.ok_or_else(|| perr(0, "missing `dim`"))?;
    let labels: Vec<String> = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| perr(0, format!("missing label for {i}"))))
        .collect::<Result<_, _>>()?;
    let parity: Vec<Parity> = parity
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| perr(0, format!("missing parity for {i}"))))
        .collect::<Result<_, _>>()?;
    let supplied = weight.iter().filter(|w| w.is_some()).count();
    let weights = if supplied == 0 {
        None
    } else if supplied == n {
        Some(weight.into_iter().map(Option::unwrap).collect())
    } else {
        return Err(perr(0, "weights must be given for all basis elements or none"));
    };
    let unit = unit.ok_or_else(|| perr(0, "missing `unit`"))?;
    let algebra = SuperAlgebra::new(labels, parity, weights, unit, table)?;
    let mut laplacian = OddOperator::from_columns(&lap_cols)?;
    if let Some(s) = lap_shift {
        laplacian = laplacian.with_weight_shift(s);
    }
    let mut differential = OddOperator::from_columns(&dif_cols)?;
    if let Some(s) = dif_shift {
        differential = differential.with_weight_shift(s);
    }
    Ok(DGBVAlgebra::new(
        algebra,
        laplacian,
        differential,
        integral,
        integral_weight,
    )?)
}

/// Render an instance in canonical algebra-spec text.
pub fn algebra_to_text(d: &DGBVAlgebra) -> String {
    let alg = &d.algebra;
    let n = alg.dim();
    let mut out = String::from("algebra 1\n");
    out.push_str(&format!("dim {n}\n"));
    for i in 0..n {
        out.push_str(&format!("label {i} {}\n", alg.label(i)));
    }
    for i in 0..n {
        let p = match alg.parity(i) {
            Parity::Even => "even",
            Parity::Odd => "odd",
        };
        out.push_str(&format!("parity {i} {p}\n"));
    }
    if let Some(w) = alg.weights() {
        for (i, wi) in w.iter().enumerate() {
            out.push_str(&format!("weight {i} {}\n", rat_to_string(wi)));
        }
    }
    out.push_str(&format!("unit {}\n", alg.unit_index()));
    for i in 0..n {
        for j in 0..n {
            for (k, c) in alg.basis_product(i, j).iter().enumerate() {
                if !c.is_zero() {
                    out.push_str(&format!("mul {i} {j} {k} {}\n", rat_to_string(c)));
                }
            }
        }
    }
    for (name, op) in [("laplacian", &d.laplacian), ("differential", &d.differential)] {
        for r in 0..n {
            for c in 0..n {
                let v = &op.matrix()[(r, c)];
                if !v.is_zero() {
                    out.push_str(&format!("{name} {r} {c} {}\n", rat_to_string(v)));
                }
            }
        }
        if let Some(s) = op.weight_shift() {
            out.push_str(&format!("{name}_shift {}\n", rat_to_string(s)));
        }
    }
    for (i, c) in d.integral.iter().enumerate() {
        if !c.is_zero() {
            out.push_str(&format!("integral {i} {}\n", rat_to_string(c)));
        }
    }
    if let Some(w) = &d.integral_weight {
        out.push_str(&format!("integral_weight {}\n", rat_to_string(w)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgbv::{check_dgbv, integral_check};
    use crate::scalar::rat_int;

    const EPS_XI: &str = "\
# corrected second-order Laplacian on k[eps,xi]
algebra 1
dim 4
label 0 1
label 1 eps
label 2 xi
label 3 epsxi
parity 0 even
parity 1 even
parity 2 odd
parity 3 odd
weight 0 0
weight 1 1
weight 2 1
weight 3 2
unit 0
mul 0 0 0 1
mul 0 1 1 1
mul 1 0 1 1
mul 0 2 2 1
mul 2 0 2 1
mul 0 3 3 1
mul 3 0 3 1
mul 1 2 3 1
mul 2 1 3 1
laplacian 0 2 1
laplacian 1 3 -1
laplacian_shift -1
differential_shift 1
integral 3 1
integral_weight 2
";

    #[test]
    fn parses_and_validates() {
        let d = algebra_from_text(EPS_XI).unwrap();
        assert_eq!(d.dim(), 4);
        assert!(check_dgbv(&d).pass());
        assert!(integral_check(&d).pass());
        assert_eq!(d.laplacian.col(2), vec![rat_int(1), rat_int(0), rat_int(0), rat_int(0)]);
    }

    #[test]
    fn round_trip_is_exact() {
        let d = algebra_from_text(EPS_XI).unwrap();
        let text = algebra_to_text(&d);
        let d2 = algebra_from_text(&text).unwrap();
        assert_eq!(algebra_to_text(&d2), text);
        assert_eq!(d2.algebra, d.algebra);
        assert_eq!(d2.laplacian, d.laplacian);
        assert_eq!(d2.differential, d.differential);
        assert_eq!(d2.integral, d.integral);
        assert_eq!(d2.integral_weight, d.integral_weight);
    }

    #[test]
    fn rejects_malformed_input() {
        let cases = [
            ("", "empty"),
            ("dim 4\n", "algebra 1"),
            ("algebra 1\nlabel 0 x\n", "dim"),
            ("algebra 1\ndim 2\nlabel 5 x\n", "out of range"),
            ("algebra 1\ndim 1\nlabel 0 1\nparity 0 flat\n", "bad parity"),
            ("algebra 1\ndim 1\nmul 0 0 0 1/0\n", "bad rational"),
            ("algebra 1\ndim 1\nfrobnicate 3\n", "unknown keyword"),
        ];
        for (text, needle) in cases {
            let err = algebra_from_text(text).unwrap_err();
            let msg = err.to_string();
            assert!(
                msg.contains(needle),
                "expected `{needle}` in `{msg}` for input {text:?}"
            );
        }
    }

    #[test]
    fn rejects_inconsistent_tables() {
        // Supercommutativity violated: xi·xi = eps with xi odd.
        let text = "\
algebra 1
dim 3
label 0 1
label 1 eps
label 2 xi
parity 0 even
parity 1 even
parity 2 odd
unit 0
mul 0 0 0 1
mul 0 1 1 1
mul 1 0 1 1
mul 0 2 2 1
mul 2 0 2 1
mul 2 2 1 1
integral 1 1
";
        let err = algebra_from_text(text).unwrap_err();
        assert!(matches!(err, AlgFileError::Invalid(_)));
    }

    #[test]
    fn partial_weights_are_rejected() {
        let text = "\
algebra 1
dim 2
label 0 1
label 1 x
parity 0 even
parity 1 even
weight 0 0
unit 0
mul 0 0 0 1
mul 0 1 1 1
mul 1 0 1 1
mul 1 1 1 0
integral 1 1
";
        let err = algebra_from_text(text).unwrap_err();
        assert!(err.to_string().contains("all basis elements or none"));
    }
}
