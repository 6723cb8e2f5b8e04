//! Scalar regimes: exact rationals and complex floats.
//!
//! Every computation in this crate runs in exactly one regime. Formal
//! identities (series, dGBV, spectra, potentials) use [`Rat`]; root-based
//! Saito numerics use [`C64`]. Numeric comparisons always go through an
//! explicit tolerance, scaled by the caller where appropriate.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use num_complex::Complex64;

/// Exact rational scalar (arbitrary-precision numerator/denominator).
pub type Rat = BigRational;

/// Complex floating scalar.
pub type C64 = Complex64;

/// Default absolute tolerance for numeric comparisons, applied after
/// scaling by the maximum coefficient magnitude of the data involved.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Rational `n/1` from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Render a rational as `p/q` (or just `p` when the denominator is 1),
/// the exact decimal form used by algebra files and JSON reports.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse the `p/q` form produced by [`rat_to_string`]. Whole integers are
/// accepted without a slash.
pub fn rat_from_string(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
        None => {
            let p: BigInt = s.parse().ok()?;
            Some(Rat::from_integer(p))
        }
    }
}

/// Round-trippable decimal rendering of an `f64` (17 significant digits).
pub fn f64_to_string(x: f64) -> String {
    format!("{x:.16e}")
}

/// `|a - b| <= tol` in the complex plane.
pub fn c_close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Nearest rational with the given denominator bound is not needed here;
/// rationals only ever enter the numeric regime through this conversion.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // Convert through i128 when possible to avoid precision loss on the
    // desk-scale values used in tests; fall back to string parsing.
    match (i128::try_from(n.clone()), i128::try_from(d.clone())) {
        (Ok(n), Ok(d)) => n as f64 / d as f64,
        _ => {
            let approx: f64 = n.to_string().parse().unwrap_or(f64::NAN);
            let approx_d: f64 = d.to_string().parse().unwrap_or(f64::NAN);
            approx / approx_d
        }
    }
}

/// Is this rational an integer?
pub fn rat_is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Absolute value of a rational.
pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}
