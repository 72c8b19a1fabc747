//! Exact arithmetic kernel: rationals, sparse multivariate polynomials in
//! graded reverse lexicographic order, polynomial vector fields and their
//! Lie brackets.
//!
//! Everything here is immutable once built and works over `Q` only.

mod chart;
mod poly;
mod vector_field;

pub use chart::{Chart, PointQ};
pub use poly::{Monomial, Polynomial};
pub use vector_field::VectorField;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact rational number. Always stored in lowest terms with a positive
/// denominator.
pub type Q = BigRational;

/// Default cap on the total degree of any polynomial produced by a checked
/// operation.
pub const DEFAULT_DEGREE_CAP: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("chart mismatch: ({left}) vs ({right})")]
    ChartMismatch { left: String, right: String },
    #[error("total degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("expected {expected} components, got {got}")]
    Arity { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, FieldError>;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_zero() -> Q {
    Q::zero()
}

pub fn q_one() -> Q {
    Q::one()
}

/// Parses `"a"` or `"a/b"` (optional leading minus) into a rational.
pub fn parse_rational(text: &str) -> Option<Q> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Q::new(num, den))
}

pub(crate) fn check_same_chart(a: &Chart, b: &Chart) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(FieldError::ChartMismatch {
            left: a.names().join(" "),
            right: b.names().join(" "),
        })
    }
}

/// `[X, Y]` with components `sum_j X_j dY_i/dx_j - Y_j dX_i/dx_j`, rejecting
/// results whose degree exceeds [`DEFAULT_DEGREE_CAP`].
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    lie_bracket_capped(x, y, DEFAULT_DEGREE_CAP)
}

pub fn lie_bracket_capped(x: &VectorField, y: &VectorField, cap: u32) -> Result<VectorField> {
    check_same_chart(x.chart(), y.chart())?;
    let out = x.bracket_unchecked(y);
    out.check_degree(cap)?;
    Ok(out)
}

/// Value of `X` at `p`.
pub fn evaluate(x: &VectorField, p: &PointQ) -> Result<Vec<Q>> {
    check_same_chart(x.chart(), p.chart())?;
    Ok(x.eval_unchecked(p.values()))
}

/// Directional derivative `X(f)`.
pub fn apply(x: &VectorField, f: &Polynomial) -> Result<Polynomial> {
    check_same_chart(x.chart(), f.chart())?;
    let out = x.apply_unchecked(f);
    if let Some(d) = out.total_degree() {
        if d > DEFAULT_DEGREE_CAP {
            return Err(FieldError::DegreeCap { degree: d, cap: DEFAULT_DEGREE_CAP });
        }
    }
    Ok(out)
}
