//! Exact computer-algebra substrate.
//!
//! Everything here is immutable after construction and every operation is a
//! pure function, so values can be shared freely across threads.

mod monomial;
mod parse;
mod poly;
mod ratfn;
mod scalar;
mod series;

pub use monomial::Monomial;
pub use parse::{parse_polynomial, parse_rational_function, parse_series};
pub use poly::Polynomial;
pub use ratfn::{DenominatorFactor, RationalFunction};
pub use scalar::{parse_scalar, scalar_is_integer, Scalar};
pub use series::TruncatedSeries;

/// Position of a formal variable: `0` is the Hodge variable `q`, `i ≥ 1` is `qᵢ`.
pub type VariableId = usize;

/// Canonical text name of a variable.
pub fn variable_name(v: VariableId) -> String {
    if v == 0 {
        "q".to_string()
    } else {
        format!("q{v}")
    }
}
