//! Exact computation of orbifold Euler characteristics
//! `χ(M̄₁,ₙ, 𝓗^d ⊗ L₁^{d₁} ⊗ … ⊗ Lₙ^{dₙ})` on the moduli stack of stable
//! genus-one curves.
//!
//! The crate is organised in four layers:
//!
//! * [`arith`] — exact rationals, sparse multivariate polynomials, rational
//!   functions with factored denominators and truncated power series.
//! * [`formulas`] — the closed-form generating functions on `M̄₁,₁`, the
//!   orbifold Riemann–Roch corrections and the string-equation pushdown.
//! * [`engine`] — the memoized reduction from `n` points down to one point,
//!   coefficient extraction and the negative-exponent extension.
//! * [`oracles`] — independent checks used by the verification suite.
//!
//! Series variables are positional: index `0` is the Hodge variable `q`,
//! which tracks powers of `𝓗⁻¹`, and index `i ≥ 1` is `qᵢ`, tracking `Lᵢ`.

pub mod arith;
pub mod engine;
pub mod error;
pub mod formulas;
pub mod oracles;

pub use arith::{
    DenominatorFactor, Monomial, Polynomial, RationalFunction, Scalar, TruncatedSeries, VariableId,
};
pub use engine::{ChiRequest, Engine, EngineConfig, InvariantKey, MemoCache, Mode};
pub use error::{Error, Result};
pub use num_bigint::BigInt;
