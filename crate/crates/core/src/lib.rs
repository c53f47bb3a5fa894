//! Nested-sum series for even powers of π.
//!
//! Substituting `x_k = 1/(k-½)²` and `t = -x²` into `∏(1 + x_k t)` turns the
//! elementary symmetric polynomials of the odd reciprocal squares
//! `u_ℓ = 1/(2ℓ-1)²` into the Taylor coefficients of `cos(πx)`:
//!
//! ```text
//! e_n(u_1, u_2, …) = (π/2)^{2n} / (2n)!
//! ```
//!
//! This crate evaluates the truncations `e_n(u_1, …, u_M)` by several
//! independent routes, in exact rational, `f64`, or fixed-precision decimal
//! arithmetic, and brackets the infinite limits with a rigorous tail bound.

pub mod cli;
pub mod constants;
pub mod decimal;
pub mod error;
pub mod esp;
pub mod number;
pub mod polyproduct;
pub mod series;
pub mod terms;

pub use decimal::Decimal;
pub use error::{Error, Result};
pub use esp::{esp_bruteforce, esp_dp, esp_extend, esp_newton, power_sums, EspState};
pub use number::{NumberKind, NumberMode, NumberValue, Scalar};
pub use polyproduct::{cos_reference, eval_poly, eval_product, expand_product, EvenPolynomial};
pub use series::{
    convergence_report, majorant_check, nested_partial, tail_bound, target_value, verify, PiTarget,
    VerificationReport,
};
pub use terms::{simple_partial_sum, term, TermSequence};
