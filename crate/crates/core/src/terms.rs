//! The odd reciprocal squares `u_ℓ = 1/(2ℓ-1)²`.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::number::{with_scalar, NumberKind, NumberMode, NumberValue, Scalar};

/// Largest odd square an `f64` holds as an exact integer.
const F64_EXACT_LIMIT: u64 = 1 << 53;

/// `(2ℓ-1)²`, checked against the exact integer range of `mode`.
fn odd_square(index: u64, mode: &NumberMode) -> Result<BigInt> {
    if index == 0 {
        return Err(Error::InvalidArgument("term index starts at 1".into()));
    }
    if mode.kind() == NumberKind::Float64 {
        let sq = index
            .checked_mul(2)
            .map(|v| v - 1)
            .and_then(|v| v.checked_mul(v))
            .filter(|&v| v <= F64_EXACT_LIMIT);
        return match sq {
            Some(v) => Ok(BigInt::from(v)),
            None => Err(Error::Overflow { index, mode: "f64" }),
        };
    }
    let odd = BigInt::from(index) * 2u32 - 1u32;
    Ok(&odd * &odd)
}

/// `u_ℓ` as a concrete scalar.
pub fn term_as<S: Scalar>(index: u64, mode: &NumberMode) -> Result<S> {
    Ok(S::from_ratio(&BigInt::one(), &odd_square(index, mode)?, mode))
}

/// `u_ℓ = 1/(2ℓ-1)²` in the requested mode; exact in rational mode.
pub fn term(index: u64, mode: &NumberMode) -> Result<NumberValue> {
    with_scalar!(mode, S => term_as::<S>(index, mode).map(S::into_value))
}

/// `Σ_{ℓ=1}^{M} u_ℓ`, the truncated odd Basel sum.
pub fn simple_partial_sum(m: u64, mode: &NumberMode) -> Result<NumberValue> {
    with_scalar!(mode, S => simple_partial_sum_as::<S>(m, mode).map(S::into_value))
}

pub fn simple_partial_sum_as<S: Scalar>(m: u64, mode: &NumberMode) -> Result<S> {
    let mut sum = S::zero_in(mode);
    let mut comp = S::zero_in(mode);
    for index in 1..=m {
        S::accumulate(&mut sum, &mut comp, term_as::<S>(index, mode)?);
    }
    Ok(sum + comp)
}

/// Lazy view of `u_1, u_2, …` in one arithmetic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermSequence {
    mode: NumberMode,
}

impl TermSequence {
    pub fn new(mode: NumberMode) -> Self {
        TermSequence { mode }
    }

    pub fn mode(&self) -> NumberMode {
        self.mode
    }

    pub fn term(&self, index: u64) -> Result<NumberValue> {
        term(index, &self.mode)
    }

    /// The unsimplified factor `1/(ℓ-½)² = 4·u_ℓ`.
    pub fn half_shifted(&self, index: u64) -> Result<NumberValue> {
        let four = NumberValue::from_int(4, &self.mode);
        Ok(four * self.term(index)?)
    }

    /// Terms starting at `u_1`; stops at the first index the mode cannot represent.
    pub fn iter(&self) -> impl Iterator<Item = NumberValue> + '_ {
        (1u64..).map_while(move |i| self.term(i).ok())
    }

    pub fn iter_as<S: Scalar>(&self) -> impl Iterator<Item = S> + '_ {
        (1u64..).map_while(move |i| term_as::<S>(i, &self.mode).ok())
    }
}
