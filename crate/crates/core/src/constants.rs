use num_bigint::BigInt;
use num_traits::One;

use crate::decimal::Decimal;
use crate::error::{Error, Result};

/// Digits of π after the decimal point held in [`PI_LITERAL`].
pub const PI_DIGITS: u32 = 100;

/// π to 100 decimal places, truncated (the 101st place is 8).
pub const PI_LITERAL: &str = "3.\
1415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";

/// π rounded to `digits` significant digits.
pub fn pi(digits: u32) -> Result<Decimal> {
    check_digits(digits)?;
    let full: Decimal = PI_LITERAL.parse().expect("pi literal parses");
    Ok(full.with_precision(digits))
}

/// Rejects precisions the stored π cannot support.
pub fn check_digits(digits: u32) -> Result<()> {
    if digits > PI_DIGITS {
        return Err(Error::PrecisionUnachievable { requested: digits, available: PI_DIGITS });
    }
    if digits == 0 {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    Ok(())
}

/// Working precision for a result wanted at `digits`, capped by the stored π.
pub(crate) fn guarded(digits: u32) -> u32 {
    (digits + 10).min(PI_DIGITS + 1)
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}
