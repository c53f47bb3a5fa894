//! The finite product `∏_{k=1}^{M} (1 - x²/(k-½)²)`, its expansion in powers
//! of `x²`, and the cosine it converges to.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::constants::{check_digits, guarded, pi};
use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::esp::EspState;
use crate::terms::term_as;
use crate::number::{with_scalar, NumberMode, NumberValue, Scalar};

/// Largest factor count expanded to full order without an explicit cutoff.
pub const FULL_EXPANSION_LIMIT: u64 = 10_000;

/// `Σ_{k=0}^{n} c[k]·x^{2k}` with `c[k] = (-4)^k e_k(M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenPolynomial {
    m: u64,
    mode: NumberMode,
    coeffs: Vec<NumberValue>,
}

impl EvenPolynomial {
    pub fn factors(&self) -> u64 {
        self.m
    }

    pub fn mode(&self) -> NumberMode {
        self.mode
    }

    /// `c[k]` multiplies `x^{2k}`.
    pub fn coefficients(&self) -> &[NumberValue] {
        &self.coeffs
    }

    /// True when the coefficient list stops before `x^{2M}`.
    pub fn is_truncated(&self) -> bool {
        (self.coeffs.len() as u64) <= self.m
    }
}

fn expand_as<S: Scalar>(m: u64, order: usize, mode: &NumberMode) -> Result<Vec<S>> {
    // e_k of 1/(ℓ-½)² = 4u_ℓ directly, so no 4^k factor can overflow
    let four = S::from_int(4, mode);
    let mut esp = EspState::<S>::empty(order, *mode);
    for index in 1..=m {
        esp.push(four.clone() * term_as::<S>(index, mode)?);
    }
    Ok(esp
        .into_coefficients()
        .into_iter()
        .enumerate()
        .map(|(k, e)| if k % 2 == 0 { e } else { -e })
        .collect())
}

/// Expands the product of `m` factors; `order` truncates at `x^{2·order}`.
pub fn expand_product(m: u64, order: Option<usize>, mode: &NumberMode) -> Result<EvenPolynomial> {
    if m == 0 {
        return Err(Error::InvalidArgument("at least one factor is required".into()));
    }
    let order = match order {
        Some(n) => n.min(m as usize),
        None if m > FULL_EXPANSION_LIMIT => {
            return Err(Error::MemoryGuard { m, limit: FULL_EXPANSION_LIMIT })
        }
        None => m as usize,
    };
    let coeffs = with_scalar!(mode, S => expand_as::<S>(m, order, mode)?
        .into_iter()
        .map(S::into_value)
        .collect());
    Ok(EvenPolynomial { m, mode: *mode, coeffs })
}

fn eval_product_as<S: Scalar>(m: u64, x: S, mode: &NumberMode) -> S {
    // 1 - x²/(k-½)² = (2k-1-2x)(2k-1+2x)/(2k-1)², exactly zero at x = k-½
    let two_x = S::from_int(2, mode) * x;
    let mut acc = S::one_in(mode);
    for k in 1..=m {
        let odd = S::from_ratio(&(BigInt::from(k) * 2u32 - 1u32), &BigInt::one(), mode);
        let factor = (odd.clone() - two_x.clone()) * (odd.clone() + two_x.clone()) / (odd.clone() * odd);
        acc = acc * factor;
    }
    acc
}

/// Direct left-to-right evaluation of the `m` factors at `x`.
pub fn eval_product(m: u64, x: &NumberValue, mode: &NumberMode) -> Result<NumberValue> {
    if m == 0 {
        return Err(Error::InvalidArgument("at least one factor is required".into()));
    }
    check_finite(x)?;
    with_scalar!(mode, S => {
        let x = S::from_value(x, mode)?;
        Ok(eval_product_as::<S>(m, x, mode).into_value())
    })
}

/// Horner evaluation of `poly` in `x²`, in the polynomial's own mode.
pub fn eval_poly(poly: &EvenPolynomial, x: &NumberValue) -> Result<NumberValue> {
    check_finite(x)?;
    let x = x.convert(&poly.mode)?;
    let y = x.clone() * x;
    let mut acc = NumberValue::zero_in(&poly.mode);
    for c in poly.coeffs.iter().rev() {
        acc = acc * y.clone() + c.clone();
    }
    Ok(acc)
}

fn check_finite(x: &NumberValue) -> Result<()> {
    if x.to_f64().is_finite() || !matches!(x, NumberValue::Float(_)) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("non-finite x: {x}")))
    }
}

/// `cos(πx)` to `digits` significant digits.
///
/// `x` is reduced exactly: `cos(π·x)` has period 2 and `cos(π(1-x)) = -cos(πx)`
/// brings the argument into `[0, ½]` before the Taylor series runs. The
/// exact zeros `x ≡ ½ (mod 1)` and exact ones `x ∈ 2ℤ` return exact values.
pub fn cos_reference(x: &NumberValue, digits: u32) -> Result<Decimal> {
    check_digits(digits)?;
    check_finite(x)?;
    let r = x.to_exact_rational()?;
    if r.abs() > BigRational::from_integer(10.into()) {
        return Err(Error::InvalidArgument(format!("|x| must be at most 10, got {x}")));
    }
    let two = BigRational::from_integer(2.into());
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());

    // r mod 2 into [0, 2), then fold onto [0, 1] using evenness
    let mut r = &r - (&r / &two).floor() * &two;
    if r > one {
        r = &two - r;
    }
    let mut negate = false;
    if r > half {
        r = &one - r;
        negate = true;
    }
    if r == half {
        return Ok(Decimal::zero(digits));
    }
    if r.is_zero() {
        let v = Decimal::one(digits);
        return Ok(if negate { -v } else { v });
    }

    let work = guarded(digits);
    let arg = &pi(work)? * &Decimal::from_rational(&r, work);
    let arg2 = &arg * &arg;
    let mut term = Decimal::one(work);
    let mut sum = Decimal::one(work);
    let eps = Decimal::from_parts(BigInt::one(), -(work as i64) - 2, work);
    for k in 1u32.. {
        let denom = Decimal::from_int((2 * k as i64 - 1) * (2 * k as i64), work);
        term = -(&(&term * &arg2) / &denom);
        sum = &sum + &term;
        if term.abs() < eps {
            break;
        }
    }
    let v = sum.with_precision(digits);
    Ok(if negate { -v } else { v })
}
