//! Arithmetic modes and the tagged scalar that crosses module boundaries.
//!
//! Algorithms are written once against [`Scalar`] and instantiated for
//! `BigRational`, `f64`, [`Decimal`] and the dynamically tagged
//! [`NumberValue`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use serde_json::json;

use crate::decimal::{parse_decimal_literal, Decimal};
use crate::error::{Error, Result};

pub const DEFAULT_DECIMAL_DIGITS: u32 = 50;
pub const MIN_DECIMAL_DIGITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumberKind {
    ExactRational,
    Float64,
    DecimalFloat,
}

impl NumberKind {
    pub fn name(self) -> &'static str {
        match self {
            NumberKind::ExactRational => "rational",
            NumberKind::Float64 => "f64",
            NumberKind::DecimalFloat => "decimal",
        }
    }
}

/// The arithmetic a computation runs in. `digits` is only meaningful for
/// [`NumberKind::DecimalFloat`] and is always at least [`MIN_DECIMAL_DIGITS`] there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NumberMode {
    kind: NumberKind,
    digits: u32,
}

impl NumberMode {
    pub const RATIONAL: NumberMode = NumberMode { kind: NumberKind::ExactRational, digits: 0 };
    pub const F64: NumberMode = NumberMode { kind: NumberKind::Float64, digits: 0 };

    pub fn rational() -> Self {
        Self::RATIONAL
    }

    pub fn f64() -> Self {
        Self::F64
    }

    pub fn decimal(digits: u32) -> Result<Self> {
        if digits < MIN_DECIMAL_DIGITS {
            return Err(Error::InvalidArgument(format!(
                "decimal mode needs at least {MIN_DECIMAL_DIGITS} digits, got {digits}"
            )));
        }
        Ok(NumberMode { kind: NumberKind::DecimalFloat, digits })
    }

    pub fn default_decimal() -> Self {
        NumberMode { kind: NumberKind::DecimalFloat, digits: DEFAULT_DECIMAL_DIGITS }
    }

    pub fn kind(&self) -> NumberKind {
        self.kind
    }

    pub fn digits(&self) -> Option<u32> {
        match self.kind {
            NumberKind::DecimalFloat => Some(self.digits),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.kind == NumberKind::ExactRational
    }

    /// Parses `rational`, `f64` or `decimal`; `digits` applies to the latter.
    pub fn parse(name: &str, digits: u32) -> Result<Self> {
        match name {
            "rational" | "exact" => Ok(Self::rational()),
            "f64" | "float" => Ok(Self::f64()),
            "decimal" => Self::decimal(digits),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for NumberMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NumberKind::DecimalFloat => write!(f, "decimal({})", self.digits),
            k => f.write_str(k.name()),
        }
    }
}

/// A scalar in one of the three arithmetic modes.
#[derive(Clone, Debug)]
pub enum NumberValue {
    Rational(BigRational),
    Float(f64),
    Decimal(Decimal),
}

impl NumberValue {
    pub fn kind(&self) -> NumberKind {
        match self {
            NumberValue::Rational(_) => NumberKind::ExactRational,
            NumberValue::Float(_) => NumberKind::Float64,
            NumberValue::Decimal(_) => NumberKind::DecimalFloat,
        }
    }

    pub fn mode(&self) -> NumberMode {
        match self {
            NumberValue::Rational(_) => NumberMode::RATIONAL,
            NumberValue::Float(_) => NumberMode::F64,
            NumberValue::Decimal(d) => {
                NumberMode { kind: NumberKind::DecimalFloat, digits: d.precision() }
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, NumberValue::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            NumberValue::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Exact rational value; binary and decimal floats are converted without rounding.
    pub fn to_exact_rational(&self) -> Result<BigRational> {
        match self {
            NumberValue::Rational(r) => Ok(r.clone()),
            NumberValue::Float(x) => BigRational::from_float(*x)
                .ok_or_else(|| Error::InvalidArgument(format!("non-finite value {x}"))),
            NumberValue::Decimal(d) => Ok(d.to_rational()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            NumberValue::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            NumberValue::Float(x) => *x,
            NumberValue::Decimal(d) => d.to_f64(),
        }
    }

    pub fn to_decimal(&self, digits: u32) -> Decimal {
        match self {
            NumberValue::Rational(r) => Decimal::from_rational(r, digits),
            NumberValue::Float(x) => Decimal::from_f64_or_zero(*x, digits),
            NumberValue::Decimal(d) => d.with_precision(digits),
        }
    }

    /// Converts into `mode`. Inexact values are refused by the rational mode.
    pub fn convert(&self, mode: &NumberMode) -> Result<NumberValue> {
        Ok(match mode.kind {
            NumberKind::ExactRational => match self {
                NumberValue::Rational(r) => NumberValue::Rational(r.clone()),
                other => {
                    return Err(Error::Mode(format!(
                        "cannot use inexact {} value {other} in rational mode",
                        other.kind().name()
                    )))
                }
            },
            NumberKind::Float64 => NumberValue::Float(self.to_f64()),
            NumberKind::DecimalFloat => NumberValue::Decimal(self.to_decimal(mode.digits)),
        })
    }

    pub fn from_rational_in(r: &BigRational, mode: &NumberMode) -> NumberValue {
        match mode.kind {
            NumberKind::ExactRational => NumberValue::Rational(r.clone()),
            NumberKind::Float64 => NumberValue::Float(r.to_f64().unwrap_or(f64::NAN)),
            NumberKind::DecimalFloat => NumberValue::Decimal(Decimal::from_rational(r, mode.digits)),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            NumberValue::Rational(r) => sign_of(r.is_positive(), r.is_negative()),
            NumberValue::Float(x) => sign_of(*x > 0.0, *x < 0.0),
            NumberValue::Decimal(d) => sign_of(d.is_positive(), d.is_negative()),
        }
    }

    /// Exact comparison across modes.
    pub fn cmp_exact(&self, other: &NumberValue) -> Result<Ordering> {
        match (self, other) {
            (NumberValue::Rational(a), NumberValue::Rational(b)) => Ok(a.cmp(b)),
            (NumberValue::Decimal(a), NumberValue::Decimal(b)) => Ok(a.cmp(b)),
            _ => Ok(self.to_exact_rational()?.cmp(&other.to_exact_rational()?)),
        }
    }

    /// JSON form: `{"mode": ..., "value": ...}`, plus `"digits"` for decimals.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            NumberValue::Rational(r) => json!({ "mode": "rational", "value": format_rational(r) }),
            NumberValue::Float(x) => {
                if x.is_finite() {
                    json!({ "mode": "f64", "value": x })
                } else {
                    json!({ "mode": "f64", "value": x.to_string() })
                }
            }
            NumberValue::Decimal(d) => {
                json!({ "mode": "decimal", "digits": d.precision(), "value": d.to_string() })
            }
        }
    }
}

fn sign_of(pos: bool, neg: bool) -> i32 {
    if pos {
        1
    } else if neg {
        -1
    } else {
        0
    }
}

/// `p/q` in lowest terms with `q > 0`; integers print without the denominator.
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// Parses `p/q`, an integer, or a decimal literal into an exact rational.
pub fn parse_exact(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (m, e) = parse_decimal_literal(s)?;
    let ten = BigInt::from(10u32);
    Ok(if e >= 0 {
        BigRational::from_integer(m * num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(m, num_traits::pow(ten, (-e) as usize))
    })
}

impl fmt::Display for NumberValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumberValue::Rational(r) => f.write_str(&format_rational(r)),
            NumberValue::Float(x) if *x == 0.0 || (1e-5..1e16).contains(&x.abs()) => write!(f, "{x}"),
            NumberValue::Float(x) => write!(f, "{x:e}"),
            NumberValue::Decimal(d) => write!(f, "{d}"),
        }
    }
}

impl Serialize for NumberValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl PartialEq for NumberValue {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for NumberValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (NumberValue::Float(a), b) => a.partial_cmp(&b.to_f64()),
            (a, NumberValue::Float(b)) => a.to_f64().partial_cmp(b),
            _ => self.cmp_exact(other).ok(),
        }
    }
}

/// Arithmetic needed by the summation kernels.
///
/// Mixed-mode [`NumberValue`] arithmetic promotes to the coarser operand:
/// any `f64` operand gives `f64`, otherwise any decimal gives a decimal at the
/// larger precision, otherwise the result stays rational.
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero_in(mode: &NumberMode) -> Self;
    fn from_ratio(num: &BigInt, den: &BigInt, mode: &NumberMode) -> Self;
    fn from_value(v: &NumberValue, mode: &NumberMode) -> Result<Self>;
    fn into_value(self) -> NumberValue;
    fn is_zero_value(&self) -> bool;
    fn abs_value(&self) -> Self;
    fn to_f64_value(&self) -> f64;
    fn is_exact_value(&self) -> bool;

    fn one_in(mode: &NumberMode) -> Self {
        Self::from_int(1, mode)
    }

    fn from_int(v: i64, mode: &NumberMode) -> Self {
        Self::from_ratio(&BigInt::from(v), &BigInt::one(), mode)
    }

    /// One step of a running sum with an optional compensation term.
    /// Exact and decimal modes ignore `comp`; `f64` uses Neumaier's scheme.
    fn accumulate(sum: &mut Self, _comp: &mut Self, x: Self) {
        let s = std::mem::replace(sum, x.clone());
        *sum = s + x;
    }
}

impl Scalar for BigRational {
    fn zero_in(_: &NumberMode) -> Self {
        BigRational::zero()
    }
    fn from_ratio(num: &BigInt, den: &BigInt, _: &NumberMode) -> Self {
        BigRational::new(num.clone(), den.clone())
    }
    fn from_value(v: &NumberValue, mode: &NumberMode) -> Result<Self> {
        match v.convert(mode)? {
            NumberValue::Rational(r) => Ok(r),
            _ => unreachable!(),
        }
    }
    fn into_value(self) -> NumberValue {
        NumberValue::Rational(self)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn to_f64_value(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn is_exact_value(&self) -> bool {
        true
    }
}

impl Scalar for f64 {
    fn zero_in(_: &NumberMode) -> Self {
        0.0
    }
    fn from_ratio(num: &BigInt, den: &BigInt, _: &NumberMode) -> Self {
        match (num.to_i64(), den.to_i64()) {
            (Some(p), Some(q)) if p.unsigned_abs() <= 1 << 53 && q.unsigned_abs() <= 1 << 53 => {
                p as f64 / q as f64
            }
            _ => BigRational::new(num.clone(), den.clone()).to_f64().unwrap_or(f64::NAN),
        }
    }
    fn from_value(v: &NumberValue, _: &NumberMode) -> Result<Self> {
        Ok(v.to_f64())
    }
    fn into_value(self) -> NumberValue {
        NumberValue::Float(self)
    }
    fn is_zero_value(&self) -> bool {
        *self == 0.0
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn to_f64_value(&self) -> f64 {
        *self
    }
    fn is_exact_value(&self) -> bool {
        false
    }
    fn accumulate(sum: &mut f64, comp: &mut f64, x: f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }
}

impl Scalar for Decimal {
    fn zero_in(mode: &NumberMode) -> Self {
        Decimal::zero(mode.digits().unwrap_or(DEFAULT_DECIMAL_DIGITS))
    }
    fn from_ratio(num: &BigInt, den: &BigInt, mode: &NumberMode) -> Self {
        Decimal::from_ratio(num, den, mode.digits().unwrap_or(DEFAULT_DECIMAL_DIGITS))
    }
    fn from_value(v: &NumberValue, mode: &NumberMode) -> Result<Self> {
        Ok(v.to_decimal(mode.digits().unwrap_or(DEFAULT_DECIMAL_DIGITS)))
    }
    fn into_value(self) -> NumberValue {
        NumberValue::Decimal(self)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn abs_value(&self) -> Self {
        self.abs()
    }
    fn to_f64_value(&self) -> f64 {
        self.to_f64()
    }
    fn is_exact_value(&self) -> bool {
        false
    }
}

impl Scalar for NumberValue {
    fn zero_in(mode: &NumberMode) -> Self {
        match mode.kind {
            NumberKind::ExactRational => NumberValue::Rational(BigRational::zero()),
            NumberKind::Float64 => NumberValue::Float(0.0),
            NumberKind::DecimalFloat => NumberValue::Decimal(Decimal::zero(mode.digits)),
        }
    }
    fn from_ratio(num: &BigInt, den: &BigInt, mode: &NumberMode) -> Self {
        match mode.kind {
            NumberKind::ExactRational => NumberValue::Rational(<BigRational as Scalar>::from_ratio(num, den, mode)),
            NumberKind::Float64 => NumberValue::Float(<f64 as Scalar>::from_ratio(num, den, mode)),
            NumberKind::DecimalFloat => NumberValue::Decimal(Decimal::from_ratio(num, den, mode.digits)),
        }
    }
    fn from_value(v: &NumberValue, mode: &NumberMode) -> Result<Self> {
        v.convert(mode)
    }
    fn into_value(self) -> NumberValue {
        self
    }
    fn is_zero_value(&self) -> bool {
        self.signum() == 0
    }
    fn abs_value(&self) -> Self {
        match self {
            NumberValue::Rational(r) => NumberValue::Rational(r.abs()),
            NumberValue::Float(x) => NumberValue::Float(x.abs()),
            NumberValue::Decimal(d) => NumberValue::Decimal(d.abs()),
        }
    }
    fn to_f64_value(&self) -> f64 {
        self.to_f64()
    }
    fn is_exact_value(&self) -> bool {
        self.is_exact()
    }
}

fn promote(
    a: NumberValue,
    b: NumberValue,
    rat: fn(BigRational, BigRational) -> BigRational,
    flt: fn(f64, f64) -> f64,
    dec: fn(Decimal, Decimal) -> Decimal,
) -> NumberValue {
    use NumberValue::*;
    match (a, b) {
        (Rational(x), Rational(y)) => Rational(rat(x, y)),
        (Float(x), y) => Float(flt(x, y.to_f64())),
        (x, Float(y)) => Float(flt(x.to_f64(), y)),
        (Decimal(x), Decimal(y)) => Decimal(dec(x, y)),
        (Decimal(x), Rational(y)) => {
            let y = crate::decimal::Decimal::from_rational(&y, x.precision());
            Decimal(dec(x, y))
        }
        (Rational(x), Decimal(y)) => {
            let x = crate::decimal::Decimal::from_rational(&x, y.precision());
            Decimal(dec(x, y))
        }
    }
}

macro_rules! value_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for NumberValue {
            type Output = NumberValue;
            fn $method(self, rhs: NumberValue) -> NumberValue {
                promote(self, rhs, |a, b| a $op b, |a, b| a $op b, |a, b| a $op b)
            }
        }
    };
}

value_binop!(Add, add, +);
value_binop!(Sub, sub, -);
value_binop!(Mul, mul, *);
value_binop!(Div, div, /);

impl Neg for NumberValue {
    type Output = NumberValue;
    fn neg(self) -> NumberValue {
        match self {
            NumberValue::Rational(r) => NumberValue::Rational(-r),
            NumberValue::Float(x) => NumberValue::Float(-x),
            NumberValue::Decimal(d) => NumberValue::Decimal(-d),
        }
    }
}

/// Runs `$body` with the type alias `$S` bound to the concrete scalar of `$mode`.
macro_rules! with_scalar {
    ($mode:expr, $S:ident => $body:expr) => {
        match $mode.kind() {
            $crate::number::NumberKind::ExactRational => {
                type $S = ::num_rational::BigRational;
                $body
            }
            $crate::number::NumberKind::Float64 => {
                type $S = f64;
                $body
            }
            $crate::number::NumberKind::DecimalFloat => {
                type $S = $crate::decimal::Decimal;
                $body
            }
        }
    };
}

pub(crate) use with_scalar;
