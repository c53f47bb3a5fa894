//! Base-10 floating point with a configurable number of significant digits.
//!
//! A [`Decimal`] is `mantissa × 10^exponent` where the mantissa is rounded to
//! at most `precision` significant digits (round half to even) after every
//! operation. Binary operations run at the larger of the two operand
//! precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const MIN_PRECISION: u32 = 1;

const POW10_CACHE: usize = 512;

fn pow10_table() -> &'static [BigUint] {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(POW10_CACHE);
        let mut p = BigUint::one();
        for _ in 0..POW10_CACHE {
            v.push(p.clone());
            p *= 10u32;
        }
        v
    })
}

pub(crate) fn pow10(k: u64) -> BigUint {
    match pow10_table().get(k as usize) {
        Some(p) => p.clone(),
        None => BigUint::from(10u32).pow(k as u32),
    }
}

fn pow10_ref(k: u64) -> std::borrow::Cow<'static, BigUint> {
    match pow10_table().get(k as usize) {
        Some(p) => std::borrow::Cow::Borrowed(p),
        None => std::borrow::Cow::Owned(BigUint::from(10u32).pow(k as u32)),
    }
}

/// Number of decimal digits of `|m|`; zero has one digit.
pub(crate) fn digit_count(m: &BigUint) -> u64 {
    let bits = m.bits();
    if bits == 0 {
        return 1;
    }
    // floor((bits - 1) * log10(2)) + 1 is exact or one short.
    let est = ((bits - 1) as f64 * std::f64::consts::LOG10_2).floor() as u64 + 1;
    if *m >= *pow10_ref(est) {
        est + 1
    } else {
        est
    }
}

fn scale_up(m: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        m.clone()
    } else {
        m * BigInt::from_biguint(Sign::Plus, pow10(k))
    }
}

#[derive(Clone)]
pub struct Decimal {
    mantissa: BigInt,
    exponent: i64,
    precision: u32,
}

impl Decimal {
    pub fn zero(precision: u32) -> Self {
        Decimal { mantissa: BigInt::zero(), exponent: 0, precision: precision.max(MIN_PRECISION) }
    }

    pub fn one(precision: u32) -> Self {
        Self::from_int(1, precision)
    }

    pub fn from_int(v: i64, precision: u32) -> Self {
        Self::from_parts(BigInt::from(v), 0, precision)
    }

    /// Builds `mantissa × 10^exponent`, rounded to `precision` digits.
    pub fn from_parts(mantissa: BigInt, exponent: i64, precision: u32) -> Self {
        let precision = precision.max(MIN_PRECISION);
        let (mantissa, exponent) = round_parts(mantissa, exponent, precision);
        Decimal { mantissa, exponent, precision }
    }

    /// Correctly rounded quotient `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, precision: u32) -> Self {
        assert!(!den.is_zero(), "decimal division by zero");
        let a = Decimal { mantissa: num.clone(), exponent: 0, precision };
        let b = Decimal { mantissa: den.clone(), exponent: 0, precision };
        a.div_at(&b, precision)
    }

    pub fn from_rational(r: &BigRational, precision: u32) -> Self {
        Self::from_ratio(r.numer(), r.denom(), precision)
    }

    /// Exact binary-to-decimal conversion of a finite `f64`, then rounded.
    pub fn from_f64(x: f64, precision: u32) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite value {x}")));
        }
        if x == 0.0 {
            return Ok(Self::zero(precision));
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e2) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), raw_exp - 1075) };
        let mut mant = BigInt::from(m);
        if negative {
            mant = -mant;
        }
        let (mant, exp10) = if e2 >= 0 {
            (mant * (BigInt::one() << e2 as usize), 0)
        } else {
            // m * 2^-k = m * 5^k * 10^-k
            let k = (-e2) as u32;
            (mant * BigInt::from(5u32).pow(k), e2)
        };
        Ok(Self::from_parts(mant, exp10, precision))
    }

    pub fn from_f64_or_zero(x: f64, precision: u32) -> Self {
        Self::from_f64(x, precision).unwrap_or_else(|_| Self::zero(precision))
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        Self::from_parts(self.mantissa.clone(), self.exponent, precision)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        Decimal { mantissa: self.mantissa.abs(), exponent: self.exponent, precision: self.precision }
    }

    /// Decimal exponent of the leading digit, i.e. `floor(log10|x|)`.
    pub fn magnitude(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exponent + digit_count(self.mantissa.magnitude()) as i64 - 1)
        }
    }

    /// Exact rational value of this decimal.
    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(scale_up(&self.mantissa, self.exponent as u64))
        } else {
            let den = BigInt::from_biguint(Sign::Plus, pow10((-self.exponent) as u64));
            BigRational::new(self.mantissa.clone(), den)
        }
    }

    /// Nearest `f64` (delegates the rounding to the standard float parser).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        format!("{}e{}", self.mantissa, self.exponent).parse().unwrap_or(f64::NAN)
    }

    pub fn powi(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Decimal::one(self.precision);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Positive real `k`-th root by Newton iteration from an `f64` seed.
    pub fn nth_root(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("zeroth root".into()));
        }
        if self.is_negative() {
            return Err(Error::InvalidArgument("root of a negative value".into()));
        }
        if self.is_zero() || k == 1 {
            return Ok(self.clone());
        }
        let prec = self.precision;
        let work = prec + 10;
        let x = self.with_precision(work);

        // x = y * 10^(k*q) with y of moderate size, so the seed fits in f64.
        let top = x.magnitude().unwrap_or(0);
        let q = Integer::div_floor(&top, &(k as i64));
        let y = Decimal { mantissa: x.mantissa.clone(), exponent: x.exponent - q * k as i64, precision: work };
        let seed = y.to_f64().powf(1.0 / k as f64);
        let mut r = Decimal::from_f64(seed, work)?;
        r.exponent += q;

        let kd = Decimal::from_int(k as i64, work);
        let km1 = Decimal::from_int(k as i64 - 1, work);
        let tol = Decimal::from_parts(BigInt::one(), -(work as i64), work);
        for _ in 0..200 {
            let next = &(&(&km1 * &r) + &(&x / &r.powi(k - 1))) / &kd;
            let delta = (&next - &r).abs();
            r = next;
            if delta <= &tol * &r.abs() {
                break;
            }
        }
        Ok(r.with_precision(prec))
    }

    fn div_at(&self, rhs: &Decimal, precision: u32) -> Decimal {
        assert!(!rhs.is_zero(), "decimal division by zero");
        if self.is_zero() {
            return Decimal::zero(precision);
        }
        let da = digit_count(self.mantissa.magnitude()) as i64;
        let db = digit_count(rhs.mantissa.magnitude()) as i64;
        let shift = (precision as i64 + 2 + db - da).max(0) as u64;
        let num = scale_up(&self.mantissa, shift);
        let (mut q, r) = num.div_rem(&rhs.mantissa);
        let mut exp = self.exponent - shift as i64 - rhs.exponent;
        if !r.is_zero() {
            // sticky digit keeps the rounding direction exact
            let sign = if self.mantissa.sign() == rhs.mantissa.sign() { 1 } else { -1 };
            q = q * 10 + sign;
            exp -= 1;
        }
        Decimal::from_parts(q, exp, precision)
    }

    fn add_at(&self, rhs: &Decimal, precision: u32) -> Decimal {
        if rhs.is_zero() {
            return self.with_precision(precision);
        }
        if self.is_zero() {
            return rhs.with_precision(precision);
        }
        let ta = self.magnitude().unwrap();
        let tb = rhs.magnitude().unwrap();
        let gap = precision as i64 + 2;
        // An operand far below the rounding position only matters through its sign.
        let (a, b) = if ta - tb > gap {
            (self.clone(), sticky(rhs, ta - gap))
        } else if tb - ta > gap {
            (sticky(self, tb - gap), rhs.clone())
        } else {
            (self.clone(), rhs.clone())
        };
        let e = a.exponent.min(b.exponent);
        let ma = scale_up(&a.mantissa, (a.exponent - e) as u64);
        let mb = scale_up(&b.mantissa, (b.exponent - e) as u64);
        Decimal::from_parts(ma + mb, e, precision)
    }
}

fn sticky(x: &Decimal, exponent: i64) -> Decimal {
    let unit = if x.is_negative() { -BigInt::one() } else { BigInt::one() };
    Decimal { mantissa: unit, exponent, precision: x.precision }
}

fn round_parts(mantissa: BigInt, exponent: i64, precision: u32) -> (BigInt, i64) {
    if mantissa.is_zero() {
        return (mantissa, 0);
    }
    let digits = digit_count(mantissa.magnitude());
    if digits <= precision as u64 {
        return (mantissa, exponent);
    }
    let drop = digits - precision as u64;
    let p = BigInt::from_biguint(Sign::Plus, pow10(drop));
    let (mut q, r) = mantissa.div_rem(&p);
    let twice = r.abs() * 2u32;
    let up = match twice.cmp(&p) {
        Ordering::Greater => true,
        Ordering::Equal => q.is_odd(),
        Ordering::Less => false,
    };
    if up {
        if mantissa.is_negative() {
            q -= 1;
        } else {
            q += 1;
        }
    }
    let mut exponent = exponent + drop as i64;
    if digit_count(q.magnitude()) > precision as u64 {
        q /= 10;
        exponent += 1;
    }
    (q, exponent)
}

impl PartialEq for Decimal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Decimal {}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mantissa.sign(), other.mantissa.sign());
        if sa != sb || sa == Sign::NoSign {
            return sa.cmp(&sb);
        }
        let (ta, tb) = (self.magnitude().unwrap(), other.magnitude().unwrap());
        let by_magnitude = if ta != tb { Some(ta.cmp(&tb)) } else { None };
        let ord = match by_magnitude {
            Some(o) => o,
            None => {
                let e = self.exponent.min(other.exponent);
                let ma = scale_up(&self.mantissa.abs(), (self.exponent - e) as u64);
                let mb = scale_up(&other.mantissa.abs(), (other.exponent - e) as u64);
                ma.cmp(&mb)
            }
        };
        if sa == Sign::Minus {
            ord.reverse()
        } else {
            ord
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a> $trait<&'a Decimal> for &'a Decimal {
            type Output = Decimal;
            fn $method(self, rhs: &'a Decimal) -> Decimal {
                let f: fn(&Decimal, &Decimal) -> Decimal = $body;
                f(self, rhs)
            }
        }
        impl $trait<Decimal> for Decimal {
            type Output = Decimal;
            fn $method(self, rhs: Decimal) -> Decimal {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Decimal> for Decimal {
            type Output = Decimal;
            fn $method(self, rhs: &'a Decimal) -> Decimal {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_at(b, a.precision.max(b.precision)));
forward_binop!(Sub, sub, |a, b| a.add_at(&-b, a.precision.max(b.precision)));
forward_binop!(Mul, mul, |a, b| Decimal::from_parts(
    &a.mantissa * &b.mantissa,
    a.exponent + b.exponent,
    a.precision.max(b.precision)
));
forward_binop!(Div, div, |a, b| a.div_at(b, a.precision.max(b.precision)));

impl Neg for &Decimal {
    type Output = Decimal;
    fn neg(self) -> Decimal {
        Decimal { mantissa: -&self.mantissa, exponent: self.exponent, precision: self.precision }
    }
}

impl Neg for Decimal {
    type Output = Decimal;
    fn neg(self) -> Decimal {
        -&self
    }
}

impl fmt::Debug for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Decimal({}e{}, prec={})", self.mantissa, self.exponent, self.precision)
    }
}

/// Positional notation for leading-digit exponents in `[-8, 30)`, scientific otherwise.
/// Trailing zeros of the mantissa are dropped.
impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut digits = self.mantissa.magnitude().to_str_radix(10);
        let mut exp = self.exponent;
        while digits.len() > 1 && digits.ends_with('0') {
            digits.pop();
            exp += 1;
        }
        let sign = if self.is_negative() { "-" } else { "" };
        let n = digits.len() as i64;
        let top = exp + n - 1;
        if (-8..30).contains(&top) {
            if exp >= 0 {
                write!(f, "{sign}{digits}{}", "0".repeat(exp as usize))
            } else if top >= 0 {
                let (int, frac) = digits.split_at((top + 1) as usize);
                write!(f, "{sign}{int}.{frac}")
            } else {
                write!(f, "{sign}0.{}{digits}", "0".repeat((-top - 1) as usize))
            }
        } else {
            let (lead, rest) = digits.split_at(1);
            if rest.is_empty() {
                write!(f, "{sign}{lead}e{top}")
            } else {
                write!(f, "{sign}{lead}.{rest}e{top}")
            }
        }
    }
}

/// Parses `[-+]digits[.digits][(e|E)[-+]digits]` exactly into a decimal whose
/// precision is the larger of the literal's digit count and [`MIN_PRECISION`].
impl FromStr for Decimal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mantissa, exponent) = parse_decimal_literal(s)?;
        let precision = digit_count(mantissa.magnitude()) as u32;
        Ok(Decimal::from_parts(mantissa, exponent, precision))
    }
}

pub(crate) fn parse_decimal_literal(s: &str) -> Result<(BigInt, i64)> {
    let bad = || Error::Parse(format!("not a decimal literal: {s:?}"));
    let s = s.trim();
    let (body, exp_part) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let (negative, body) = match body.as_bytes().first() {
        Some(b'-') => (true, &body[1..]),
        Some(b'+') => (false, &body[1..]),
        _ => (false, body),
    };
    let (int, frac) = match body.find('.') {
        Some(i) => (&body[..i], &body[i + 1..]),
        None => (body, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut exponent: i64 = match exp_part {
        Some(e) => e.parse().map_err(|_| bad())?,
        None => 0,
    };
    exponent -= frac.len() as i64;
    let joined = format!("{int}{frac}");
    let mut mantissa = BigInt::parse_bytes(joined.as_bytes(), 10).ok_or_else(bad)?;
    if negative {
        mantissa = -mantissa;
    }
    Ok((mantissa, exponent))
}

impl ToPrimitive for Decimal {
    fn to_i64(&self) -> Option<i64> {
        self.to_rational().to_integer().to_i64()
    }

    fn to_u64(&self) -> Option<u64> {
        self.to_rational().to_integer().to_u64()
    }

    fn to_f64(&self) -> Option<f64> {
        Some(Decimal::to_f64(self))
    }
}
