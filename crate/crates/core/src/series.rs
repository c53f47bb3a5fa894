//! Even powers of π as limits of nested sums.
//!
//! For every `n ≥ 1`
//!
//! ```text
//! (π/2)^{2n} / (2n)! = Σ_{ℓ_n ≥ n} Σ_{ℓ_{n-1} < ℓ_n} … Σ_{ℓ_1 < ℓ_2} u_{ℓ_1} ⋯ u_{ℓ_n}
//! ```
//!
//! with `u_ℓ = 1/(2ℓ-1)²`. All indices are truncated at a common `M`, which
//! gives `e_n(u_1, …, u_M)` and approaches the limit from below.
//!
//! The remainder consists of the tuples whose largest index exceeds `M`:
//!
//! ```text
//! e_n(∞) - e_n(M) = Σ_{ℓ > M} u_ℓ · e_{n-1}(u_1, …, u_{ℓ-1})
//!                 ≤ e_{n-1}(∞) · Σ_{ℓ > M} u_ℓ
//!                 ≤ e_{n-1}(∞) / (2(2M-1))
//! ```
//!
//! the last step by comparing the tail of `1/(2ℓ-1)²` with
//! `∫_M^∞ dx/(2x-1)²`.

use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use crate::constants::{check_digits, factorial, guarded, pi};
use crate::decimal::Decimal;
use crate::error::{Error, Result};
use crate::esp::{esp_dp, EspState};
use crate::number::{with_scalar, NumberMode, NumberValue, Scalar};
use crate::terms::{simple_partial_sum, term_as};

pub const TAIL_BOUND_NOTE: &str =
    "e_n(inf) - e_n(M) <= e_(n-1)(inf) * sum_(l>M) 1/(2l-1)^2 <= e_(n-1)(inf) / (2(2M-1))";

/// `(π/2)^{2n} / (2n)!` at a stated precision.
#[derive(Debug, Clone, PartialEq)]
pub struct PiTarget {
    pub n: u32,
    pub value: Decimal,
    pub digits: u32,
}

impl PiTarget {
    pub fn to_json(&self) -> serde_json::Value {
        json!({ "n": self.n, "digits": self.digits, "value": NumberValue::Decimal(self.value.clone()).to_json() })
    }
}

fn target_at(n: u32, work: u32) -> Result<Decimal> {
    let half_pi = &pi(work)? / &Decimal::from_int(2, work);
    let num = half_pi.powi(2 * n);
    let den = Decimal::from_parts(factorial(2 * n as u64), 0, work);
    Ok(&num / &den)
}

/// The limit `(π/2)^{2n}/(2n)!` of the order-`n` nested sum. `n = 0` gives 1.
pub fn target_value(n: u32, digits: u32) -> Result<PiTarget> {
    check_digits(digits)?;
    let value = target_at(n, guarded(digits))?.with_precision(digits);
    Ok(PiTarget { n, value, digits })
}

/// `e_n(u_1, …, u_M)`, zero when `M < n`.
pub fn nested_partial(n: usize, m: u64, mode: &NumberMode) -> Result<NumberValue> {
    if n == 0 {
        return Err(Error::InvalidArgument("order n must be at least 1".into()));
    }
    let state = esp_dp(m, n, mode)?;
    Ok(state.coefficients()[n].clone())
}

/// Rigorous upper bound `e_{n-1}(∞)/(2(2M-1))` on `e_n(∞) - e_n(M)`.
pub fn tail_bound(n: u32, m: u64, digits: u32) -> Result<Decimal> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("tail bound needs n >= 1 and M >= 1".into()));
    }
    check_digits(digits)?;
    let work = guarded(digits);
    Ok(tail_bound_at(n, m, work)?.with_precision(digits))
}

fn tail_bound_at(n: u32, m: u64, work: u32) -> Result<Decimal> {
    let previous = target_at(n - 1, work)?;
    let denom = Decimal::from_parts(BigInt::from(m) * 4u32 - 2u32, 0, work);
    Ok(&previous / &denom)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n: u32,
    pub m: u64,
    #[serde(serialize_with = "ser_mode")]
    pub mode: NumberMode,
    pub computed: NumberValue,
    #[serde(serialize_with = "ser_target")]
    pub target: PiTarget,
    #[serde(serialize_with = "ser_decimal")]
    pub tail_bound: Decimal,
    #[serde(serialize_with = "ser_decimal")]
    pub abs_error: Decimal,
    #[serde(serialize_with = "ser_decimal")]
    pub rel_error: Decimal,
    pub bracket_ok: bool,
    #[serde(serialize_with = "ser_decimal")]
    pub pi_estimate: Decimal,
    pub elapsed_seconds: f64,
    pub bound: &'static str,
}

fn ser_mode<S: serde::Serializer>(m: &NumberMode, s: S) -> std::result::Result<S::Ok, S::Error> {
    mode_json(m).serialize(s)
}

fn ser_target<S: serde::Serializer>(t: &PiTarget, s: S) -> std::result::Result<S::Ok, S::Error> {
    t.to_json().serialize(s)
}

fn ser_decimal<S: serde::Serializer>(d: &Decimal, s: S) -> std::result::Result<S::Ok, S::Error> {
    NumberValue::Decimal(d.clone()).to_json().serialize(s)
}

pub fn mode_json(m: &NumberMode) -> serde_json::Value {
    match m.digits() {
        Some(d) => json!({ "kind": m.kind().name(), "digits": d }),
        None => json!({ "kind": m.kind().name() }),
    }
}

/// Brackets the order-`n` identity at truncation `m`.
///
/// `pi_estimate` inverts the identity at the midpoint of the bracket,
/// `2·((2n)!·(computed + tail/2))^{1/(2n)}`; the bracket itself is the
/// rigorous statement.
pub fn verify(n: u32, m: u64, mode: &NumberMode, digits: u32) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("order n must be at least 1".into()));
    }
    if m < n as u64 {
        return Err(Error::InvalidArgument(format!("need M >= n, got M={m}, n={n}")));
    }
    check_digits(digits)?;
    let start = Instant::now();
    let computed = nested_partial(n as usize, m, mode)?;
    let work = guarded(digits);
    let parts = bracket(n, m, &computed, work)?;
    let elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(VerificationReport {
        n,
        m,
        mode: *mode,
        computed,
        target: PiTarget { n, value: parts.target.with_precision(digits), digits },
        tail_bound: parts.tail.with_precision(digits),
        abs_error: parts.abs_error.with_precision(digits),
        rel_error: parts.rel_error.with_precision(digits),
        bracket_ok: parts.ok,
        pi_estimate: parts.pi_estimate.with_precision(digits),
        elapsed_seconds,
        bound: TAIL_BOUND_NOTE,
    })
}

struct Bracket {
    target: Decimal,
    tail: Decimal,
    abs_error: Decimal,
    rel_error: Decimal,
    ok: bool,
    pi_estimate: Decimal,
}

fn bracket(n: u32, m: u64, computed: &NumberValue, work: u32) -> Result<Bracket> {
    let target = target_at(n, work)?;
    let tail = tail_bound_at(n, m, work)?;
    let c = computed.to_decimal(work);
    let upper = &c + &tail;
    let ok = c <= target && target <= upper;
    let abs_error = &target - &c;
    let rel_error = &abs_error / &target;
    let mid = &c + &(&tail / &Decimal::from_int(2, work));
    let scaled = &mid * &Decimal::from_parts(factorial(2 * n as u64), 0, work);
    let pi_estimate = &Decimal::from_int(2, work) * &scaled.nth_root(2 * n)?;
    Ok(Bracket { target, tail, abs_error, rel_error, ok, pi_estimate })
}

/// Detailed outcome of [`majorant_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantOutcome {
    /// `e_n(M)`
    pub nested: NumberValue,
    /// `(Σ_{ℓ≤M} u_ℓ)^n`, the unordered `n`-fold grid over indices `≤ M`
    pub grid: NumberValue,
    /// `e_n(M) < grid` (`≤` when `n = 1`, where both sums coincide)
    pub below_grid: bool,
    /// `e_n(M) < (π²/8)^n`
    pub below_limit: bool,
}

impl MajorantOutcome {
    pub fn holds(&self) -> bool {
        self.below_grid && self.below_limit
    }
}

pub fn majorant_outcome(n: u32, m: u64, mode: &NumberMode) -> Result<MajorantOutcome> {
    if n == 0 || m < n as u64 {
        return Err(Error::InvalidArgument(format!("need M >= n >= 1, got M={m}, n={n}")));
    }
    let nested = nested_partial(n as usize, m, mode)?;
    let p1 = simple_partial_sum(m, mode)?;
    let mut grid = NumberValue::one_in(mode);
    for _ in 0..n {
        grid = grid * p1.clone();
    }
    let below_grid = if n == 1 { nested <= grid } else { nested < grid };

    const DIGITS: u32 = 40;
    let limit = target_at(1, DIGITS)?.powi(n);
    let below_limit = nested.to_decimal(DIGITS) < limit;
    Ok(MajorantOutcome { nested, grid, below_grid, below_limit })
}

/// Finite form of the comparison `e_n(∞) < (π²/8)^n`: checks
/// `e_n(M) < (p_1(M))^n` in `mode` and `e_n(M) < (π²/8)^n` numerically.
pub fn majorant_check(n: u32, m: u64, mode: &NumberMode) -> Result<bool> {
    Ok(majorant_outcome(n, m, mode)?.holds())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub m: u64,
    pub computed: NumberValue,
    pub abs_error: Decimal,
    pub tail_bound: Decimal,
    pub bracket_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub n: u32,
    pub mode: NumberMode,
    pub digits: u32,
    pub target: PiTarget,
    pub rows: Vec<ConvergenceRow>,
}

/// One DP pass up to the last checkpoint, snapshotting `e_n` on the way.
pub fn convergence_report(
    n: u32,
    checkpoints: &[u64],
    mode: &NumberMode,
    digits: u32,
) -> Result<ConvergenceTable> {
    if n == 0 {
        return Err(Error::InvalidArgument("order n must be at least 1".into()));
    }
    if checkpoints.is_empty() {
        return Err(Error::InvalidArgument("no checkpoints given".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be strictly increasing".into()));
    }
    if checkpoints[0] < n as u64 {
        return Err(Error::InvalidArgument("checkpoints must start at M >= n".into()));
    }
    check_digits(digits)?;
    let work = guarded(digits);
    let computed: Vec<NumberValue> = with_scalar!(mode, S => snapshots::<S>(n as usize, checkpoints, mode)?);
    let rows = checkpoints
        .iter()
        .zip(computed)
        .map(|(&m, computed)| {
            let b = bracket(n, m, &computed, work)?;
            Ok(ConvergenceRow {
                m,
                computed,
                abs_error: b.abs_error.with_precision(digits),
                tail_bound: b.tail.with_precision(digits),
                bracket_ok: b.ok,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { n, mode: *mode, digits, target: target_value(n, digits)?, rows })
}

fn snapshots<S: Scalar>(n: usize, checkpoints: &[u64], mode: &NumberMode) -> Result<Vec<NumberValue>> {
    let mut state = EspState::<S>::empty(n, *mode);
    let mut out = Vec::with_capacity(checkpoints.len());
    for &cp in checkpoints {
        for index in state.consumed() + 1..=cp {
            state.push(term_as::<S>(index, mode)?);
        }
        out.push(state.coefficients()[n].clone().into_value());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(p: i64, d: i64) -> NumberValue {
        NumberValue::Rational(BigRational::new(p.into(), d.into()))
    }

    fn dec(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn targets() {
        let t1 = target_value(1, 17).unwrap();
        assert_eq!(t1.value, dec("1.2337005501361698"));
        let t2 = target_value(2, 17).unwrap();
        assert_eq!(t2.value, dec("0.25366950790104801"));
        let t3 = target_value(3, 14).unwrap();
        assert_eq!(t3.value, dec("0.020863480763353"));
        assert!(target_value(1, 101).is_err());
        // 2^{2n}·target = π^{2n}/(2n)!
        let t = target_value(4, 60).unwrap();
        let p = pi(70).unwrap().powi(8);
        let lhs = &t.value * &Decimal::from_int(256, 70);
        let rhs = &p / &Decimal::from_parts(factorial(8), 0, 70);
        assert_eq!(lhs.with_precision(58), rhs.with_precision(58));
    }

    #[test]
    fn targets_decrease() {
        let mut prev = target_value(1, 30).unwrap().value;
        for n in 2..=16 {
            let t = target_value(n, 30).unwrap().value;
            assert!(t.is_positive() && t < prev, "n={n}");
            prev = t;
        }
    }

    #[test]
    fn partial_examples() {
        let r = NumberMode::rational();
        assert_eq!(nested_partial(2, 2, &r).unwrap(), q(1, 9));
        assert_eq!(nested_partial(3, 3, &r).unwrap(), q(1, 225));
        assert_eq!(nested_partial(3, 2, &r).unwrap(), q(0, 1));
        assert!(nested_partial(0, 2, &r).is_err());
    }

    #[test]
    fn tail_bound_examples() {
        assert_eq!(tail_bound(1, 1, 30).unwrap(), dec("0.5"));
        let b = tail_bound(1, 100_000, 30).unwrap();
        assert_eq!(b, Decimal::from_ratio(&1.into(), &399_998.into(), 30));
        assert!(b.to_f64() < 2.5001e-6);
        let b = tail_bound(2, 1000, 20).unwrap().to_f64();
        assert!((b - 1.2337005501361698 / 3998.0).abs() < 1e-15);
        assert!((b - 3.086e-4).abs() < 1e-6);
        assert!(tail_bound(0, 5, 20).is_err());
        assert!(tail_bound(1, 0, 20).is_err());
    }

    #[test]
    fn verify_small() {
        let rep = verify(5, 5, &NumberMode::rational(), 30).unwrap();
        assert_eq!(rep.computed, q(1, 893_025));
        assert!(rep.bracket_ok);
        assert!(!rep.abs_error.is_negative());
        let rep = verify(2, 2, &NumberMode::rational(), 50).unwrap();
        assert_eq!(rep.computed, q(1, 9));
        assert!(rep.bracket_ok);
        assert!(verify(2, 1, &NumberMode::rational(), 50).is_err());
    }

    #[test]
    fn verify_n2_at_1e4() {
        let rep = verify(2, 10_000, &NumberMode::f64(), 50).unwrap();
        assert!(rep.bracket_ok);
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["mode"]["kind"], "f64");
        assert_eq!(json["bracket_ok"], true);
        assert_eq!(json["target"]["value"]["digits"], 50);
    }

    #[test]
    fn majorant_examples() {
        let r = NumberMode::rational();
        let out = majorant_outcome(2, 2, &r).unwrap();
        assert_eq!(out.grid, q(100, 81));
        assert!(out.holds());
        assert!(majorant_check(1, 7, &r).unwrap());
        assert!(majorant_check(3, 5, &r).unwrap());
        assert!(majorant_check(0, 5, &r).is_err());
    }

    #[test]
    fn convergence_examples() {
        let r = NumberMode::rational();
        let t = convergence_report(2, &[2, 3, 4], &r, 30).unwrap();
        let got: Vec<_> = t.rows.iter().map(|row| row.computed.clone()).collect();
        assert_eq!(got, vec![q(1, 9), q(7, 45), q(94, 525)]);
        assert!(t.rows.iter().all(|row| row.bracket_ok));
        assert!(t.rows.windows(2).all(|w| w[1].abs_error <= w[0].abs_error));
        let t = convergence_report(1, &[1], &r, 30).unwrap();
        assert_eq!(t.rows[0].computed, q(1, 1));
        assert!(convergence_report(2, &[3, 3], &r, 30).is_err());
        assert!(convergence_report(2, &[1, 3], &r, 30).is_err());
    }
}
