//! Truncated elementary symmetric polynomials `e_k(u_1, …, u_M)`.
//!
//! Three independent routes to the same numbers:
//!
//! * [`esp_dp`]: multiply the factors `(1 + u_ℓ t)` in one at a time, an
//!   `O(M·n)` recurrence;
//! * [`esp_newton`]: Newton's identities applied to the power sums
//!   `p_j = Σ u_ℓ^j`;
//! * [`esp_bruteforce`]: the nested sums over `1 ≤ ℓ_1 < … < ℓ_k ≤ M`,
//!   enumerated literally.
//!
//! In rational mode the three agree exactly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::number::{with_scalar, NumberMode, NumberValue, Scalar};
use crate::terms::term_as;

/// Maximum number of index tuples [`esp_bruteforce`] will enumerate.
pub const BRUTEFORCE_LIMIT: u128 = 2_000_000;

/// Relative size below which a Newton result is flagged as cancelled.
pub const CANCELLATION_RATIO: f64 = 1e-12;

/// Coefficients `e_0 … e_n` of `∏_{ℓ≤M} (1 + u_ℓ t)` truncated at `t^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EspState<S = NumberValue> {
    consumed: u64,
    mode: NumberMode,
    e: Vec<S>,
}

impl<S: Scalar> EspState<S> {
    /// The empty product: `e_0 = 1`, every other coefficient zero.
    pub fn empty(max_order: usize, mode: NumberMode) -> Self {
        let mut e = vec![S::zero_in(&mode); max_order + 1];
        e[0] = S::one_in(&mode);
        EspState { consumed: 0, mode, e }
    }

    /// Number of terms folded in so far (`M`).
    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn max_order(&self) -> usize {
        self.e.len() - 1
    }

    pub fn mode(&self) -> NumberMode {
        self.mode
    }

    pub fn coefficients(&self) -> &[S] {
        &self.e
    }

    pub fn get(&self, k: usize) -> Option<&S> {
        self.e.get(k)
    }

    pub fn into_coefficients(self) -> Vec<S> {
        self.e
    }

    /// Multiplies in one more factor `(1 + next·t)` in place.
    ///
    /// Walks `k` downwards so every update reads the pre-update `e_{k-1}`.
    pub fn push(&mut self, next: S) {
        let n = self.max_order();
        let live = n.min(self.consumed as usize + 1);
        for k in (1..=live).rev() {
            let add = next.clone() * self.e[k - 1].clone();
            let cur = std::mem::replace(&mut self.e[k], add.clone());
            self.e[k] = cur + add;
        }
        self.consumed += 1;
    }

    /// Cauchy product of two blocks: `e_k = Σ_i a_i · b_{k-i}`, truncated at the
    /// common order.
    pub fn merge(&self, other: &EspState<S>) -> EspState<S> {
        let n = self.max_order().min(other.max_order());
        let mut e = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = S::zero_in(&self.mode);
            for i in 0..=k {
                let (a, b) = (&self.e[i], &other.e[k - i]);
                if a.is_zero_value() || b.is_zero_value() {
                    continue;
                }
                acc = acc + a.clone() * b.clone();
            }
            e.push(acc);
        }
        EspState { consumed: self.consumed + other.consumed, mode: self.mode, e }
    }

    pub fn into_values(self) -> EspState<NumberValue> {
        EspState {
            consumed: self.consumed,
            mode: self.mode,
            e: self.e.into_iter().map(S::into_value).collect(),
        }
    }
}

/// Pure form of [`EspState::push`].
pub fn esp_extend<S: Scalar>(state: &EspState<S>, next_term: S) -> Result<EspState<S>> {
    if next_term.partial_cmp(&S::zero_in(&state.mode)) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidArgument("appended term must be positive".into()));
    }
    let mut next = state.clone();
    next.push(next_term);
    Ok(next)
}

pub fn esp_dp_as<S: Scalar>(m: u64, n: usize, mode: &NumberMode) -> Result<EspState<S>> {
    esp_range_as(1, m, n, mode)
}

/// DP over the terms `u_first … u_last` (an empty range gives the empty product).
fn esp_range_as<S: Scalar>(first: u64, last: u64, n: usize, mode: &NumberMode) -> Result<EspState<S>> {
    let mut state = EspState::<S>::empty(n, *mode);
    for index in first..=last {
        state.push(term_as::<S>(index, mode)?);
    }
    Ok(state)
}

/// `e_0 … e_n` over the first `m` terms by the linear recurrence.
pub fn esp_dp(m: u64, n: usize, mode: &NumberMode) -> Result<EspState> {
    with_scalar!(mode, S => esp_dp_as::<S>(m, n, mode).map(EspState::into_values))
}

pub fn esp_blocked_as<S: Scalar>(m: u64, n: usize, block: u64, mode: &NumberMode) -> Result<EspState<S>> {
    if block == 0 {
        return Err(Error::InvalidArgument("block size must be positive".into()));
    }
    let blocks = m.div_ceil(block);
    let parts = (0..blocks)
        .into_par_iter()
        .map(|b| esp_range_as::<S>(b * block + 1, ((b + 1) * block).min(m), n, mode))
        .collect::<Result<Vec<_>>>()?;
    // sequential left fold keeps the reduction order fixed
    Ok(parts.iter().fold(EspState::empty(n, *mode), |acc, part| acc.merge(part)))
}

/// Parallel evaluation over fixed-size blocks, merged left to right so the
/// result is identical from run to run and independent of thread count.
pub fn esp_blocked(m: u64, n: usize, block: u64, mode: &NumberMode) -> Result<EspState> {
    with_scalar!(mode, S => esp_blocked_as::<S>(m, n, block, mode).map(EspState::into_values))
}

/// Power sums `p_1 … p_n` over the first `M` terms.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSumVector<S = NumberValue> {
    pub m: u64,
    /// `p[j-1] = Σ_{ℓ≤M} u_ℓ^j`
    pub p: Vec<S>,
}

impl<S> PowerSumVector<S> {
    /// `p_j` for `j ≥ 1`.
    pub fn get(&self, j: usize) -> Option<&S> {
        j.checked_sub(1).and_then(|i| self.p.get(i))
    }
}

pub fn power_sums_as<S: Scalar>(m: u64, n: usize, mode: &NumberMode) -> Result<PowerSumVector<S>> {
    let mut sums = vec![S::zero_in(mode); n];
    let mut comps = vec![S::zero_in(mode); n];
    for index in 1..=m {
        let t = term_as::<S>(index, mode)?;
        let mut pow = t.clone();
        for j in 0..n {
            S::accumulate(&mut sums[j], &mut comps[j], pow.clone());
            if j + 1 < n {
                pow = pow * t.clone();
            }
        }
    }
    let p = sums.into_iter().zip(comps).map(|(s, c)| s + c).collect();
    Ok(PowerSumVector { m, p })
}

pub fn power_sums(m: u64, n: usize, mode: &NumberMode) -> Result<PowerSumVector> {
    with_scalar!(mode, S => power_sums_as::<S>(m, n, mode).map(|ps| PowerSumVector {
        m: ps.m,
        p: ps.p.into_iter().map(S::into_value).collect(),
    }))
}

/// Result of [`esp_newton`].
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutput<S = NumberValue> {
    /// `e_0 … e_n`
    pub e: Vec<S>,
    /// Orders `k` whose value lost most of its digits to cancellation (float modes only).
    pub cancellation: Vec<usize>,
}

pub fn esp_newton_as<S: Scalar>(m: u64, n: usize, mode: &NumberMode) -> Result<NewtonOutput<S>> {
    let ps = power_sums_as::<S>(m, n, mode)?;
    newton_from_power_sums(&ps, mode)
}

/// `k·e_k = Σ_{i=1}^{k} (-1)^{i-1} e_{k-i} p_i`.
pub fn newton_from_power_sums<S: Scalar>(ps: &PowerSumVector<S>, mode: &NumberMode) -> Result<NewtonOutput<S>> {
    let n = ps.p.len();
    let mut e = Vec::with_capacity(n + 1);
    e.push(S::one_in(mode));
    let mut cancellation = Vec::new();
    for k in 1..=n {
        let mut acc = S::zero_in(mode);
        let mut largest = 0.0f64;
        for i in 1..=k {
            let t = e[k - i].clone() * ps.p[i - 1].clone();
            largest = largest.max(t.to_f64_value().abs());
            acc = if i % 2 == 1 { acc + t } else { acc - t };
        }
        let mut ek = acc / S::from_int(k as i64, mode);
        if !ek.is_exact_value() {
            if k as u64 > ps.m {
                // e_k vanishes identically past M; only rounding noise is left
                ek = S::zero_in(mode);
            } else if ek.to_f64_value().abs() < CANCELLATION_RATIO * largest {
                cancellation.push(k);
            }
        }
        e.push(ek);
    }
    Ok(NewtonOutput { e, cancellation })
}

/// `e_0 … e_n` via Newton's identities from the power sums.
pub fn esp_newton(m: u64, n: usize, mode: &NumberMode) -> Result<NewtonOutput> {
    with_scalar!(mode, S => esp_newton_as::<S>(m, n, mode).map(|out| NewtonOutput {
        e: out.e.into_iter().map(S::into_value).collect(),
        cancellation: out.cancellation,
    }))
}

/// `C(m, k)` saturating at `u128::MAX`.
pub fn binomial(m: u64, k: u64) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc = C(m, i) before the update
        acc = match acc.checked_mul((m - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Index tuples visited by [`esp_bruteforce`]: `Σ_{k=1}^{n} C(M, k)`.
pub fn tuple_count(m: u64, n: usize) -> u128 {
    (1..=n as u64).fold(0u128, |acc, k| acc.saturating_add(binomial(m, k)))
}

pub fn check_bruteforce_guard(m: u64, n: usize) -> Result<u128> {
    let tuples = tuple_count(m, n);
    if tuples > BRUTEFORCE_LIMIT {
        return Err(Error::LimitExceeded { m, n, tuples, limit: BRUTEFORCE_LIMIT });
    }
    Ok(tuples)
}

pub fn esp_bruteforce_as<S: Scalar>(m: u64, n: usize, mode: &NumberMode) -> Result<Vec<S>> {
    check_bruteforce_guard(m, n)?;
    let terms = (1..=m).map(|i| term_as::<S>(i, mode)).collect::<Result<Vec<S>>>()?;
    let one = S::one_in(mode);
    let mut e = Vec::with_capacity(n + 1);
    e.push(one.clone());
    for k in 1..=n {
        let mut acc = S::zero_in(mode);
        if k as u64 <= m {
            nested_sum(&terms, k, m as usize, &one, &mut acc);
        }
        e.push(acc);
    }
    Ok(e)
}

/// One level of the nested sum: `ℓ_depth` runs from `depth` to `upper`, and the
/// next level inward is bounded by `ℓ_depth - 1`.
fn nested_sum<S: Scalar>(terms: &[S], depth: usize, upper: usize, partial: &S, acc: &mut S) {
    for l in depth..=upper {
        let p = partial.clone() * terms[l - 1].clone();
        if depth == 1 {
            let s = std::mem::replace(acc, p.clone());
            *acc = s + p;
        } else {
            nested_sum(terms, depth - 1, l - 1, &p, acc);
        }
    }
}

/// `e_0 … e_n` by literal enumeration of strictly increasing index tuples.
/// Refuses inputs needing more than [`BRUTEFORCE_LIMIT`] tuples.
pub fn esp_bruteforce(m: u64, n: usize, mode: &NumberMode) -> Result<Vec<NumberValue>> {
    with_scalar!(mode, S => esp_bruteforce_as::<S>(m, n, mode)
        .map(|v| v.into_iter().map(S::into_value).collect()))
}
