//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use pi_esp::cli::{cmd_bench, Engine, ModeArg};
use pi_esp::constants::pi;
use pi_esp::esp::esp_dp_as;
use pi_esp::series::majorant_check;
use pi_esp::{
    cos_reference, esp_bruteforce, esp_dp, esp_newton, eval_poly, eval_product, expand_product, nested_partial,
    tail_bound, target_value, verify, Decimal, NumberMode, NumberValue,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = fn() -> Check;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

fn u(l: i64) -> BigRational {
    q(1, (2 * l - 1) * (2 * l - 1))
}

fn rat(v: NumberValue) -> BigRational {
    v.as_rational().expect("rational mode").clone()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn partial_sum_fixtures() -> Check {
    let r = NumberMode::rational();
    let fixtures: Vec<(usize, u64, BigRational)> = vec![
        (2, 2, q(1, 9)),
        (2, 3, q(1, 9) + q(1, 25) + q(1, 225)),
        (2, 4, u(1) * u(2) + u(1) * u(3) + u(1) * u(4) + u(2) * u(3) + u(2) * u(4) + u(3) * u(4)),
        (3, 3, q(1, 225)),
        (3, 4, u(1) * u(2) * u(3) + u(1) * u(2) * u(4) + u(1) * u(3) * u(4) + u(2) * u(3) * u(4)),
        (
            3,
            5,
            [(1, 2, 3), (1, 2, 4), (1, 2, 5), (1, 3, 4), (1, 3, 5), (1, 4, 5), (2, 3, 4), (2, 3, 5), (2, 4, 5), (3, 4, 5)]
                .iter()
                .map(|&(a, b, c)| u(a) * u(b) * u(c))
                .sum(),
        ),
    ];
    for (n, m, expected) in &fixtures {
        let got = rat(nested_partial(*n, *m, &r).map_err(|e| e.to_string())?);
        let brute = rat(esp_bruteforce(*m, *n, &r).map_err(|e| e.to_string())?.swap_remove(*n));
        ensure(got == *expected && brute == *expected, || {
            format!("n={n} M={m}: nested {got}, bruteforce {brute}, expected {expected}")
        })?;
    }
    Ok(format!("{} fixtures equal exactly (e.g. n=2 M=4 -> {})", fixtures.len(), fixtures[2].2))
}

fn oracle_equivalence() -> Check {
    let r = NumberMode::rational();
    let mut pairs = 0;
    for m in 1..=12u64 {
        for n in 1..=5usize {
            let dp = esp_dp(m, n, &r).map_err(|e| e.to_string())?.into_coefficients();
            let newton = esp_newton(m, n, &r).map_err(|e| e.to_string())?.e;
            let brute = esp_bruteforce(m, n, &r).map_err(|e| e.to_string())?;
            for k in 0..=n {
                ensure(dp[k] == newton[k] && dp[k] == brute[k], || {
                    format!("M={m} n={n} k={k}: dp {} newton {} brute {}", dp[k], newton[k], brute[k])
                })?;
            }
            pairs += 1;
        }
    }
    ensure(pairs >= 60, || format!("only {pairs} pairs"))?;
    Ok(format!("{pairs} (M,n) pairs, dp = newton = bruteforce"))
}

fn limit_bracketing() -> Check {
    let mode = NumberMode::decimal(50).map_err(|e| e.to_string())?;
    let m = 10_000;
    let mut worst = 0.0f64;
    for n in 1..=5u32 {
        let c = nested_partial(n as usize, m, &mode).map_err(|e| e.to_string())?.to_decimal(50);
        let target = target_value(n, 50).map_err(|e| e.to_string())?.value;
        let tail = tail_bound(n, m, 50).map_err(|e| e.to_string())?;
        ensure(c <= target && target <= &c + &tail, || format!("n={n}: bracket violated, c={c} target={target} tail={tail}"))?;
        let ratio = (&tail / &target).to_f64();
        ensure(ratio <= 1e-3, || format!("n={n}: tail/target = {ratio:e}"))?;
        worst = worst.max(ratio);
    }
    Ok(format!("n=1..5 at M=1e4 bracketed, max tail/target = {worst:.3e}"))
}

fn pi_recovery() -> Check {
    let mode = NumberMode::decimal(50).map_err(|e| e.to_string())?;
    let rep = verify(1, 100_000, &mode, 50).map_err(|e| e.to_string())?;
    let err = (&rep.pi_estimate - &pi(50).map_err(|e| e.to_string())?).abs();
    let tol = Decimal::from_ratio(&1.into(), &100_000.into(), 50);
    ensure(err <= tol, || format!("pi_estimate {} off by {err}", rep.pi_estimate))?;
    Ok(format!("pi_estimate {} within {:.3e}", rep.pi_estimate, err.to_f64()))
}

fn product_series_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let f = NumberMode::f64();
    let r = NumberMode::rational();
    let mut worst = 0.0f64;
    let mut exact_checks = 0;
    for m in [5u64, 12, 20] {
        let poly_f = expand_product(m, None, &f).map_err(|e| e.to_string())?;
        let poly_r = expand_product(m, None, &r).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let x: f64 = rng.random_range(-0.45..=0.45);
            let xv = NumberValue::Float(x);
            let p = eval_product(m, &xv, &f).map_err(|e| e.to_string())?.to_f64();
            let s = eval_poly(&poly_f, &xv).map_err(|e| e.to_string())?.to_f64();
            let rel = ((p - s) / p).abs();
            ensure(rel <= 1e-12, || format!("M={m} x={x}: product {p} poly {s} rel {rel:e}"))?;
            worst = worst.max(rel);

            if m <= 12 {
                let xr = NumberValue::Rational(q(rng.random_range(-450..=450), 1000));
                let p = eval_product(m, &xr, &r).map_err(|e| e.to_string())?;
                let s = eval_poly(&poly_r, &xr).map_err(|e| e.to_string())?;
                ensure(p == s, || format!("M={m} x={xr}: product {p} != poly {s}"))?;
                exact_checks += 1;
            }
        }
    }
    Ok(format!("60 f64 points, max rel diff {worst:.2e}; {exact_checks} rational points exact"))
}

fn cosine_convergence() -> Check {
    let f = NumberMode::f64();
    let mut worst = 0.0f64;
    for (p, d) in [(1, 10), (1, 4), (3, 10), (49, 100)] {
        let exact = NumberValue::Rational(q(p, d));
        let cos = cos_reference(&exact, 50).map_err(|e| e.to_string())?.to_f64();
        let x = NumberValue::Float(p as f64 / d as f64);
        let mut prev = f64::INFINITY;
        for m in [10u64, 100, 1_000, 10_000] {
            let err = (eval_product(m, &x, &f).map_err(|e| e.to_string())?.to_f64() - cos).abs();
            ensure(err < prev, || format!("x={p}/{d}: error {err:e} at M={m} not below {prev:e}"))?;
            prev = err;
        }
        ensure(prev <= 1e-3, || format!("x={p}/{d}: error {prev:e} at M=1e4"))?;
        worst = worst.max(prev);
    }
    Ok(format!("errors decrease over M=10..1e4, max at 1e4 = {worst:.3e}"))
}

fn majorant_property() -> Check {
    let r = NumberMode::rational();
    let d = NumberMode::decimal(50).map_err(|e| e.to_string())?;
    let mut checks = 0;
    for n in 1..=5u32 {
        for m in n as u64..=200 {
            let mode = if m <= 50 { &r } else { &d };
            ensure(majorant_check(n, m, mode).map_err(|e| e.to_string())?, || format!("fails at n={n} M={m}"))?;
            checks += 1;
        }
        let e = nested_partial(n as usize, 10_000, &NumberMode::f64()).map_err(|e| e.to_string())?.to_f64();
        let bound = (std::f64::consts::PI.powi(2) / 8.0).powi(n as i32);
        ensure(e < bound, || format!("n={n}: e_n(1e4) = {e} not below {bound}"))?;
    }
    Ok(format!("{checks} (n,M) pairs plus M=1e4 limit comparison"))
}

fn performance() -> Check {
    let f = NumberMode::f64();
    let start = Instant::now();
    let e = esp_dp_as::<f64>(100_000, 5, &f).map_err(|e| e.to_string())?.into_coefficients()[5];
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("dp n=5 M=1e5 took {secs:.3}s"))?;

    let mut compared = 0;
    for (n, ms) in [(2u32, vec![10u64, 100, 1000]), (3, vec![10, 50, 100]), (5, vec![10, 20, 30])] {
        let (code, report) = cmd_bench(n, &ms, &[Engine::NaiveNested, Engine::Dp], 1, ModeArg::F64, 50)
            .map_err(|e| e.to_string())?;
        ensure(code == 0 && report.results["all_agree"] == true, || format!("bench n={n} disagrees"))?;
        compared += report.results["rows"]
            .as_array()
            .map_or(0, |rows| rows.iter().filter(|r| r["engine"] == "naive" && r.get("value").is_some()).count());
    }
    Ok(format!("dp n=5 M=1e5 in {secs:.4}s (e_5 = {e:.6e}); naive = dp to 1e-9 on {compared} feasible runs"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("partial-sum fixtures", partial_sum_fixtures),
        ("oracle equivalence", oracle_equivalence),
        ("limit bracketing", limit_bracketing),
        ("pi recovery", pi_recovery),
        ("product/series identity", product_series_identity),
        ("cosine convergence", cosine_convergence),
        ("majorant property", majorant_property),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("AC{} PASS {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("AC{} FAIL {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
