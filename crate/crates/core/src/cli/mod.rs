//! Command-line front end.
//!
//! Exit codes: `0` success, `1` a check failed (bracket violated, engines
//! disagree), `2` invalid arguments.

pub mod output;

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::constants::PI_DIGITS;
use crate::error::{Error, Result};
use crate::esp::{check_bruteforce_guard, esp_bruteforce, esp_dp, esp_newton};
use crate::number::{format_rational, parse_exact, NumberKind, NumberMode, NumberValue, DEFAULT_DECIMAL_DIGITS};
use crate::polyproduct::{cos_reference, eval_poly, eval_product, expand_product};
use crate::series::{mode_json, nested_partial, tail_bound, target_value, verify};

pub use output::{OutputFormat, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest order accepted by `verify` and `bench`.
pub const MAX_ORDER: u32 = 16;

/// Relative agreement required between bench engines.
pub const BENCH_AGREEMENT: f64 = 1e-9;

/// Relative agreement required between product and expanded polynomial in `f64`.
pub const F64_IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "pi-esp", version, about = "Nested-sum series for even powers of pi")]
pub struct Cli {
    /// Output format [default: table on a terminal, json otherwise]
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Significant digits for decimal arithmetic and reference values
    #[arg(long, global = true, env = "PI_ESP_DIGITS", default_value_t = DEFAULT_DECIMAL_DIGITS)]
    pub digits: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Rational,
    F64,
    Decimal,
}

impl ModeArg {
    fn resolve(self, digits: u32) -> Result<NumberMode> {
        match self {
            ModeArg::Rational => Ok(NumberMode::rational()),
            ModeArg::F64 => Ok(NumberMode::f64()),
            ModeArg::Decimal => NumberMode::decimal(digits),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Engine {
    #[value(name = "naive")]
    NaiveNested,
    #[value(name = "dp")]
    Dp,
    #[value(name = "newton")]
    Newton,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::NaiveNested => "naive",
            Engine::Dp => "dp",
            Engine::Newton => "newton",
        }
    }
}

#[derive(Debug, Args)]
pub struct OrderAndTerms {
    /// Order n of the nested sum
    #[arg(short = 'n', value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,

    /// Number of terms M
    #[arg(short = 'M')]
    pub m: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Truncated nested sum e_n(u_1..u_M)
    Partial {
        #[command(flatten)]
        at: OrderAndTerms,
        /// Arithmetic [default: rational]
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Bracket (pi/2)^(2n)/(2n)! between e_n(M) and e_n(M) + tail bound
    Verify {
        #[command(flatten)]
        at: OrderAndTerms,
        /// Arithmetic [default: decimal]
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Expand prod_(k<=M) (1 - x^2/(k-1/2)^2) and optionally evaluate it
    Expand {
        /// Number of factors M
        #[arg(short = 'M')]
        m: u64,
        /// Highest power of x^2 to keep [default: M]
        #[arg(long)]
        order: Option<usize>,
        /// Comma-separated points x to evaluate product, polynomial and cos(pi x) at
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eval: Vec<String>,
        /// Arithmetic [default: f64]
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Compare DP, Newton and literal enumeration exactly
    Oracle {
        #[command(flatten)]
        at: OrderAndTerms,
    },
    /// Time the engines against each other
    Bench {
        /// Order n of the nested sum
        #[arg(short = 'n', value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Comma-separated term counts M
        #[arg(short = 'M', value_delimiter = ',', required = true)]
        m: Vec<u64>,
        /// Comma-separated engines
        #[arg(long, value_enum, value_delimiter = ',', default_value = "naive,dp,newton")]
        engines: Vec<Engine>,
        /// Timed repetitions per engine (the minimum is reported)
        #[arg(long, default_value_t = 3)]
        reps: u32,
        /// Arithmetic [default: f64]
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
}

/// What a command run produced: the report (when arguments were valid) and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Option<Report>,
    pub error: Option<String>,
}

impl Outcome {
    fn usage(err: Error) -> Self {
        Outcome { exit_code: EXIT_USAGE, report: None, error: Some(err.to_string()) }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let result = match &cli.command {
        Command::Partial { at, mode } => cmd_partial(at.n, at.m, mode.unwrap_or(ModeArg::Rational), cli.digits),
        Command::Verify { at, mode } => cmd_verify(at.n, at.m, mode.unwrap_or(ModeArg::Decimal), cli.digits),
        Command::Expand { m, order, eval, mode } => {
            cmd_expand(*m, *order, eval, mode.unwrap_or(ModeArg::F64), cli.digits)
        }
        Command::Oracle { at } => cmd_oracle(at.n, at.m),
        Command::Bench { n, m, engines, reps, mode } => {
            cmd_bench(*n, m, engines, *reps, mode.unwrap_or(ModeArg::F64), cli.digits)
        }
    };
    match result {
        Ok((exit_code, mut report)) => {
            report.elapsed_seconds = start.elapsed().as_secs_f64();
            Outcome { exit_code, report: Some(report), error: None }
        }
        Err(e) => Outcome::usage(e),
    }
}

fn check_digits_arg(digits: u32) -> Result<()> {
    if digits == 0 || digits > PI_DIGITS {
        return Err(Error::InvalidArgument(format!("--digits must be in 1..={PI_DIGITS}, got {digits}")));
    }
    Ok(())
}

fn report(command: &str, params: Value, results: Value, tables: Vec<Table>, notes: Vec<String>) -> Report {
    Report { command: command.into(), params, results, tables, notes, elapsed_seconds: 0.0 }
}

fn cell(v: &NumberValue) -> String {
    v.to_string()
}

fn fmt_f64(x: f64) -> String {
    if x == 0.0 || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn cmd_partial(n: u32, m: u64, mode: ModeArg, digits: u32) -> Result<(i32, Report)> {
    check_digits_arg(digits)?;
    let mode = mode.resolve(digits)?;
    let value = nested_partial(n as usize, m, &mode)?;
    let approx = value.to_decimal(digits.clamp(20, PI_DIGITS));
    let mut results = json!({ "n": n, "M": m, "value": value.to_json() });
    if let Some(r) = value.as_rational() {
        results["exact"] = json!(format_rational(r));
        results["approx"] = NumberValue::Decimal(approx.clone()).to_json();
    }
    let mut t = Table::new(["n", "M", "mode", "value"]);
    t.push([n.to_string(), m.to_string(), mode.to_string(), cell(&value)]);
    if value.is_exact() {
        t.header.push("approx".into());
        t.rows[0].push(approx.to_string());
    }
    let params = json!({ "n": n, "M": m, "mode": mode_json(&mode) });
    Ok((EXIT_OK, report("partial", params, results, vec![t], vec![])))
}

pub fn cmd_verify(n: u32, m: u64, mode: ModeArg, digits: u32) -> Result<(i32, Report)> {
    check_digits_arg(digits)?;
    if n > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("-n is capped at {MAX_ORDER}")));
    }
    if m < n as u64 {
        return Err(Error::InvalidArgument(format!("-M must be at least -n (got M={m}, n={n})")));
    }
    let mode = mode.resolve(digits)?;
    let rep = verify(n, m, &mode, digits)?;
    let results = serde_json::to_value(&rep).expect("report serializes");
    let mut t = Table::new(["field", "value"]);
    t.push(["n".to_string(), n.to_string()]);
    t.push(["M".to_string(), m.to_string()]);
    t.push(["mode".to_string(), mode.to_string()]);
    t.push(["computed".to_string(), cell(&rep.computed)]);
    t.push(["target".to_string(), rep.target.value.to_string()]);
    t.push(["tail_bound".to_string(), rep.tail_bound.to_string()]);
    t.push(["abs_error".to_string(), rep.abs_error.to_string()]);
    t.push(["rel_error".to_string(), rep.rel_error.to_string()]);
    t.push(["bracket_ok".to_string(), rep.bracket_ok.to_string()]);
    t.push(["pi_estimate".to_string(), rep.pi_estimate.to_string()]);
    let notes = vec![format!("tail bound: {}", rep.bound)];
    let code = if rep.bracket_ok { EXIT_OK } else { EXIT_CHECK_FAILED };
    let params = json!({ "n": n, "M": m, "digits": digits, "mode": mode_json(&mode) });
    Ok((code, report("verify", params, results, vec![t], notes)))
}

/// Relative tolerance for product-versus-polynomial agreement in `mode`.
fn identity_tolerance(mode: &NumberMode) -> Option<f64> {
    match mode.kind() {
        NumberKind::ExactRational => None,
        NumberKind::Float64 => Some(F64_IDENTITY_TOLERANCE),
        NumberKind::DecimalFloat => Some(10f64.powi(-(mode.digits().unwrap_or(50) as i32 - 8))),
    }
}

pub fn cmd_expand(m: u64, order: Option<usize>, eval: &[String], mode: ModeArg, digits: u32) -> Result<(i32, Report)> {
    check_digits_arg(digits)?;
    let mode = mode.resolve(digits)?;
    let poly = expand_product(m, order, &mode)?;

    let mut coeffs = Table::new(["k", "coefficient"]);
    for (k, c) in poly.coefficients().iter().enumerate() {
        coeffs.push([k.to_string(), cell(c)]);
    }

    let mut evals = Table::new(["x", "product", "polynomial", "cos(pi x)", "rel_diff", "abs_diff_cos", "cos_bound", "ok"]);
    let mut eval_json = Vec::new();
    let mut notes = Vec::new();
    for raw in eval {
        let exact = parse_exact(raw)?;
        let x = NumberValue::from_rational_in(&exact, &mode);
        let product = eval_product(m, &x, &mode)?;
        let polynomial = eval_poly(&poly, &x)?;
        let cosine = cos_reference(&NumberValue::Rational(exact.clone()), digits)?;
        let pf = product.to_f64();
        let rel_diff = if pf == 0.0 { (polynomial.to_f64()).abs() } else { ((pf - polynomial.to_f64()) / pf).abs() };
        let identity_ok = match identity_tolerance(&mode) {
            None => product == polynomial,
            Some(_) if poly.is_truncated() => true,
            Some(tol) => rel_diff <= tol,
        };
        // ∏_{k>M}(1 - 4x²u_k) ≥ 1 - 2x²/(2M-1) once every remaining factor is in [0, 1]
        let xf = exact_to_f64(&exact);
        let abs_diff_cos = (pf - cosine.to_f64()).abs();
        let cos_bound = if 2.0 * xf.abs() <= 2.0 * m as f64 + 1.0 {
            Some(pf.abs() * 2.0 * xf * xf / (2.0 * m as f64 - 1.0) + 1e-12)
        } else {
            None
        };
        let cos_ok = cos_bound.is_none_or(|b| abs_diff_cos <= b);
        evals.push([
            raw.clone(),
            cell(&product),
            cell(&polynomial),
            cosine.to_string(),
            fmt_f64(rel_diff),
            fmt_f64(abs_diff_cos),
            cos_bound.map_or("-".into(), fmt_f64),
            (identity_ok && cos_ok).to_string(),
        ]);
        eval_json.push(json!({
            "x": raw,
            "product": product.to_json(),
            "polynomial": polynomial.to_json(),
            "cos": NumberValue::Decimal(cosine).to_json(),
            "rel_diff_product_polynomial": rel_diff,
            "abs_diff_product_cos": abs_diff_cos,
            "cos_bound": cos_bound,
            "identity_ok": identity_ok,
            "cos_ok": cos_ok,
        }));
    }
    if poly.is_truncated() && !eval.is_empty() {
        notes.push("coefficients truncated by --order; polynomial column is a partial sum".into());
    }
    let mut tables = vec![coeffs];
    if !eval.is_empty() {
        tables.push(evals);
    }
    let results = json!({
        "M": m,
        "order": poly.coefficients().len() - 1,
        "coefficients": poly.coefficients().iter().map(NumberValue::to_json).collect::<Vec<_>>(),
        "evaluations": eval_json,
    });
    let params = json!({ "M": m, "order": order, "eval": eval, "digits": digits, "mode": mode_json(&mode) });
    Ok((EXIT_OK, report("expand", params, results, tables, notes)))
}

fn exact_to_f64(r: &num_rational::BigRational) -> f64 {
    NumberValue::Rational(r.clone()).to_f64()
}

pub fn cmd_oracle(n: u32, m: u64) -> Result<(i32, Report)> {
    let tuples = check_bruteforce_guard(m, n as usize)?;
    let mode = NumberMode::rational();
    let dp = esp_dp(m, n as usize, &mode)?.into_coefficients();
    let newton = esp_newton(m, n as usize, &mode)?.e;
    let brute = esp_bruteforce(m, n as usize, &mode)?;

    let mut t = Table::new(["k", "dp", "newton", "bruteforce", "equal"]);
    let mut rows = Vec::new();
    let mut first_mismatch = None;
    for k in 1..=n as usize {
        let equal = dp[k] == newton[k] && dp[k] == brute[k];
        if !equal && first_mismatch.is_none() {
            first_mismatch = Some(k);
        }
        t.push([k.to_string(), cell(&dp[k]), cell(&newton[k]), cell(&brute[k]), equal.to_string()]);
        rows.push(json!({
            "k": k,
            "dp": dp[k].to_json(),
            "newton": newton[k].to_json(),
            "bruteforce": brute[k].to_json(),
            "equal": equal,
        }));
    }
    let mut notes = vec![format!("enumerated {tuples} index tuples")];
    if let Some(k) = first_mismatch {
        notes.push(format!("first mismatch at k={k}"));
    }
    let results = json!({ "all_equal": first_mismatch.is_none(), "first_mismatch": first_mismatch, "tuples": tuples.to_string(), "rows": rows });
    let params = json!({ "n": n, "M": m, "mode": mode_json(&mode) });
    let code = if first_mismatch.is_none() { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok((code, report("oracle", params, results, vec![t], notes)))
}

/// One engine timed on one `(n, M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub engine: Engine,
    pub n: u32,
    pub m: u64,
    pub elapsed_seconds: f64,
    pub value: f64,
    /// SHA-256 prefix of the exact `p/q` value, rational mode only.
    pub checksum: Option<String>,
}

fn run_engine(engine: Engine, n: u32, m: u64, mode: &NumberMode) -> Result<NumberValue> {
    let n = n as usize;
    Ok(match engine {
        Engine::NaiveNested => esp_bruteforce(m, n, mode)?.swap_remove(n),
        Engine::Dp => esp_dp(m, n, mode)?.into_coefficients().swap_remove(n),
        Engine::Newton => esp_newton(m, n, mode)?.e.swap_remove(n),
    })
}

fn checksum(v: &NumberValue) -> Option<String> {
    let r = v.as_rational()?;
    let digest = Sha256::digest(format_rational(r).as_bytes());
    Some(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn cmd_bench(n: u32, ms: &[u64], engines: &[Engine], reps: u32, mode: ModeArg, digits: u32) -> Result<(i32, Report)> {
    check_digits_arg(digits)?;
    if n > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("-n is capped at {MAX_ORDER}")));
    }
    if ms.is_empty() || ms.contains(&0) {
        return Err(Error::InvalidArgument("-M values must be positive".into()));
    }
    if engines.is_empty() || reps == 0 {
        return Err(Error::InvalidArgument("need at least one engine and one repetition".into()));
    }
    let mode = mode.resolve(digits)?;
    let target = target_value(n, digits)?;

    let mut t = Table::new(["engine", "n", "M", "elapsed_s", "value", "checksum", "status"]);
    let mut rows = Vec::new();
    let mut all_agree = true;
    let mut brackets = Vec::new();
    for &m in ms {
        let mut results: Vec<BenchResult> = Vec::new();
        for &engine in engines {
            if engine == Engine::NaiveNested {
                if let Err(e) = check_bruteforce_guard(m, n as usize) {
                    t.push([engine.name().into(), n.to_string(), m.to_string(), "-".into(), "-".into(), "-".into(), "skipped (guard)".into()]);
                    rows.push(json!({ "engine": engine.name(), "n": n, "M": m, "skipped": e.to_string() }));
                    continue;
                }
            }
            let mut best = f64::INFINITY;
            let mut value = None;
            for _ in 0..reps {
                let start = Instant::now();
                let v = run_engine(engine, n, m, &mode)?;
                best = best.min(start.elapsed().as_secs_f64());
                value = Some(v);
            }
            let value = value.expect("reps >= 1");
            results.push(BenchResult {
                engine,
                n,
                m,
                elapsed_seconds: best,
                value: value.to_f64(),
                checksum: checksum(&value),
            });
        }
        let reference = results.first().map(|r| r.value);
        for r in &results {
            let agrees = reference.is_none_or(|v| relative_gap(v, r.value) <= BENCH_AGREEMENT);
            all_agree &= agrees;
            let status = if agrees { "ok" } else { "MISMATCH" };
            t.push([
                r.engine.name().into(),
                n.to_string(),
                m.to_string(),
                format!("{:.6e}", r.elapsed_seconds),
                fmt_f64(r.value),
                r.checksum.clone().unwrap_or_else(|| "-".into()),
                status.into(),
            ]);
            rows.push(json!({
                "engine": r.engine.name(),
                "n": n,
                "M": m,
                "elapsed_seconds": r.elapsed_seconds,
                "value": r.value,
                "checksum": r.checksum,
                "agrees": agrees,
            }));
        }
        if let Some(v) = reference {
            if m >= n as u64 {
                let tail = tail_bound(n, m, digits)?;
                let c = NumberValue::Float(v).to_decimal(digits);
                let ok = c <= target.value && target.value <= &c + &tail;
                brackets.push(json!({ "M": m, "tail_bound": NumberValue::Decimal(tail).to_json(), "bracket_ok": ok }));
            }
        }
    }
    let notes = vec![
        "dp costs O(M*n) per run; naive enumerates sum_(k<=n) C(M,k) index tuples (~M^n/n!)".to_string(),
        format!("engines must agree to {BENCH_AGREEMENT:e} relative"),
    ];
    let results = json!({
        "rows": rows,
        "all_agree": all_agree,
        "target": target.to_json(),
        "brackets": brackets,
    });
    let params = json!({
        "n": n,
        "M": ms,
        "engines": engines.iter().map(|e| e.name()).collect::<Vec<_>>(),
        "reps": reps,
        "mode": mode_json(&mode),
    });
    let code = if all_agree { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok((code, report("bench", params, results, vec![t], notes)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("pi-esp").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn partial_rational() {
        let out = run(&parse(&["partial", "-n", "2", "-M", "3"]));
        assert_eq!(out.exit_code, 0);
        let r = out.report.unwrap();
        assert_eq!(r.results["exact"], "7/45");
        assert_eq!(r.results["value"]["mode"], "rational");
    }

    #[test]
    fn partial_zero_and_one() {
        let r = run(&parse(&["partial", "-n", "1", "-M", "1"])).report.unwrap();
        assert_eq!(r.results["exact"], "1");
        let r = run(&parse(&["partial", "-n", "3", "-M", "2"])).report.unwrap();
        assert_eq!(r.results["exact"], "0");
    }

    #[test]
    fn verify_exit_codes() {
        let out = run(&parse(&["verify", "-n", "2", "-M", "2"]));
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report.unwrap().results["bracket_ok"], true);
        assert_eq!(run(&parse(&["verify", "-n", "1", "-M", "0"])).exit_code, 2);
        assert_eq!(run(&parse(&["verify", "-n", "17", "-M", "20"])).exit_code, 2);
        assert_eq!(run(&parse(&["--digits", "101", "verify", "-n", "1", "-M", "2"])).exit_code, 2);
    }

    #[test]
    fn expand_examples() {
        let r = run(&parse(&["expand", "-M", "1"])).report.unwrap();
        let c: Vec<f64> = r.results["coefficients"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v["value"].as_f64().unwrap())
            .collect();
        assert_eq!(c, vec![1.0, -4.0]);
        let r = run(&parse(&["expand", "-M", "2", "--order", "2", "--mode", "rational"])).report.unwrap();
        assert_eq!(r.results["coefficients"][2]["value"], "16/9");
    }

    #[test]
    fn oracle_guard_and_agreement() {
        let out = run(&parse(&["oracle", "-n", "2", "-M", "2"]));
        assert_eq!(out.exit_code, 0);
        let r = out.report.unwrap();
        assert_eq!(r.results["rows"][1]["dp"]["value"], "1/9");
        assert_eq!(r.results["rows"][1]["bruteforce"]["value"], "1/9");
        assert_eq!(run(&parse(&["oracle", "-n", "6", "-M", "300"])).exit_code, 2);
    }

    #[test]
    fn bench_small() {
        let out = run(&parse(&["bench", "-n", "1", "-M", "10", "--reps", "1"]));
        assert_eq!(out.exit_code, 0);
        let r = out.report.unwrap();
        let rows = r.results["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0]["value"], rows[1]["value"]);
    }

    #[test]
    fn bench_skips_naive_past_guard() {
        let out = run(&parse(&["bench", "-n", "6", "-M", "300", "--engines", "naive,dp", "--reps", "1"]));
        assert_eq!(out.exit_code, 0);
        let rows = out.report.unwrap().results["rows"].as_array().unwrap().clone();
        assert!(rows[0].get("skipped").is_some());
        assert!(rows[1]["value"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn bench_rational_checksums() {
        let r = run(&parse(&["bench", "-n", "2", "-M", "6", "--mode", "rational", "--reps", "1"])).report.unwrap();
        let rows = r.results["rows"].as_array().unwrap();
        let sums: Vec<&str> = rows.iter().map(|row| row["checksum"].as_str().unwrap()).collect();
        assert!(sums.iter().all(|s| s.len() == 16 && *s == sums[0]));
    }
}
